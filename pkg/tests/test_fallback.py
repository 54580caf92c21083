"""Compiled kernels against the plain-Python fallback path."""
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from abrlab import kernels
from abrlab.plant import PlantParams, build_scenario, run_episode

PARAMS = PlantParams(duration=120.0)

SNIPPET = """
import json
from abrlab._accel import NUMBA_ENABLED
from abrlab.metrics import qoe_report
from abrlab.plant import PlantParams, build_scenario, run_episode

params = PlantParams(duration=120.0)
log = run_episode(build_scenario(2, 3, params), params=params, replan_enabled=True)
r = qoe_report(log)
print(json.dumps({"numba": NUMBA_ENABLED, "avg": r.avg_quality,
                  "switches": r.switch_count, "rebuf": r.rebuffer_count,
                  "x_end": log.x[-1]}))
"""


def run_subprocess(disable: bool) -> dict:
    env = dict(os.environ, ABRLAB_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_fallback_loop_matches_compiled():
    trace = build_scenario(3, 1, PARAMS)
    jitted = run_episode(trace, params=PARAMS, replan_enabled=True)
    compiled = kernels.episode_loop
    kernels.episode_loop = kernels._episode_loop
    try:
        plain = run_episode(trace, params=PARAMS, replan_enabled=True)
    finally:
        kernels.episode_loop = compiled
    for name in ("x", "x_meas", "R", "u", "ref", "R_k", "x_k", "t_k"):
        np.testing.assert_allclose(getattr(jitted, name), getattr(plain, name),
                                   rtol=1e-12, atol=1e-12)
    np.testing.assert_array_equal(jitted.R_k, plain.R_k)


def test_env_flag_selects_fallback():
    res = run_subprocess(disable=True)
    assert res["numba"] is False


def test_fallback_episode_matches_subprocess():
    a = run_subprocess(disable=False)
    b = run_subprocess(disable=True)
    assert a["avg"] == pytest.approx(b["avg"], rel=1e-12)
    assert a["switches"] == b["switches"]
    assert a["rebuf"] == b["rebuf"]
    assert a["x_end"] == pytest.approx(b["x_end"], rel=1e-12)
