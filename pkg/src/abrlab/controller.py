"""Bitrate decision pipeline: flat feedforward, iP feedback, ladder quantization."""
from dataclasses import dataclass, replace

import numpy as np

from . import kernels

DEFAULT_LADDER = (0.35, 0.6, 1.0, 2.0, 3.0, 5.0)


@dataclass(frozen=True)
class BitrateLadder:
    """Finite admissible bitrate set, strictly increasing."""
    rates: tuple = DEFAULT_LADDER

    def __post_init__(self):
        r = tuple(float(v) for v in self.rates)
        if len(r) == 0:
            raise ValueError("ladder must be non-empty")
        if any(v <= 0.0 for v in r):
            raise ValueError("ladder rates must be positive")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("ladder rates must be strictly increasing")
        object.__setattr__(self, "rates", r)

    def as_array(self) -> np.ndarray:
        return np.array(self.rates)

    @property
    def max_gap(self) -> float:
        if len(self.rates) == 1:
            return 0.0
        return max(b - a for a, b in zip(self.rates, self.rates[1:]))


@dataclass(frozen=True)
class ControllerConfig:
    alpha: float = -10.0
    kp: float = 0.25
    decision_interval: float = 2.0
    tau: float = 1.0

    def __post_init__(self):
        if self.kp <= 0.0:
            raise ValueError("kp must be positive (closed-loop stability)")
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        if self.decision_interval <= 0.0 or self.tau <= 0.0:
            raise ValueError("decision_interval and tau must be positive")


@dataclass(frozen=True)
class ControllerState:
    current_R: float
    u_continuous: float = 0.0
    quant_residual: float = 0.0
    last_decision_time: float = float("-inf")


def feedforward(c_nominal: float, ref_slope: float = 0.0) -> float:
    """Nominal bitrate from the flat inversion R = C / (x_ref' + 1)."""
    if c_nominal <= 0.0:
        raise ValueError("c_nominal must be positive")
    if ref_slope <= -1.0:
        raise ValueError("reference slope must exceed -1 (drain faster than playback)")
    return kernels.feedforward(c_nominal, ref_slope)


def ip_control(f_est: float, ref_rate: float, e: float, cfg: ControllerConfig) -> float:
    """Continuous feedback correction u = -(F_est - ref_rate + kp*e) / alpha."""
    return kernels.ip_control(f_est, ref_rate, e, cfg.alpha, cfg.kp)


def quantize(r_desired: float, ladder: BitrateLadder) -> tuple[float, float]:
    """Closest ladder rate (ties toward the lower one) and its residual."""
    R, eps = kernels.quantize(r_desired, ladder.as_array())
    return float(R), float(eps)


def decide_bitrate(state: ControllerState, now: float, ref: float, ref_rate: float,
                   x_meas: float, f_est: float | None, c_nominal: float,
                   ladder: BitrateLadder, cfg: ControllerConfig,
                   ref_slope: float = 0.0) -> ControllerState:
    """Chunk-cadence bitrate decision; holds the current rate between instants.

    With no drift estimate yet (warm-up) the correction is zero and the
    decision is pure feedforward.
    """
    if now < 0.0:
        raise ValueError("now must be non-negative")
    if now - state.last_decision_time < cfg.decision_interval:
        return state
    rstar = feedforward(c_nominal, ref_slope)
    if f_est is None:
        u = 0.0
    else:
        e = x_meas - ref
        u = ip_control(f_est, ref_rate, e, cfg)
    R, eps = quantize(rstar + u, ladder)
    return replace(state, current_R=R, u_continuous=u, quant_residual=eps,
                   last_decision_time=now)
