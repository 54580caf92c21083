"""Run configuration: defaults, file/flag parsing, validation, emission."""
import argparse
from dataclasses import dataclass, field, fields

from .controller import BitrateLadder, ControllerConfig, DEFAULT_LADDER
from .plant import PlantParams, ScenarioConfig
from .trajectory import BezierProfile

EMIT_CHOICES = ("log", "qoe", "table", "plotdata")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: int = 1
    replan: bool = False
    seeds: list = field(default_factory=lambda: [0])
    out: str = "out"
    emit: list = field(default_factory=lambda: ["qoe", "table"])
    # reference trajectory
    t0: float = 0.0
    tf: float = 10.0
    x0: float = 0.0
    xf: float = 4.0
    replan_lower: float = 4.5
    replan_upper: float = 12.0
    # controller
    ladder: list = field(default_factory=lambda: list(DEFAULT_LADDER))
    alpha: float = -10.0
    kp: float = 0.25
    tau: float = 1.0
    decision_interval: float = 2.0
    # plant / scenarios
    c0: float = 0.7
    duration: float = 600.0
    delta_startup: float = 5.0
    chunk_duration: float = 2.0
    te: float = 0.1
    x_noise: float = 0.0
    s2_segment: float = 60.0
    s2_level_lo: float = 0.5
    s2_level_hi: float = 2.5
    s2_noise: float = 0.2
    s3_segment: float = 20.0
    s3_level_lo: float = 0.25
    s3_level_hi: float = 1.5
    s3_noise: float = 0.3

    # ---- derived domain objects (validated on construction) ----

    def profile(self) -> BezierProfile:
        return BezierProfile(self.t0, self.tf, self.x0, self.xf)

    def bitrate_ladder(self) -> BitrateLadder:
        return BitrateLadder(tuple(self.ladder))

    def controller_config(self) -> ControllerConfig:
        return ControllerConfig(self.alpha, self.kp, self.decision_interval, self.tau)

    def plant_params(self) -> PlantParams:
        return PlantParams(self.delta_startup, self.chunk_duration, self.te, self.duration)

    def scenario_config(self) -> ScenarioConfig:
        return ScenarioConfig(self.c0, self.s2_segment, (self.s2_level_lo, self.s2_level_hi),
                              self.s2_noise, self.s3_segment,
                              (self.s3_level_lo, self.s3_level_hi), self.s3_noise)

    def validate(self) -> None:
        if self.scenario not in (1, 2, 3):
            raise ConfigError(f"scenario: must be 1, 2 or 3, got {self.scenario}")
        if not self.seeds:
            raise ConfigError("seeds: at least one seed required")
        for e in self.emit:
            if e not in EMIT_CHOICES:
                raise ConfigError(f"emit: unknown format {e!r} (choose from {EMIT_CHOICES})")
        if self.c0 <= 0.0:
            raise ConfigError("c0: nominal capacity must be positive")
        if self.x_noise < 0.0:
            raise ConfigError("x_noise: must be non-negative")
        if not self.replan_lower < self.replan_upper:
            raise ConfigError("replan_lower must be below replan_upper")
        for name, builder in (("trajectory", self.profile),
                              ("ladder", self.bitrate_ladder),
                              ("controller", self.controller_config),
                              ("plant", self.plant_params)):
            try:
                builder()
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from exc
        if self.tau < 2.0 * self.te:
            raise ConfigError("tau: must be at least 2*te")


# dotted file key -> dataclass field
_KEYMAP = {
    "run.scenario": "scenario", "run.replan": "replan", "run.seeds": "seeds",
    "run.out": "out", "run.emit": "emit",
    "trajectory.t0": "t0", "trajectory.tf": "tf",
    "trajectory.x0": "x0", "trajectory.xf": "xf",
    "trajectory.replan_lower": "replan_lower", "trajectory.replan_upper": "replan_upper",
    "controller.ladder": "ladder", "controller.alpha": "alpha",
    "controller.kp": "kp", "controller.tau": "tau",
    "controller.decision_interval": "decision_interval",
    "plant.c0": "c0", "plant.duration": "duration",
    "plant.delta_startup": "delta_startup", "plant.chunk_duration": "chunk_duration",
    "plant.te": "te", "plant.x_noise": "x_noise",
    "scenario.s2_segment": "s2_segment", "scenario.s2_level_lo": "s2_level_lo",
    "scenario.s2_level_hi": "s2_level_hi", "scenario.s2_noise": "s2_noise",
    "scenario.s3_segment": "s3_segment", "scenario.s3_level_lo": "s3_level_lo",
    "scenario.s3_level_hi": "s3_level_hi", "scenario.s3_noise": "s3_noise",
}
_FIELD_TO_KEY = {v: k for k, v in _KEYMAP.items()}


def parse_seeds(text: str) -> list:
    """Seed list syntax: 'a..b' inclusive range or comma-separated integers."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"seeds: empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"seeds: cannot parse {text!r}") from exc


def _parse_value(name: str, text: str):
    text = text.strip()
    if name == "seeds":
        return parse_seeds(text)
    if name in ("emit",):
        return [v.strip() for v in text.split(",") if v.strip()]
    if name == "ladder":
        return [float(v) for v in text.split(",") if v.strip()]
    if name == "out":
        return text
    if name == "scenario":
        return int(text)
    if name == "replan":
        if text.lower() in ("true", "1", "yes", "on"):
            return True
        if text.lower() in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"replan: expected a boolean, got {text!r}")
    return float(text)


def _format_value(name: str, value) -> str:
    if name in ("seeds",):
        return ",".join(str(v) for v in value)
    if name in ("emit",):
        return ",".join(value)
    if name == "ladder":
        return ",".join("%.10g" % v for v in value)
    if name == "replan":
        return "true" if value else "false"
    if name in ("out",):
        return str(value)
    if name == "scenario":
        return str(value)
    return "%.10g" % value


def read_config_file(path) -> dict:
    """Flat 'section.key = value' file; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, text = (s.strip() for s in line.split("=", 1))
            if key not in _KEYMAP:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            name = _KEYMAP[key]
            values[name] = _parse_value(name, text)
    return values


def emit_config(cfg: RunConfig, path) -> None:
    """Write a config file that parses back to an equal RunConfig."""
    with open(path, "w") as fh:
        for f in fields(RunConfig):
            fh.write(f"{_FIELD_TO_KEY[f.name]} = {_format_value(f.name, getattr(cfg, f.name))}\n")


def build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="abrlab",
        description="Adaptive-bitrate buffer-control scenario runner")
    p.add_argument("--config", metavar="PATH", help="config file (flags override it)")
    p.add_argument("--scenario", type=int, choices=(1, 2, 3))
    rp = p.add_mutually_exclusive_group()
    rp.add_argument("--replan", dest="replan", action="store_true", default=None)
    rp.add_argument("--no-replan", dest="replan", action="store_false", default=None)
    p.add_argument("--seeds", help="e.g. '0..99' or '1,2,5'")
    p.add_argument("--out", help="output directory")
    p.add_argument("--emit", help="comma list from: " + ",".join(EMIT_CHOICES))
    for flag, name in (
            ("--t0", "t0"), ("--tf", "tf"), ("--x0", "x0"), ("--xf", "xf"),
            ("--replan-lower", "replan_lower"), ("--replan-upper", "replan_upper"),
            ("--alpha", "alpha"), ("--kp", "kp"), ("--tau", "tau"),
            ("--decision-interval", "decision_interval"),
            ("--c0", "c0"), ("--duration", "duration"),
            ("--delta-startup", "delta_startup"),
            ("--chunk-duration", "chunk_duration"), ("--te", "te"),
            ("--x-noise", "x_noise"),
            ("--s2-segment", "s2_segment"), ("--s2-level-lo", "s2_level_lo"),
            ("--s2-level-hi", "s2_level_hi"), ("--s2-noise", "s2_noise"),
            ("--s3-segment", "s3_segment"), ("--s3-level-lo", "s3_level_lo"),
            ("--s3-level-hi", "s3_level_hi"), ("--s3-noise", "s3_noise")):
        p.add_argument(flag, dest=name, type=float)
    p.add_argument("--ladder", help="comma list of admissible bitrates")
    return p


def parse_config(argv) -> RunConfig:
    """CLI arguments (optionally over a config file) to a validated RunConfig."""
    args = build_arg_parser().parse_args(argv)
    cfg = RunConfig()
    if args.config:
        for name, value in read_config_file(args.config).items():
            setattr(cfg, name, value)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is None:
            continue
        if f.name == "seeds":
            v = parse_seeds(v)
        elif f.name == "emit":
            v = [s.strip() for s in v.split(",") if s.strip()]
        elif f.name == "ladder":
            v = [float(s) for s in v.split(",") if s.strip()]
        elif f.name == "scenario":
            v = int(v)
        setattr(cfg, f.name, v)
    cfg.validate()
    return cfg
