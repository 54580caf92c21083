"""Command-line scenario runner and report generator."""
import csv
import sys
from pathlib import Path

from . import metrics
from .config import ConfigError, RunConfig, parse_config
from .plant import FMT, EpisodeLog, build_scenario, run_episode


def run_single(cfg: RunConfig, seed: int) -> EpisodeLog:
    """One episode under the given config and seed."""
    trace = build_scenario(cfg.scenario, seed, cfg.plant_params(), cfg.scenario_config())
    return run_episode(trace, cfg.profile(), cfg.bitrate_ladder(),
                       cfg.controller_config(), cfg.plant_params(),
                       replan_enabled=cfg.replan,
                       replan_lower=cfg.replan_lower, replan_upper=cfg.replan_upper,
                       x_noise_level=cfg.x_noise)


def _episode_tag(cfg: RunConfig, seed: int) -> str:
    return f"s{cfg.scenario}_{'replan' if cfg.replan else 'noreplan'}_{seed}"


def _write_plotdata(log: EpisodeLog, cfg: RunConfig, outdir: Path, tag: str) -> None:
    with open(outdir / f"capacity_{tag}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "c_true", "c_est"])
        for k in range(len(log.t)):
            w.writerow([FMT % log.t[k], FMT % log.c_true[k], FMT % log.c_est[k]])
    with open(outdir / f"buffer_{tag}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "ref", "stall_threshold"])
        for k in range(len(log.t)):
            w.writerow([FMT % log.t[k], FMT % log.x[k], FMT % log.ref[k],
                        FMT % cfg.chunk_duration])


def run(cfg: RunConfig) -> int:
    """Execute all seeds, write the requested outputs, print the table."""
    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    reports = []
    for seed in cfg.seeds:
        log = run_single(cfg, seed)
        reports.append(metrics.qoe_report(log, delta_chunk=cfg.chunk_duration,
                                          delta_startup=cfg.delta_startup))
        tag = _episode_tag(cfg, seed)
        if "log" in cfg.emit:
            log.to_csv(outdir / f"episode_{tag}.csv")
        if "plotdata" in cfg.emit:
            _write_plotdata(log, cfg, outdir, tag)
    if "qoe" in cfg.emit:
        metrics.reports_to_csv(reports, outdir / "qoe.csv")
        metrics.reports_to_json(reports, outdir / "qoe.json")
    rows = metrics.batch_report(reports)
    if "table" in cfg.emit:
        metrics.table_to_csv(rows, outdir / "table.csv")
    print(metrics.format_table(rows))
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv if argv is not None else sys.argv[1:])
    except ConfigError as exc:
        print(f"abrlab: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (OSError, ValueError) as exc:
        print(f"abrlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
