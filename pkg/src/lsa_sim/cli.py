"""Batch runner CLI: single runs and three-policy sweeps.

Exit codes: 0 success, 2 configuration/usage errors, 1 runtime errors.
Flag precedence: flag > config file > built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from . import __version__, metrics
from .lsa_control import POLICIES
from .runner import simulate
from .scenario import ConfigError, ScenarioConfig, config_to_text, default_config, load_config_file

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2

COMPARISON_HEADER = "t_s," + ",".join(POLICIES)


def _parse_snapshots(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"bad --snapshots value {text!r}; expected t1,t2,...") from None


def _load_cfg(args) -> ScenarioConfig:
    cfg = load_config_file(args.config) if args.config else default_config()
    overrides = {}
    if args.duration is not None:
        overrides["observation_s"] = args.duration
    if args.i0 is not None:
        overrides["interference_threshold_dbm"] = args.i0
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        cfg = replace(cfg, **overrides)
    from .scenario import validate_config

    validate_config(cfg)
    return cfg


def _write_manifest(out_dir: str, cfg, policy, seed, duration_s, files):
    manifest = {
        "tool": "lsa-sim",
        "version": __version__,
        "policy": policy,
        "seed": seed,
        "config": config_to_text(cfg).splitlines(),
        "wall_clock_s": duration_s,
        "outputs": [
            {"name": os.path.basename(p), "bytes": os.path.getsize(p)} for p in files
        ],
    }
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))


def _execute_run(cfg, policy, seed, out_dir, snapshots) -> list[str]:
    started = time.monotonic()
    result = simulate(cfg, policy, seed)
    files = metrics.export_run(result, out_dir, snapshots)
    _write_manifest(out_dir, cfg, policy, seed, time.monotonic() - started, files)
    return files


def cmd_run(args) -> int:
    cfg = _load_cfg(args)
    snapshots = _parse_snapshots(args.snapshots) if args.snapshots else metrics.DEFAULT_SNAPSHOT_TIMES_S
    _execute_run(cfg, args.policy, cfg.seed, args.out, snapshots)
    return EXIT_OK


def _sweep_one(payload):
    cfg, policy, seed, out_dir, snapshots = payload
    _execute_run(cfg, policy, seed, out_dir, snapshots)
    return policy


def cmd_sweep(args) -> int:
    cfg = _load_cfg(args)
    snapshots = _parse_snapshots(args.snapshots) if args.snapshots else metrics.DEFAULT_SNAPSHOT_TIMES_S
    jobs = [
        (cfg, policy, cfg.seed, os.path.join(args.out, policy), snapshots)
        for policy in POLICIES
    ]
    workers = int(os.environ.get("LSA_SIM_THREADS", "0") or 0)
    if workers >= 2:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            list(pool.map(_sweep_one, jobs))
    else:
        for job in jobs:
            _sweep_one(job)
    _write_comparison(args.out)
    return EXIT_OK


def _write_comparison(out_dir: str):
    """Join the three energy series on t_s (one LSA power column per policy)."""
    series = {}
    times = None
    for policy in POLICIES:
        path = os.path.join(out_dir, policy, "energy.csv")
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        rows = [line.split(",") for line in lines[1:]]
        t = [r[0] for r in rows]
        if times is None:
            times = t
        elif times != t:
            raise RuntimeError("energy series of the sweep runs do not align on t_s")
        series[policy] = [r[2] for r in rows]
    path = os.path.join(out_dir, "comparison.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(COMPARISON_HEADER + "\n")
        for i, t in enumerate(times or []):
            fh.write(",".join([t] + [series[p][i] for p in POLICIES]) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsa-sim",
        description="Deterministic system-level simulator of dynamic LSA spectrum sharing.",
    )
    parser.add_argument("--version", action="version", version=f"lsa-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_policy: bool):
        p.add_argument("--config", help="scenario config file (key = value)")
        if with_policy:
            p.add_argument("--policy", required=True, choices=POLICIES)
        p.add_argument("--seed", type=int, default=None, help="64-bit run seed (default from config)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--duration", type=float, default=None, help="override observation_s")
        p.add_argument("--snapshots", default=None, help="ue_power snapshot times, e.g. 2,8,15")
        p.add_argument("--i0", type=float, default=None, help="override interference_threshold_dbm")

    p_run = sub.add_parser("run", help="execute one simulation")
    common(p_run, with_policy=True)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run all three policies with a shared seed")
    common(p_sweep, with_policy=False)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"lsa-sim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure: report, nonzero exit
        print(f"lsa-sim: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
