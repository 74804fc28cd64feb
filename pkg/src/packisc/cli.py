"""Command-line entry point.

    packisc run <scenario> [--seed N] [--out DIR] [--healthy] [--profile-dump]
    packisc validate <scenario>
    packisc sweep <scenario> --param dotted.key --values a,b,c [--jobs N]

Exit codes: 0 ran, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import yaml

from packisc.gas_transport import CFLError
from packisc.isc_dynamics import IntegrationError
from packisc.scenario import (
    DEFAULT_SCENARIO,
    ConfigError,
    emit,
    load_drive_cycle,
    read_config,
    run,
    scenario_from_dict,
    set_dotted,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SWEEP_FIELDS = (
    "value",
    "seed",
    "rupture_time",
    "first_force_alarm",
    "first_gas_alarm",
    "alert_time",
    "peak_theta_hat",
    "peak_outlet_ppm",
    "final_decision",
)

log = logging.getLogger("packisc")


def _load(path: str, seed: int | None = None, healthy: bool = False, overrides: dict | None = None):
    path = Path(path)
    raw = read_config(path)
    for key, value in (overrides or {}).items():
        raw = set_dotted(raw, key, value)
    if seed is not None:
        raw = set_dotted(raw, "noise.seed", seed)
    if healthy:
        raw = dict(raw, short=None)
    sc = scenario_from_dict(raw, base_dir=path.parent)
    if sc.drive_cycle is not None:
        load_drive_cycle(sc.drive_cycle)
    return sc


def cmd_run(args) -> int:
    sc = _load(args.scenario, args.seed, args.healthy)
    out = Path(args.out) if args.out else sc.output
    result = run(sc, profile_dump=args.profile_dump)
    paths = emit(result, out)
    s = result.summary
    print(
        f"force alarm {s['first_force_alarm']}  gas alarm {s['first_gas_alarm']}  "
        f"alert {s['alert_time']}  rupture {s['rupture_time']}  -> {paths['timeseries'].parent}"
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = _load(args.scenario)
    kind = "healthy" if sc.healthy else f"fault at t={sc.short.t_trigger} s"
    print(f"ok: {args.scenario} ({kind}, t_end={sc.t_end} s)")
    return EXIT_OK


def _sweep_one(job):
    scenario_path, param, value, seed = job
    sc = _load(scenario_path, seed, overrides={param: value})
    s = run(sc).summary
    return {"value": value, **{k: s[k] for k in SWEEP_FIELDS if k in s}, "seed": seed}


def cmd_sweep(args) -> int:
    values = [yaml.safe_load(v) for v in args.values.split(",")]
    base_seed = args.seed if args.seed is not None else _load(args.scenario).noise.seed
    jobs = [(args.scenario, args.param, v, base_seed + k) for k, v in enumerate(values)]
    for job in jobs:
        # Fail fast on a bad key or value before spending time on runs.
        _load(job[0], job[3], overrides={job[1]: job[2]})
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]

    out = Path(args.out) if args.out else Path("out")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    w = csv.DictWriter(sys.stdout, SWEEP_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="packisc", description="Pack ISC simulation and force/gas fault detection")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write timeseries.csv + summary.json")
    p.add_argument("scenario", nargs="?", default=str(DEFAULT_SCENARIO))
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--healthy", action="store_true", help="drop the short circuit")
    p.add_argument("--profile-dump", action="store_true", help="also write the gas field per frame")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="parse and check a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="rerun a scenario over values of one parameter")
    p.add_argument("scenario", nargs="?", default=str(DEFAULT_SCENARIO))
    p.add_argument("--param", required=True, help="dotted config key, e.g. thresholds.eps_f")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, CFLError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
