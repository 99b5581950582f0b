"""Command-line interface.

Subcommands: ``simulate`` (fixed-temperature run), ``anneal`` (cooling
ramp), ``analyze`` (recompute analysis CSVs and plots of an existing
run directory) and ``bench`` (update-rate benchmark).

Exit codes: 0 success, 1 runtime/I-O failure, 2 flag validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import analyze_run
from .errors import MissingSnapshots, RunDirLocked
from .experiments import (AnnealSchedule, RegimePreset, benchmark,
                          run_anneal, run_regime)
from .lattice import FIELD_REFRESH_MODES, INIT_MODES
from .runio import run_dir_lock

PROFILES = {
    "paper": {"size": 100, "steps": 2_000_000},
    "ci": {"size": 64, "steps": 200_000},
}


class FlagError(Exception):
    """Validation failure; the message names the offending flag."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise FlagError(message)


def _fill_profile(args) -> None:
    profile = PROFILES.get(getattr(args, "profile", None) or "", {})
    if getattr(args, "size", None) is None:
        args.size = profile.get("size", 100)
    if getattr(args, "steps", None) is None:
        args.steps = profile.get("steps", args.default_steps)


def cmd_simulate(args) -> int:
    _fill_profile(args)
    _require(args.size >= 2, f"--size must be >= 2 (got {args.size})")
    _require(args.temp > 0, f"--temp must be > 0 (got {args.temp})")
    _require(args.alpha >= 0, f"--alpha must be >= 0 (got {args.alpha})")
    _require(args.steps >= 1, f"--steps must be >= 1 (got {args.steps})")
    _require(args.therm >= 0, f"--therm must be >= 0 (got {args.therm})")
    _require(args.snapshot_every >= 0,
             f"--snapshot-every must be >= 0 (got {args.snapshot_every})")
    _require(args.seed >= 0, f"--seed must be >= 0 (got {args.seed})")
    _require(args.record_every >= 1,
             f"--record-every must be >= 1 (got {args.record_every})")
    preset = RegimePreset(name="cli", temperature=args.temp, alpha=args.alpha,
                          side=args.size, run_sweeps=args.steps,
                          snapshot_every=args.snapshot_every,
                          therm_sweeps=args.therm, init=args.init,
                          coupling=args.coupling,
                          record_every=args.record_every)
    run_regime(preset, args.seed, args.out, xmin=args.xmin, plots=args.plots,
               field_refresh=args.field_refresh)
    return 0


def cmd_anneal(args) -> int:
    _fill_profile(args)
    _require(args.size >= 2, f"--size must be >= 2 (got {args.size})")
    _require(args.t_start > 0, f"--t-start must be > 0 (got {args.t_start})")
    _require(args.t_end > 0, f"--t-end must be > 0 (got {args.t_end})")
    _require(args.alpha >= 0, f"--alpha must be >= 0 (got {args.alpha})")
    _require(args.therm >= 0, f"--therm must be >= 0 (got {args.therm})")
    _require(args.steps > args.therm,
             f"--steps must exceed --therm (got {args.steps} <= {args.therm})")
    _require(args.record_every >= 1,
             f"--record-every must be >= 1 (got {args.record_every})")
    _require(args.snapshot_every >= 0,
             f"--snapshot-every must be >= 0 (got {args.snapshot_every})")
    _require(args.plateaus >= 0, f"--plateaus must be >= 0 (got {args.plateaus})")
    _require(args.seed >= 0, f"--seed must be >= 0 (got {args.seed})")
    schedule = AnnealSchedule(t_start=args.t_start, t_end=args.t_end,
                              total_sweeps=args.steps, therm_sweeps=args.therm,
                              ramp=args.ramp, record_every=args.record_every,
                              plateaus=args.plateaus)
    run_anneal(args.size, args.alpha, schedule, args.seed, args.out,
               coupling=args.coupling, snapshot_every=args.snapshot_every,
               plots=args.plots, field_refresh=args.field_refresh)
    return 0


def cmd_analyze(args) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise FileNotFoundError(f"missing run directory {run_dir}")
    with run_dir_lock(run_dir):
        analyze_run(run_dir, xmin=args.xmin, max_lag=args.max_lag,
                    plots=args.plots)
    return 0


def cmd_bench(args) -> int:
    _require(args.size >= 2, f"--size must be >= 2 (got {args.size})")
    _require(args.temp > 0, f"--temp must be > 0 (got {args.temp})")
    _require(args.seconds > 0, f"--seconds must be > 0 (got {args.seconds})")
    result = benchmark(side=args.size, temperature=args.temp,
                       alpha=args.alpha, seconds=args.seconds, seed=args.seed)
    print(f"attempts_per_second={result['attempts_per_second']:.6g}")
    print(f"sweeps_per_second={result['sweeps_per_second']:.6g}")
    print(f"attempts={result['attempts']} elapsed={result['elapsed']:.3f}s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmarket",
        description="Monte Carlo simulator for a globally coupled 2D Ising "
                    "market model")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="fixed-temperature run")
    sim.add_argument("--size", type=int, default=None,
                     help="lattice side N (default 100, or per --profile)")
    sim.add_argument("--temp", type=float, default=2.2, help="temperature 1/beta")
    sim.add_argument("--alpha", type=float, default=4.0,
                     help="global minority coupling")
    sim.add_argument("--steps", type=int, default=None,
                     help="measured sweeps after thermalization (default 10000)")
    sim.add_argument("--therm", type=int, default=25_000,
                     help="thermalization sweeps")
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--out", required=True, help="run directory to create")
    sim.add_argument("--snapshot-every", type=int, default=1000)
    sim.add_argument("--init", choices=INIT_MODES, default="random")
    sim.add_argument("--coupling", type=float, default=1.0,
                     help="nearest-neighbour coupling J")
    sim.add_argument("--record-every", type=int, default=1)
    sim.add_argument("--field-refresh", choices=FIELD_REFRESH_MODES,
                     default="attempt",
                     help="when |M| in the local field is refreshed")
    sim.add_argument("--xmin", type=int, default=5,
                     help="power-law fit lower cutoff")
    sim.add_argument("--profile", choices=sorted(PROFILES))
    sim.add_argument("--no-plots", dest="plots", action="store_false",
                     help="skip SVG quick-look plots")
    sim.set_defaults(func=cmd_simulate, default_steps=10_000)

    ann = sub.add_parser("anneal", help="cooling-ramp run")
    ann.add_argument("--size", type=int, default=None,
                     help="lattice side N (default 100, or per --profile)")
    ann.add_argument("--alpha", type=float, default=4.0)
    ann.add_argument("--t-start", type=float, default=10.0)
    ann.add_argument("--t-end", type=float, default=0.1)
    ann.add_argument("--steps", type=int, default=None,
                     help="total sweeps including thermalization "
                          "(default 2000000, or per --profile)")
    ann.add_argument("--therm", type=int, default=25_000)
    ann.add_argument("--ramp", choices=("t", "beta"), default="t",
                     help="interpolate linearly in T or in 1/T")
    ann.add_argument("--plateaus", type=int, default=0,
                     help="staircase cooling with this many plateaus "
                          "(0 = continuous ramp)")
    ann.add_argument("--record-every", type=int, default=1)
    ann.add_argument("--snapshot-every", type=int, default=0)
    ann.add_argument("--coupling", type=float, default=1.0,
                     help="nearest-neighbour coupling J")
    ann.add_argument("--field-refresh", choices=FIELD_REFRESH_MODES,
                     default="attempt",
                     help="when |M| in the local field is refreshed")
    ann.add_argument("--seed", type=int, default=1)
    ann.add_argument("--out", required=True)
    ann.add_argument("--profile", choices=sorted(PROFILES))
    ann.add_argument("--no-plots", dest="plots", action="store_false")
    ann.set_defaults(func=cmd_anneal, default_steps=2_000_000)

    ana = sub.add_parser("analyze", help="recompute analysis outputs of a run")
    ana.add_argument("run_dir", help="existing run directory")
    ana.add_argument("--xmin", type=int, default=5)
    ana.add_argument("--max-lag", type=int, default=20)
    ana.add_argument("--no-plots", dest="plots", action="store_false")
    ana.set_defaults(func=cmd_analyze)

    ben = sub.add_parser("bench", help="measure spin-update throughput")
    ben.add_argument("--size", type=int, default=100)
    ben.add_argument("--temp", type=float, default=2.2)
    ben.add_argument("--alpha", type=float, default=4.0)
    ben.add_argument("--seconds", type=float, default=2.0)
    ben.add_argument("--seed", type=int, default=1)
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, MissingSnapshots, RunDirLocked) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
