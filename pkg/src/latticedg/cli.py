"""``latticedg`` command line: run a seeded benchmark sweep and write CSV/JSON."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import ExperimentConfig, run_experiment, write_report
from .maximize import Algorithm
from .objectives import DEFAULT_P


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latticedg",
        description="Benchmark double greedy maximizers on the revenue objective.",
        allow_abbrev=False,
    )
    ap.add_argument("--input", required=True,
                    help="edge-list file, bundled:<name>, synthetic:gnp:<n>:<density>:<seed> "
                         "or synthetic:table:<n>:<seed>")
    ap.add_argument("--algo", action="append", choices=[a.value for a in Algorithm],
                    help="algorithm to run (repeatable; default SG, DG, FastDG)")
    ap.add_argument("--eps", action="append", type=float,
                    help="epsilon for FastDG/PolyDG (repeatable; default 0.5)")
    ap.add_argument("--bound", type=int, default=100, help="uniform bound B on every coordinate")
    ap.add_argument("--p", type=float, default=DEFAULT_P, help="advocacy probability per unit")
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0, help="64-bit base seed")
    ap.add_argument("--out", default="-", help="output path ('-' for stdout)")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes")
    ap.add_argument("--shuffle", action="store_true", help="seeded random element order per run")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        config = ExperimentConfig(
            input=args.input,
            algorithms=args.algo or ["SG", "DG", "FastDG"],
            epsilons=args.eps or [0.5],
            bound=args.bound,
            p=args.p,
            trials=args.trials,
            base_seed=args.seed,
            output=args.out,
            format=args.format,
            jobs=args.jobs,
            shuffle=args.shuffle,
        )
        reports = run_experiment(config)
        write_report(reports, config.output, config.format)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"latticedg: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
