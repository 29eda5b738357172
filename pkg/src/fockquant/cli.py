"""Command-line runner: ``fockquant list`` and ``fockquant run <id>``.

Exit codes: 0 when the experiment passes, 1 when it fails, 2 on a
configuration or guard error (nothing is written in that case).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import EXPERIMENTS, ConfigError, run_experiment
from .fock import GuardError
from .report import write_report

log = logging.getLogger("fockquant")

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress")
    parser = argparse.ArgumentParser(prog="fockquant", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.set_defaults(verbose=False)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list experiment ids", parents=[common])
    run = sub.add_parser("run", help="run one experiment", parents=[common])
    run.add_argument("experiment")
    run.add_argument("--config", help="JSON file overriding the experiment defaults")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1, help="worker processes over grid points")
    run.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    show = sub.add_parser("defaults", help="print the default configuration of an experiment",
                          parents=[common])
    show.add_argument("experiment")
    return parser


def _load_config(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "list":
        for exp_id, exp in EXPERIMENTS.items():
            print(f"{exp_id}\t{exp.summary}")
        return EXIT_PASS
    if args.command == "defaults":
        if args.experiment not in EXPERIMENTS:
            print(f"error: unknown experiment {args.experiment!r}", file=sys.stderr)
            return EXIT_ERROR
        print(json.dumps(EXPERIMENTS[args.experiment].defaults, indent=2))
        return EXIT_PASS
    if args.seed < 0 or args.jobs < 1:
        print("error: --seed must be >= 0 and --jobs >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        config = _load_config(args.config)
        log.info("running %s (seed %d, jobs %d)", args.experiment, args.seed, args.jobs)
        result = run_experiment(args.experiment, config, seed=args.seed, jobs=args.jobs)
    except (ConfigError, GuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    paths = write_report(result, args.out, figures=not args.no_figures)
    for p in paths:
        log.info("wrote %s", p)
    print(f"{result.experiment}: {'PASS' if result.passed else 'FAIL'}")
    return EXIT_PASS if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
