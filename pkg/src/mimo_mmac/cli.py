"""Command-line entry point: ``mmac <subcommand> [options]``.

Exit codes: 0 success, 2 validation error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments
from .csvio import Table
from .errors import ConfigurationError, TrialError, ValidationError
from .montecarlo import WORKERS_ENV
from .scenario import Scenario, load_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, help="scenario JSON file (default: built-in setup)")
    common.add_argument("--seed", type=_u64, help="override the scenario master seed")
    common.add_argument("--out", type=Path, help="output CSV path (default: stdout)")
    common.add_argument("--trials", type=_positive,
                        help="override Monte-Carlo trials (exponent trials for `exponent`)")
    common.add_argument("--workers", type=_positive,
                        help=f"concurrent workers (default: ${WORKERS_ENV} or 1)")
    common.add_argument("--bits", action="store_true", help="report rates in bits instead of nats")

    parser = _Parser(prog="mmac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("rate", parents=[common], help="expected and asymptotic sum rates")
    sub.add_parser("exponent", parents=[common], help="error-exponent sweep")
    region = sub.add_parser("region", parents=[common], help="region feasibility queries")
    region.add_argument("query_file", type=Path)
    sub.add_parser("fig2", parents=[common], help="sum rate versus codelength")
    sub.add_parser("fig3", parents=[common], help="sum rate versus receive antennas")
    sub.add_parser("hardening", parents=[common], help="channel-hardening diagnostics")
    return parser


def _scenario(args) -> Scenario:
    scenario = load_scenario(args.scenario) if args.scenario else Scenario()
    if args.trials is not None:
        field = "exponent_trials" if args.command == "exponent" else "rate_trials"
        if args.trials < 2:
            raise ConfigurationError("--trials must be >= 2")
        scenario = scenario.override(mc=replace(scenario.mc, **{field: args.trials}))
    return scenario.override(seed=args.seed)


def _emit(table: Table, args):
    if args.bits:
        table = table.to_bits()
    text = table.render()
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.write_text(text)
    if args.command in ("fig2", "fig3"):
        experiments.write_plot_stub(args.command, args.out)


def run(args) -> int:
    if args.command == "region":
        try:
            text = args.query_file.read_text()
        except OSError as exc:
            raise OSError(f"{args.query_file}: {exc.strerror or exc}") from None
        table, report = experiments.query_region(experiments.parse_region_file(text))
        stream = sys.stdout if args.out is not None else sys.stderr
        print("\n".join(report), file=stream)
        _emit(table, args)
        return EXIT_OK
    scenario = _scenario(args)
    if args.out is not None and not args.out.parent.exists():
        raise OSError(f"{args.out}: directory does not exist")
    if args.command == "rate":
        table = experiments.run_rate(scenario, args.workers)
    elif args.command == "exponent":
        table = experiments.run_exponent_sweep(scenario, args.workers)
    elif args.command == "fig2":
        table = experiments.run_fig2(scenario, args.workers)
    elif args.command == "fig3":
        table = experiments.run_fig3(scenario, args.workers, bits=args.bits)
    else:
        table = experiments.run_hardening(scenario, args.workers)
    _emit(table, args)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with np.errstate(over="raise", invalid="raise"):
            return run(args)
    except (ConfigurationError, ValidationError) as exc:
        print(f"mmac: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"mmac: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TrialError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"mmac: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
