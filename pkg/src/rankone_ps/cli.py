"""Command-line interface: ``rankone-ps verify|list-suites|list-symbols``."""

from __future__ import annotations

import argparse
import sys

from .config import SUITES, THREADS_ENV, ConfigError, load_config
from .quantization import SYMBOL_FAMILY
from .report import emit_report
from .suites import SUITE_INFO, run_suite


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankone-ps", description="Numerical verification suites for H2 and H3.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the suites of a YAML config")
    v.add_argument("config", help="path to a YAML suite config")
    v.add_argument("--suite", choices=list(SUITES) + ["all"], help="override the config's suite")
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.add_argument("--out", default="-", help="output path ('-' for stdout)")
    v.add_argument("--parallelism", type=_positive_int,
                   help=f"worker processes (default: config, then ${THREADS_ENV}, then 1)")
    v.add_argument("--no-timestamp", action="store_true",
                   help="omit timestamp and wall time so reports are byte-reproducible")

    sub.add_parser("list-suites", help="print the available suites")
    sub.add_parser("list-symbols", help="print the built-in symbol family")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-suites":
        for name in SUITES:
            print(f"{name:24s} {SUITE_INFO[name]}")
        return 0
    if args.command == "list-symbols":
        for name, desc in SYMBOL_FAMILY.items():
            print(f"{name:14s} {desc}")
        return 0

    try:
        cfg = load_config(args.config, suite_override=args.suite, parallelism=args.parallelism)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(cfg, timestamp=not args.no_timestamp)
    try:
        text = emit_report(report, args.format, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out == "-":
        sys.stdout.write(text)
    s = report.summary()
    print(f"{s['n_pass']}/{s['n_cases']} checks passed; max rel err {s['max_rel_err']}", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
