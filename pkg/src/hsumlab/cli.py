"""Command line entry point: ``hsumlab run | cover | plotdata``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ExperimentConfig
from .errors import HsumError, UsageError
from .lab import SUITES, emit_plot_data, run_suite
from .whitney import DEFAULT_DEPTH, OpenIntervalSet, whitney_refine

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsumlab", description="Strong summability verification lab.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run verification suites and write CSV/JSON reports")
    run.add_argument("--config", help="experiment config (JSON)")
    run.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES)}, all")
    run.add_argument("--out", help="output directory (overrides config output_dir)")
    run.add_argument("--seed", type=int, help="seed for randomized corpus members")
    run.add_argument("-q", "--quiet", action="store_true")

    cov = sub.add_parser("cover", help="dump the Whitney-type cover of an open set as JSON lines")
    cov.add_argument("--g", required=True, help='components, e.g. "0,1;2,4"')
    cov.add_argument("--depth", type=int, default=DEFAULT_DEPTH)

    pd = sub.add_parser("plotdata", help="long-format CSV of plottable series from a results directory")
    pd.add_argument("results")
    return ap


def _load_config(args) -> ExperimentConfig:
    d = {}
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(d, dict):
            raise UsageError("config must be a JSON object")
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out:
        d["output_dir"] = args.out
    return ExperimentConfig.from_dict(d)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "run":
            cfg = _load_config(args)
            log = None if args.quiet else (lambda s: print(s, file=sys.stderr))
            code, _ = run_suite(cfg, args.suite, cfg.output_dir, log)
            return code
        if args.command == "cover":
            G = OpenIntervalSet.parse(args.g)
            sys.stdout.write(whitney_refine(G, args.depth).to_jsonl())
            return EXIT_OK
        if args.command == "plotdata":
            sys.stdout.write(emit_plot_data(args.results))
            return EXIT_OK
    except BrokenPipeError:
        return EXIT_OK
    except UsageError as exc:
        print(f"hsumlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HsumError, ValueError) as exc:
        print(f"hsumlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
