"""Command line front end.

Exit codes: 0 on success, 2 for configuration problems (bad JSON, unknown
keys, unsupported combinations), 3 for runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import runner
from .sets import ConfigurationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lazyoco",
        description="online learners with long-term constraints and untrusted predictions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single run from a JSON config")
    p_run.add_argument("config", help="path to a run config")
    p_run.add_argument("--plot", action="store_true",
                       help="also write an SVG chart next to the trace")

    p_sweep = sub.add_parser("sweep", help="grid of runs over horizons and betas")
    p_sweep.add_argument("config", help="path to a sweep config")

    p_cmp = sub.add_parser("compare", help="align several learners on one scenario")
    p_cmp.add_argument("configs", nargs="+", help="run configs sharing scenario and seed")
    p_cmp.add_argument("-o", "--output", default=None, help="comparison CSV path")

    p_bench = sub.add_parser("bench", help="evaluate only the benchmark point")
    p_bench.add_argument("config", help="path to a run config")
    return parser


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True, indent=1, allow_nan=False))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            _emit(runner.run_command(args.config, plot=args.plot))
        elif args.command == "sweep":
            cfg = runner.parse_sweep_config(runner.load_json(args.config))
            report = runner.sweep(cfg)
            errors = sorted(k for k, v in report["cells"].items() if "error" in v)
            _emit({"cells": len(report["cells"]), "failed_cells": errors,
                   "exponents": report["exponents"]})
            if errors:
                return 3
        elif args.command == "compare":
            configs = [runner.parse_run_config(runner.load_json(p)) for p in args.configs]
            _emit(runner.compare(configs, output_path=args.output))
        elif args.command == "bench":
            _emit(runner.bench(runner.parse_run_config(runner.load_json(args.config))))
        return 0
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
