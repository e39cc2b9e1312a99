#!/usr/bin/env python3
"""
Min-max dynamics analyzer - command-line entry point

Usage:
  python main.py classify --fn composite2d --alpha 0.001 --box -5 5 --format md
  python main.py trace    --fn xy --dyn ogda --alpha 0.1 --start 1 1
  python main.py sweep    --fn composite2d --dyn ogda --samples 10000 --seed 7
  python main.py field    --fn composite2d --grid 50 --alpha 0.001
  python main.py check    --fn f2 --alpha 0.05

--fn takes a builtin (xy, f1, f2, w, composite2d, planted10d[:seed],
bilinear:<rows>) or a path to a function JSON file.

Artifacts go to stdout unless --out is given; diagnostics go to stderr.
Exit codes: 0 success, 1 input error, 2 internal-consistency error,
3 property failure.
"""

import argparse
import os
import sys
from typing import Dict, List, Optional

# Ensure project root is on the Python path
PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from project.src.tool_registry import ToolRegistry
from project.src.utils.env_utils import load_all_env
from project.src.utils.error_utils import EXIT_OK, exit_code_for, print_diagnostic


DEFAULT_FORMATS = {"classify": "md", "trace": "csv", "sweep": "csv", "field": "csv", "check": "md"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Classify and simulate GDA/OGDA dynamics of min-max objectives.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--fn", required=True, help="builtin name or function JSON path")
        p.add_argument("--alpha", type=float, default=0.001, help="step size (default 0.001)")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default: MINMAX_SEED or 0)")
        p.add_argument(
            "--box", type=float, nargs=2, action="append", metavar=("LO", "HI"),
            help="box bounds; once for every axis, or repeated once per axis (default -5 5)",
        )
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json", "md"), default=None)

    p = sub.add_parser("classify", help="find and classify critical points")
    common(p)
    p.add_argument("--seeds", type=int, default=200, help="random Newton starts (default 200)")

    p = sub.add_parser("trace", help="run one trajectory and write it as CSV")
    common(p)
    p.add_argument("--dyn", choices=("gda", "ogda"), default="gda")
    p.add_argument("--start", type=float, nargs="+", required=True, help="x1..xn y1..ym")
    p.add_argument("--max-iters", type=int, default=500_000)
    p.add_argument("--diverge-norm", type=float, default=1e6)

    p = sub.add_parser("sweep", help="Monte Carlo basin sweep and avoidance check")
    common(p)
    p.add_argument("--dyn", choices=("gda", "ogda", "both"), default="gda")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: MINMAX_THREADS or 1)")

    p = sub.add_parser("field", help="export a one-step displacement field (2-D only)")
    common(p)
    p.add_argument("--dyn", choices=("gda", "ogda"), default="gda")
    p.add_argument("--grid", type=int, default=50, help="points per axis (default 50)")

    p = sub.add_parser("check", help="run the numerical property suite")
    common(p)
    p.add_argument("--properties", nargs="+", default=None, help="run only these properties")
    p.add_argument("--suite", default=None, help="property suite YAML (default: workflows/property_checks.yaml)")

    return parser


def _tool_params(args: argparse.Namespace) -> Dict:
    """Maps parsed flags to the parameters of the command's tool."""
    fmt = args.format or DEFAULT_FORMATS[args.command]
    params = {"source": args.fn, "alpha": args.alpha}
    if args.command == "classify":
        params.update(box=args.box, seeds=args.seeds, seed=args.seed, output_format=fmt)
    elif args.command == "trace":
        params.update(
            start=args.start, method=args.dyn, max_iters=args.max_iters, diverge_norm=args.diverge_norm
        )
    elif args.command == "sweep":
        params.update(
            method=args.dyn, samples=args.samples, seed=args.seed, box=args.box,
            max_iters=args.max_iters, threads=args.threads, output_format=fmt,
        )
    elif args.command == "field":
        params.update(grid=args.grid, box=args.box, method=args.dyn, output_format=fmt)
    elif args.command == "check":
        params.update(
            box=args.box, seed=args.seed, properties=args.properties, suite_path=args.suite, output_format=fmt,
        )
    return params


def main(argv: Optional[List[str]] = None) -> int:
    load_all_env()
    args = build_parser().parse_args(argv)
    registry = ToolRegistry()

    print_diagnostic("main", f"running '{args.command}' on {args.fn}")
    result = registry.run_command(args.command, _tool_params(args))

    # property failures still carry their pass/fail table
    if "content" in result:
        saved = registry.execute("save_output", {"content": result["content"], "output_path": args.out})
        if not saved["success"]:
            sys.stderr.write(f"ERROR: {saved['error']}\n")
            return exit_code_for(saved)
        if saved.get("file_path"):
            print_diagnostic("main", f"wrote {saved['file_path']}", always=True)

    if not result["success"]:
        sys.stderr.write(f"ERROR: {result.get('error', 'Unknown error')}\n")
        return exit_code_for(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
