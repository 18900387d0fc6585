"""Command line entry point.

    sim <experiment> [--config FILE] [--seed N] [--out DIR]
    sim print-defaults [experiment]
    sim verify [--skip-slow]

Experiments write CSV artifacts plus summary.txt and resolved_config.txt to
the output directory. `verify` runs the acceptance checks and exits nonzero
if any fails.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import (
    EXPERIMENTS,
    ConfigError,
    apply_overrides,
    default_config,
    format_config,
    load_config,
)
from .experiments import execute


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim", description="Y-Flash / Tsetlin-automaton co-simulation harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, default=None, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", type=Path, default=None, help="output directory")

    p_defaults = sub.add_parser("print-defaults", help="print a default config")
    p_defaults.add_argument("experiment", nargs="?", default="staircase", choices=EXPERIMENTS)

    p_verify = sub.add_parser("verify", help="run the acceptance checks")
    p_verify.add_argument(
        "--skip-slow", action="store_true",
        help="only run the sub-second checks (for a quick smoke test)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "print-defaults":
        print(format_config(default_config(args.experiment)), end="")
        return 0

    if args.command == "verify":
        from .verification import run_checks

        ok = True
        for check in run_checks(skip_slow=args.skip_slow):
            status = "PASS" if check.passed else "FAIL"
            print(f"{status} {check.name}: {check.detail}")
            ok = ok and check.passed
        return 0 if ok else 1

    try:
        if args.config is not None:
            cfg = load_config(args.config, experiment=args.command)
        else:
            cfg = default_config(args.command)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out if args.out is not None else Path("out") / args.command
    execute(cfg, out_dir)
    print(f"wrote {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
