"""Run every experiment with its default configuration.

Writes one subdirectory per experiment under the chosen output root and
prints each run's summary. Equivalent to invoking `sim <experiment>` six
times with a shared seed.

Usage:
    python scripts/reproduce_all.py [--out OUT_DIR] [--seed N]
"""

import argparse
from dataclasses import replace
from pathlib import Path

from yflash_tm.config import EXPERIMENTS, default_config
from yflash_tm.experiments import execute


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    for name in EXPERIMENTS:
        cfg = default_config(name)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        out_dir = execute(cfg, args.out / name)
        print(f"=== {name} -> {out_dir}")
        print((out_dir / "summary.txt").read_text())


if __name__ == "__main__":
    main()
