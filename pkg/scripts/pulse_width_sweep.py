"""Sweep the write pulse width against the divergence-counter threshold.

Wider pulses move the cell further per write (coarser conductance
granularity) while a higher counter threshold fires fewer pulses; the product
of the two controls both write traffic and how faithfully the final
conductance tracks the automaton. This sweep quantifies that trade-off on the
mapped XOR run: pulse counts, per-write energy, and the fraction of
far-from-boundary automata whose stored action decodes correctly.

Usage:
    python scripts/pulse_width_sweep.py [--out sweep.csv] [--seed N] [--repeats K]
"""

import argparse
import csv
from dataclasses import replace
from pathlib import Path

from yflash_tm.config import default_config
from yflash_tm.experiments import run_xor_map

WIDTHS_S = (0.2e-3, 0.5e-3, 1.0e-3, 2.0e-3)
THRESHOLDS = (5, 15, 30, 60)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("pulse_width_sweep.csv"))
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--repeats", type=int, default=5, help="seeds per grid point")
    args = parser.parse_args()

    base = default_config("xor-map")
    seed0 = args.seed if args.seed is not None else base.seed

    rows = []
    for width in WIDTHS_S:
        for threshold in THRESHOLDS:
            pulses, agreements, gated, energy = 0, 0, 0, 0.0
            for k in range(args.repeats):
                cfg = replace(
                    base,
                    seed=seed0 + k,
                    bridge=replace(base.bridge, pulse_width=width, dc_threshold=threshold),
                )
                result = run_xor_map(cfg)
                pulses += result.pulse_count
                a, t = result.gated_agreement()
                agreements += a
                gated += t
                energy += sum(p.result.energy for p in result.training.pulses)
            rows.append({
                "pulse_width_s": width,
                "dc_threshold": threshold,
                "mean_pulses": pulses / args.repeats,
                "mean_write_energy_J": energy / args.repeats,
                "gated_agreement": agreements / gated if gated else 1.0,
            })
            print(
                f"width={width * 1e3:4.1f} ms thr={threshold:3d}: "
                f"pulses={rows[-1]['mean_pulses']:7.1f} "
                f"energy={rows[-1]['mean_write_energy_J']:.3e} J "
                f"agreement={rows[-1]['gated_agreement']:.3f}"
            )

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
