"""Selector-free crossbar of Y-Flash cells with an aggregated energy ledger.

The array is behavioral: no nodal solve of line resistances. Reads use a
half-select bias pattern (unselected rows and columns held at 0 V), so every
unselected cell sees zero or reverse bias and contributes at most its reverse
leak ceiling to the sneak current. The ledger accumulates per-mode pulse
counts and energies for all traffic routed through the array.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .device import (
    DeviceParams,
    PulseMode,
    PulseResult,
    YFlashCell,
    energy_of_pulse,
    _MODE_POWER,
)


@dataclass
class EnergyLedger:
    """Per-mode pulse counters and energy accumulators."""

    n_reads: int = 0
    n_programs: int = 0
    n_erases: int = 0
    e_read: float = 0.0
    e_program: float = 0.0
    e_erase: float = 0.0

    def record(self, result: PulseResult) -> None:
        if result.mode is PulseMode.PROGRAM:
            self.n_programs += 1
            self.e_program += result.energy
        elif result.mode is PulseMode.ERASE:
            self.n_erases += 1
            self.e_erase += result.energy
        else:
            raise ValueError(f"unexpected write mode {result.mode!r}")

    def record_read(self, width: float) -> None:
        self.n_reads += 1
        self.e_read += energy_of_pulse(PulseMode.READ, width)

    def report_rows(self) -> list[dict]:
        """One row per mode: pulse count, average power, total and per-pulse energy."""
        rows = []
        for mode, count, total in (
            (PulseMode.READ, self.n_reads, self.e_read),
            (PulseMode.PROGRAM, self.n_programs, self.e_program),
            (PulseMode.ERASE, self.n_erases, self.e_erase),
        ):
            rows.append({
                "mode": mode.value,
                "pulses": count,
                "avg_power_W": _MODE_POWER[mode],
                "total_energy_J": total,
                "per_pulse_energy_J": total / count if count else 0.0,
            })
        return rows

    def format_report(self) -> str:
        lines = [f"{'mode':<10}{'pulses':>8}{'avg power (W)':>16}"
                 f"{'total energy (J)':>20}{'per pulse (J)':>16}"]
        for row in self.report_rows():
            lines.append(
                f"{row['mode']:<10}{row['pulses']:>8}{row['avg_power_W']:>16.3e}"
                f"{row['total_energy_J']:>20.3e}{row['per_pulse_energy_J']:>16.3e}"
            )
        return "\n".join(lines)


SNAPSHOT_HEADER = ["row", "col", "q", "g_at_2V"]


class CrossbarArray:
    """Row-major grid of independently owned cells behind one ledger."""

    def __init__(
        self,
        rows: int,
        cols: int,
        params: DeviceParams | None = None,
        rng: np.random.Generator | int | None = None,
        cells: list[list[YFlashCell]] | None = None,
    ):
        if rows < 1 or cols < 1:
            raise ValueError("array dimensions must be >= 1")
        self.rows = rows
        self.cols = cols
        if cells is not None:
            if len(cells) != rows or any(len(r) != cols for r in cells):
                raise ValueError("cells grid does not match rows x cols")
            self.cells = cells
        else:
            gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
            base = params if params is not None else DeviceParams()
            streams = gen.spawn(rows * cols)
            self.cells = [
                [YFlashCell(params=base, rng=streams[r * cols + c]) for c in range(cols)]
                for r in range(rows)
            ]
        self.ledger = EnergyLedger()

    def cell(self, row: int, col: int) -> YFlashCell:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"address ({row}, {col}) outside {self.rows}x{self.cols} array")
        return self.cells[row][col]

    def read_cell(self, row: int, col: int, v: float | None = None) -> tuple[float, float]:
        """Read one cell; returns (selected current, total sneak current).

        The sneak figure is the worst-case sum of reverse leaks of every
        unselected cell under the half-select pattern; it is an audit value,
        not a disturbance (no unselected cell changes state or is counted as
        read).
        """
        target = self.cell(row, col)
        i_selected = target.read(v)
        self.ledger.record_read(target.params.read_pulse_width)
        i_sneak = 0.0
        for r in range(self.rows):
            for c in range(self.cols):
                if r == row and c == col:
                    continue
                i_sneak += self.cells[r][c].params.reverse_leak_ceiling
        return i_selected, i_sneak

    def program_cell(self, row: int, col: int, width: float) -> PulseResult:
        result = self.cell(row, col).program_pulse(width)
        self.ledger.record(result)
        return result

    def erase_cell(self, row: int, col: int, width: float) -> PulseResult:
        result = self.cell(row, col).erase_pulse(width)
        self.ledger.record(result)
        return result

    def snapshot(self) -> list[tuple[int, int, float, float]]:
        return [
            (r, c, self.cells[r][c].q, self.cells[r][c].conductance())
            for r in range(self.rows)
            for c in range(self.cols)
        ]

    def export_snapshot(self, path: Path | str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(SNAPSHOT_HEADER)
            for r, c, q, g in self.snapshot():
                writer.writerow([r, c, f"{q:.9e}", f"{g:.9e}"])

    def import_snapshot(self, path: Path | str) -> None:
        """Restore cell states from a snapshot CSV written by export_snapshot."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != SNAPSHOT_HEADER:
                raise ValueError(f"unexpected snapshot header {header}")
            seen = set()
            for row in reader:
                r, c, q = int(row[0]), int(row[1]), float(row[2])
                if not 0.0 <= q <= 1.0:
                    raise ValueError(f"snapshot q {q} at ({r}, {c}) outside [0, 1]")
                self.cell(r, c).q = q
                seen.add((r, c))
        if len(seen) != self.rows * self.cols:
            raise ValueError(
                f"snapshot covers {len(seen)} cells, array has {self.rows * self.cols}"
            )
