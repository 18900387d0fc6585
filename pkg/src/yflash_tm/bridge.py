"""Mapping layer between automaton state motion and Y-Flash write pulses.

Each automaton is paired with one cell and a signed divergence counter. State
deltas accumulate in the counter; only when the magnitude reaches the firing
threshold does the cell receive a single blind write pulse (erase when the
automaton drifted toward Include, program when toward Exclude), after which
the counter resets. No read-verify happens between pulses, so write traffic
shrinks by roughly the threshold factor relative to per-step writing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .automata import Action, TransitionEvent, TsetlinAutomaton, TsetlinMachine
from .device import PulseResult, YFlashCell, q_for_conductance

DEFAULT_DC_THRESHOLD = 15
DEFAULT_PULSE_WIDTH = 0.5e-3


@dataclass
class DivergenceCounter:
    """Signed accumulator of automaton state deltas with a firing threshold."""

    threshold: int = DEFAULT_DC_THRESHOLD
    value: int = 0

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")

    def add(self, delta: int) -> int:
        """Accumulate one delta; returns +1/-1 when a pulse should fire, else 0.

        Firing resets the counter to zero, so its magnitude stays below the
        threshold between updates.
        """
        if delta not in (-1, 0, 1):
            raise ValueError(f"delta must be in {{-1, 0, +1}}, got {delta}")
        self.value += delta
        if self.value >= self.threshold:
            self.value = 0
            return 1
        if self.value <= -self.threshold:
            self.value = 0
            return -1
        return 0


@dataclass(frozen=True)
class ActionThreshold:
    """Conductance level splitting readout into Include (at or above) / Exclude."""

    g_mid: float

    @classmethod
    def midpoint(cls, cell: YFlashCell) -> "ActionThreshold":
        p = cell.params
        return cls(g_mid=math.sqrt(p.g_lcs * p.g_hcs))


@dataclass(frozen=True)
class LoggedPulse:
    sample_index: int
    ta_index: int
    result: PulseResult


class MappedAutomaton:
    """One automaton/cell pair joined by a divergence counter."""

    __slots__ = ("ta", "cell", "dc", "pulse_width", "pulse_log")

    def __init__(
        self,
        ta: TsetlinAutomaton,
        cell: YFlashCell,
        dc_threshold: int = DEFAULT_DC_THRESHOLD,
        pulse_width: float = DEFAULT_PULSE_WIDTH,
    ):
        if pulse_width <= 0:
            raise ValueError("pulse_width must be positive")
        self.ta = ta
        self.cell = cell
        self.dc = DivergenceCounter(threshold=dc_threshold)
        self.pulse_width = pulse_width
        self.pulse_log: list[PulseResult] = []

    def update(self, delta: int) -> PulseResult | None:
        """Feed one state delta; fires at most one pulse at the threshold."""
        fire = self.dc.add(delta)
        if fire == 0:
            return None
        if fire > 0:
            result = self.cell.erase_pulse(self.pulse_width)
        else:
            result = self.cell.program_pulse(self.pulse_width)
        self.pulse_log.append(result)
        return result

    def read_action(self, thr: ActionThreshold | None = None) -> Action:
        """Decode the stored action; conductance at g_mid resolves to Include."""
        if thr is None:
            thr = ActionThreshold.midpoint(self.cell)
        return Action.INCLUDE if self.cell.conductance() >= thr.g_mid else Action.EXCLUDE


def build_mapped_automata(
    tm: TsetlinMachine,
    cells: list[YFlashCell],
    dc_threshold: int = DEFAULT_DC_THRESHOLD,
    pulse_width: float = DEFAULT_PULSE_WIDTH,
    g_mid: float | None = None,
) -> list[MappedAutomaton]:
    """Pair every automaton of a machine with a cell seated at the decision level.

    Automata start at the action boundary, so each cell is written to the
    conductance of the Include/Exclude decision threshold (the geometric mean
    of its rails unless overridden) before training begins.
    """
    if len(cells) != len(tm.automata):
        raise ValueError(
            f"need one cell per automaton: {len(cells)} cells for {len(tm.automata)} automata"
        )
    mapped = []
    for ta, cell in zip(tm.automata, cells):
        target = g_mid if g_mid is not None else ActionThreshold.midpoint(cell).g_mid
        cell.q = q_for_conductance(cell.params, target)
        mapped.append(MappedAutomaton(ta, cell, dc_threshold, pulse_width))
    return mapped


@dataclass(frozen=True)
class BridgeTraceEntry:
    """One transition with the counter value and any pulse it triggered."""

    event: TransitionEvent
    dc_value: int
    pulse: PulseResult | None
    g_after: float


@dataclass
class MappedTrainingResult:
    pulse_count: int
    final_conductances: list[float]
    trace: list[BridgeTraceEntry]
    pulses_per_ta: list[int]

    @property
    def transitions(self) -> list[TransitionEvent]:
        return [entry.event for entry in self.trace]

    @property
    def pulses(self) -> list[LoggedPulse]:
        return [
            LoggedPulse(entry.event.sample_index, entry.event.ta_index, entry.pulse)
            for entry in self.trace
            if entry.pulse is not None
        ]


def run_mapped_training(
    tm: TsetlinMachine,
    mapped: list[MappedAutomaton],
    dataset,
) -> MappedTrainingResult:
    """Train the machine while mirroring every state change into the cells.

    The write stream is blind: cells receive pulses but are never read back
    during training (read counters are audited unchanged). Returns the total
    pulse count, end-of-training conductances, and the full per-event trace.
    """
    if not dataset:
        raise ValueError("dataset must be non-empty")
    if len(mapped) != len(tm.automata):
        raise ValueError("need one MappedAutomaton per automaton")
    trace: list[BridgeTraceEntry] = []
    pulses_per_ta = [0] * len(mapped)
    n_pulses = 0
    for i, (x, y) in enumerate(dataset):
        for event in tm.train_step(x, y, sample_index=i):
            m = mapped[event.ta_index]
            result = m.update(event.new_state - event.old_state)
            if result is not None:
                n_pulses += 1
                pulses_per_ta[event.ta_index] += 1
            trace.append(
                BridgeTraceEntry(event, m.dc.value, result, m.cell.conductance())
            )
    return MappedTrainingResult(
        pulse_count=n_pulses,
        final_conductances=[m.cell.conductance() for m in mapped],
        trace=trace,
        pulses_per_ta=pulses_per_ta,
    )


PULSE_LOG_HEADER = [
    "sample_index", "ta_index", "mode", "width_s", "energy_J", "g_before_S", "g_after_S",
]


def export_pulse_log(pulses: list[LoggedPulse], path: Path | str) -> None:
    """Write the training pulse log as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PULSE_LOG_HEADER)
        for p in pulses:
            r = p.result
            writer.writerow([
                p.sample_index, p.ta_index, r.mode.value,
                f"{r.width:.9e}", f"{r.energy:.9e}",
                f"{r.g_before:.9e}", f"{r.g_after:.9e}",
            ])
