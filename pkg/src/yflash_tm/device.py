"""Phenomenological Y-Flash memristor cell model.

The cell state is a normalized floating-gate charge q in [0, 1]. q = 1 is the
fully erased, high-conductance rail (HCS); q = 0 is the fully programmed,
low-conductance rail (LCS). Conductance follows a log-linear map

    G(q) = g_lcs * (g_hcs / g_lcs) ** q

so equal q steps give equal multiplicative conductance steps, matching the
measured staircase of discrete states across three decades. Forward reads are
linear at the 2 V operating point, I = G * V, with G defined as the 2 V
secant conductance; reverse bias leaks at most a fixed ceiling current, which
is what makes the cell self-selecting in a crossbar.

Pulse-resolution calibration is a pair of anchor tables (pulse width ->
number of steps across the full q range) interpolated log-log, so a 200 us
program pulse moves 1/40 of the range while a 10 us pulse moves 1/1000.
Cycling degradation shrinks the per-pulse step with an accumulating cycle
counter; cycle-to-cycle noise multiplies each step by a lognormal factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

# Average pulse powers in watts. The read figure is carried at full precision
# so that a 5 ns read energy rounds to 9.14e-6 nJ at three significant
# figures while the power itself displays as 1.83 uW.
READ_POWER_W = 1.828e-6
PROGRAM_POWER_W = 695e-6
ERASE_POWER_W = 8e-9

# Voltages at or above this level in read mode would disturb the stored
# charge (program mode starts above 4 V).
PROGRAM_DISTURB_V = 4.0

# Residues closer to a rail than this are snapped onto it, so an exact
# number of nominal steps lands exactly on the rail despite float rounding.
_Q_SNAP = 1e-9


class PulseMode(enum.Enum):
    READ = "read"
    PROGRAM = "program"
    ERASE = "erase"


_MODE_POWER = {
    PulseMode.READ: READ_POWER_W,
    PulseMode.PROGRAM: PROGRAM_POWER_W,
    PulseMode.ERASE: ERASE_POWER_W,
}


class ReadDisturbError(RuntimeError):
    """Raised when a read-mode voltage reaches the program threshold."""


class EnduranceFailure(RuntimeError):
    """Raised when a cell cannot reach its target state within the pulse cap."""


def energy_of_pulse(mode: PulseMode, width: float) -> float:
    """Energy in joules of one pulse: mode average power times width."""
    if width <= 0:
        raise ValueError("pulse width must be positive")
    try:
        return _MODE_POWER[mode] * width
    except KeyError:
        raise ValueError(f"unknown pulse mode {mode!r}") from None


@dataclass(frozen=True)
class PulseResult:
    mode: PulseMode
    width: float
    energy: float
    g_before: float
    g_after: float


def _interp_steps(width: float, anchors: tuple[tuple[float, float], ...]) -> float:
    """Log-log interpolation of steps-per-range through calibration anchors.

    Outside the anchor span the nearest segment's slope is extrapolated.
    With a single anchor, steps scale inversely with width.
    """
    if width <= 0:
        raise ValueError("pulse width must be positive")
    if len(anchors) == 1:
        w0, s0 = anchors[0]
        return max(1.0, s0 * w0 / width)
    lw = math.log(width)
    i = 0
    while i < len(anchors) - 2 and lw > math.log(anchors[i + 1][0]):
        i += 1
    (w0, s0), (w1, s1) = anchors[i], anchors[i + 1]
    slope = (math.log(s1) - math.log(s0)) / (math.log(w1) - math.log(w0))
    return max(1.0, math.exp(math.log(s0) + slope * (lw - math.log(w0))))


@dataclass(frozen=True)
class DeviceParams:
    """Calibration constants for one Y-Flash cell.

    Defaults follow the full-swing characterization figures (HCS 2.5 uS,
    LCS 1 nS). The endurance and variability experiments override the rails
    with their own measured bands; see the experiment default configs.
    """

    g_hcs: float = 2.5e-6
    g_lcs: float = 1.0e-9
    v_read: float = 2.0
    v_program: float = 5.0
    v_erase: float = 8.0
    read_pulse_width: float = 5e-9
    c2c_sigma: float = 0.0
    program_degradation_rate: float = 2.9e-4
    erase_degradation_rate: float = 2.9e-3
    reverse_leak_ceiling: float = 1e-12
    program_step_anchors: tuple[tuple[float, float], ...] = ((10e-6, 1000.0), (200e-6, 40.0))
    erase_step_anchors: tuple[tuple[float, float], ...] = ((10e-6, 1000.0), (200e-6, 32.0))

    def __post_init__(self):
        if not 0 < self.g_lcs < self.g_hcs:
            raise ValueError("need 0 < g_lcs < g_hcs")
        if self.reverse_leak_ceiling <= 0:
            raise ValueError("reverse_leak_ceiling must be positive")
        if self.c2c_sigma < 0:
            raise ValueError("c2c_sigma must be >= 0")
        if self.program_degradation_rate < 0 or self.erase_degradation_rate < 0:
            raise ValueError("degradation rates must be >= 0")
        for anchors in (self.program_step_anchors, self.erase_step_anchors):
            if not anchors:
                raise ValueError("at least one calibration anchor is required")
            widths = [w for w, _ in anchors]
            steps = [s for _, s in anchors]
            if any(w <= 0 for w in widths) or any(s < 1 for s in steps):
                raise ValueError("anchor widths must be positive and steps >= 1")
            if widths != sorted(widths):
                raise ValueError("anchors must be sorted by width")
            if steps != sorted(steps, reverse=True):
                raise ValueError("steps must be non-increasing in width")

    def steps_per_range(self, width: float, mode: PulseMode) -> float:
        """Number of pulses of the given width spanning the full q range."""
        if mode is PulseMode.PROGRAM:
            return _interp_steps(width, self.program_step_anchors)
        if mode is PulseMode.ERASE:
            return _interp_steps(width, self.erase_step_anchors)
        raise ValueError(f"no step calibration for mode {mode!r}")


class YFlashCell:
    """One Y-Flash device instance with its own charge state and RNG stream.

    A cell is mutated by exactly one owner at a time; independent cells carry
    independent generators so population sweeps are schedule-independent.
    Fresh cells sit erased at the HCS rail (q = 1).
    """

    __slots__ = ("params", "q", "cycle_count", "rng", "pulse_log", "read_count")

    def __init__(
        self,
        params: DeviceParams | None = None,
        q: float = 1.0,
        rng: np.random.Generator | int | None = None,
    ):
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        self.params = params if params is not None else DeviceParams()
        self.q = q
        self.cycle_count = 0
        self.rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        self.pulse_log: list[PulseResult] = []
        self.read_count = 0

    def conductance(self) -> float:
        """Noise-free 2 V secant conductance of the stored state."""
        p = self.params
        return p.g_lcs * (p.g_hcs / p.g_lcs) ** self.q

    def read(self, v: float | None = None) -> float:
        """Read current at bias v (default read voltage). Does not change q.

        Forward bias is linear in the stored conductance. Reverse bias leaks
        at most the ceiling (returned as a negative current). Read voltages
        at the program threshold or above are rejected instead of modeling
        an accidental write.
        """
        if v is None:
            v = self.params.v_read
        if v >= PROGRAM_DISTURB_V:
            raise ReadDisturbError(
                f"read at {v} V would disturb the cell (program threshold {PROGRAM_DISTURB_V} V)"
            )
        self.read_count += 1
        if v > 0:
            return self.conductance() * v
        if v == 0:
            return 0.0
        return -self.params.reverse_leak_ceiling

    def _step_size(self, width: float, mode: PulseMode) -> float:
        p = self.params
        steps = p.steps_per_range(width, mode)
        rate = (
            p.program_degradation_rate
            if mode is PulseMode.PROGRAM
            else p.erase_degradation_rate
        )
        dq = (1.0 / steps) / (1.0 + rate * self.cycle_count)
        if p.c2c_sigma > 0:
            dq *= math.exp(self.rng.normal(0.0, p.c2c_sigma))
        return dq

    def program_pulse(self, width: float) -> PulseResult:
        """One program pulse: q moves down, saturating at the LCS rail."""
        g_before = self.conductance()
        old_q = self.q
        q = self.q - self._step_size(width, PulseMode.PROGRAM)
        self.q = 0.0 if q < _Q_SNAP else q
        if old_q > 0.0 and self.q == 0.0:
            # A completed program-to-LCS traversal counts as one cycle.
            self.cycle_count += 1
        result = PulseResult(
            PulseMode.PROGRAM, width, energy_of_pulse(PulseMode.PROGRAM, width),
            g_before, self.conductance(),
        )
        self.pulse_log.append(result)
        return result

    def erase_pulse(self, width: float) -> PulseResult:
        """One erase pulse: q moves up, saturating at the HCS rail."""
        g_before = self.conductance()
        q = self.q + self._step_size(width, PulseMode.ERASE)
        self.q = 1.0 if q > 1.0 - _Q_SNAP else q
        result = PulseResult(
            PulseMode.ERASE, width, energy_of_pulse(PulseMode.ERASE, width),
            g_before, self.conductance(),
        )
        self.pulse_log.append(result)
        return result


def q_for_conductance(params: DeviceParams, g: float) -> float:
    """Invert the state map: the q (clipped to [0, 1]) whose conductance is g."""
    if g <= 0:
        raise ValueError("conductance must be positive")
    q = math.log(g / params.g_lcs) / math.log(params.g_hcs / params.g_lcs)
    return min(1.0, max(0.0, q))


@dataclass(frozen=True)
class PopulationParams:
    """Device-to-device rail statistics for sampling a cell population."""

    lcs_mean: float = 0.92e-9
    lcs_sigma: float = 0.047e-9
    hcs_mean: float = 1.04e-6
    hcs_sigma: float = 0.027e-6

    def __post_init__(self):
        if self.lcs_mean <= 0 or self.hcs_mean <= 0:
            raise ValueError("rail means must be positive")
        if self.lcs_sigma < 0 or self.hcs_sigma < 0:
            raise ValueError("rail sigmas must be >= 0")
        if self.lcs_mean + 4 * self.lcs_sigma >= self.hcs_mean - 4 * self.hcs_sigma:
            raise ValueError("LCS and HCS populations must be 4-sigma separated")


def _truncated_normal(rng: np.random.Generator, mean: float, sigma: float) -> float:
    if sigma == 0:
        return mean
    for _ in range(1000):
        x = rng.normal(mean, sigma)
        if x > 0:
            return x
    raise RuntimeError("truncated normal rejection failed; check population parameters")


def sample_device(
    pop: PopulationParams,
    rng: np.random.Generator,
    base: DeviceParams | None = None,
) -> YFlashCell:
    """Draw one fresh (erased) cell with rails sampled from the population.

    The cell receives its own generator spawned from the sampling stream, so
    later per-cell noise is independent of how many devices were drawn.
    """
    base = base if base is not None else DeviceParams()
    g_lcs = _truncated_normal(rng, pop.lcs_mean, pop.lcs_sigma)
    g_hcs = _truncated_normal(rng, pop.hcs_mean, pop.hcs_sigma)
    params = replace(base, g_lcs=g_lcs, g_hcs=g_hcs)
    return YFlashCell(params=params, q=1.0, rng=rng.spawn(1)[0])


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    lcs_read: float
    hcs_read: float
    t_program: float
    t_erase: float


def cycle_endurance(
    cell: YFlashCell,
    n_cycles: int,
    width: float,
    program_stop_g: float | None = None,
    erase_stop_g: float | None = None,
    pulse_cap: int = 10000,
) -> list[CycleRecord]:
    """Cycle a cell between LCS and HCS, timing each traversal.

    Each cycle programs until the readout current falls to the program stop
    level, then erases until it rises to the erase stop level; stop levels
    default to the cell's own rails. Full traversal time is pulse count times
    width. With rail targets and noise disabled, both times are non-decreasing
    across cycles under the degradation model. A phase that exceeds pulse_cap
    pulses raises EnduranceFailure.
    """
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    p = cell.params
    g_down = program_stop_g if program_stop_g is not None else p.g_lcs
    g_up = erase_stop_g if erase_stop_g is not None else p.g_hcs
    if not p.g_lcs <= g_down < g_up <= p.g_hcs:
        raise ValueError("stop levels must satisfy g_lcs <= program_stop < erase_stop <= g_hcs")
    i_down = g_down * p.v_read * (1.0 + 1e-9)
    i_up = g_up * p.v_read * (1.0 - 1e-9)

    records = []
    for cycle in range(n_cycles):
        n_program = 0
        while cell.read() > i_down:
            cell.program_pulse(width)
            n_program += 1
            if n_program > pulse_cap:
                raise EnduranceFailure(
                    f"cycle {cycle}: no LCS after {pulse_cap} program pulses"
                )
        lcs_read = cell.conductance()
        n_erase = 0
        while cell.read() < i_up:
            cell.erase_pulse(width)
            n_erase += 1
            if n_erase > pulse_cap:
                raise EnduranceFailure(
                    f"cycle {cycle}: no HCS after {pulse_cap} erase pulses"
                )
        records.append(
            CycleRecord(cycle, lcs_read, cell.conductance(), n_program * width, n_erase * width)
        )
    return records
