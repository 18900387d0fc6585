"""Acceptance checks exercised by both `sim verify` and the test suite.

Each check returns a CheckResult with a pass flag and a one-line detail
string. Statistical checks run over fixed seed ranges so the verdicts are
deterministic. Stated runtime budgets are part of the checks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .automata import Feedback, TsetlinAutomaton
from .bridge import DivergenceCounter, MappedAutomaton
from .config import default_config
from .crossbar import CrossbarArray
from .device import DeviceParams, PulseMode, YFlashCell, energy_of_pulse
from .experiments import (
    run_d2d,
    run_endurance,
    run_energy,
    run_staircase,
    run_train,
    run_xor_map,
)

N_PROPERTY_TRIALS = 10000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    runtime_s: float


def _result(name: str, passed: bool, detail: str, t0: float) -> CheckResult:
    return CheckResult(name, passed, detail, time.perf_counter() - t0)


def _sig3(x: float) -> str:
    return f"{x:.3g}"


def check_staircase_states() -> CheckResult:
    """41 program-side states in 40 pulses, monotone, rail endpoints."""
    t0 = time.perf_counter()
    result = run_staircase(default_config("staircase"))
    gs = result.program_conductances
    monotone = all(a > b for a, b in zip(gs, gs[1:]))
    distinct = len(set(gs))
    endpoints = abs(gs[0] - 2.5e-6) <= 0.1 * 2.5e-6 and abs(gs[-1] - 1e-9) <= 0.1 * 1e-9
    runtime = time.perf_counter() - t0
    passed = (
        result.n_program_pulses == 40
        and distinct == 41
        and monotone
        and endpoints
        and runtime < 1.0
    )
    return _result(
        "staircase-states", passed,
        f"{result.n_program_pulses} pulses, {distinct} states, monotone={monotone}, "
        f"endpoints {gs[0]:.3e}->{gs[-1]:.3e} S, {runtime:.2f}s", t0,
    )


def check_resolution_scaling() -> CheckResult:
    """A 10 us pulse width resolves at least 1000 distinct states."""
    t0 = time.perf_counter()
    cfg = default_config("staircase")
    cfg = replace(cfg, staircase=replace(cfg.staircase, width=10e-6))
    result = run_staircase(cfg)
    distinct = len(set(result.program_conductances))
    runtime = time.perf_counter() - t0
    passed = distinct >= 1000 and runtime < 5.0
    return _result(
        "resolution-scaling", passed,
        f"{distinct} distinct states at 10 us, {runtime:.2f}s", t0,
    )


def check_energy_table() -> CheckResult:
    """Recomputed energy table matches the published values at 3 significant figures."""
    t0 = time.perf_counter()
    rows = {m: (p, e) for m, _, _, p, e in run_energy(default_config("energy")).rows}
    targets_nj = {"read": 9.14e-6, "program": 139.0, "erase": 1.6e-3}
    failures = []
    for mode, target in targets_nj.items():
        got = rows[mode][1]
        if _sig3(got) != _sig3(target):
            failures.append(f"{mode}: {got!r} != {target!r}")
    passed = not failures
    detail = "read/program/erase = " + ", ".join(
        f"{_sig3(rows[m][1])} nJ" for m in ("read", "program", "erase")
    )
    if failures:
        detail += "; " + "; ".join(failures)
    return _result("energy-table", passed, detail, t0)


def check_endurance() -> CheckResult:
    """250-cycle run: time maxima, monotonicity, and rail read envelopes."""
    t0 = time.perf_counter()
    result = run_endurance(default_config("endurance"))
    tp = [r.t_program for r in result.records]
    te = [r.t_erase for r in result.records]
    lcs = [r.lcs_read for r in result.records]
    hcs = [r.hcs_read for r in result.records]
    runtime = time.perf_counter() - t0
    conds = {
        "max_tp": max(tp) <= 8.6e-3,
        "max_te": max(te) <= 11.2e-3,
        "tp_mono": all(a <= b for a, b in zip(tp, tp[1:])),
        "te_mono": all(a <= b for a, b in zip(te, te[1:])),
        "lcs_band": all(0.77e-9 <= g <= 0.99e-9 for g in lcs),
        "hcs_band": all(1.0e-6 <= g <= 1.13e-6 for g in hcs),
        "runtime": runtime < 30.0,
    }
    passed = all(conds.values())
    bad = [k for k, v in conds.items() if not v]
    return _result(
        "endurance", passed,
        f"max t_program={max(tp) * 1e3:.2f} ms, max t_erase={max(te) * 1e3:.2f} ms, "
        f"{len(result.records)} cycles, {runtime:.2f}s"
        + (f"; failed: {bad}" if bad else ""), t0,
    )


def check_d2d_statistics(n_meta_seeds: int = 100) -> CheckResult:
    """Sample means of 100-device populations stay within 3 standard errors."""
    t0 = time.perf_counter()
    ok = 0
    for meta_seed in range(n_meta_seeds):
        cfg = replace(default_config("d2d"), seed=1000 + meta_seed)
        stats = run_d2d(cfg).summary()
        lcs_ok = abs(stats["lcs_mean_S"] - 0.92e-9) <= 0.015e-9
        hcs_ok = abs(stats["hcs_mean_S"] - 1.04e-6) <= 0.009e-6
        ok += lcs_ok and hcs_ok
    runtime = time.perf_counter() - t0
    passed = ok >= 95 and runtime < 60.0
    return _result(
        "d2d-statistics", passed,
        f"{ok}/{n_meta_seeds} meta-seeds within 3 SE, {runtime:.1f}s", t0,
    )


def check_xor_learning(n_seeds: int = 100) -> CheckResult:
    """Software-only machines reach exact XOR on >= 95 of 100 seeds."""
    t0 = time.perf_counter()
    base = default_config("train")
    fixed = run_train(base)
    fixed_ok = fixed.accuracy == 1.0
    wins = 0
    slowest = 0.0
    for seed in range(n_seeds):
        t_seed = time.perf_counter()
        result = run_train(replace(base, seed=seed))
        slowest = max(slowest, time.perf_counter() - t_seed)
        wins += result.accuracy == 1.0
    passed = fixed_ok and wins >= 95 and slowest < 10.0
    return _result(
        "xor-learning", passed,
        f"default seed acc={fixed.accuracy:.2f}, {wins}/{n_seeds} seeds at 100%, "
        f"slowest seed {slowest:.2f}s", t0,
    )


def check_write_traffic() -> CheckResult:
    """Pulse budget, degenerate threshold, and the tracked-pulse band."""
    t0 = time.perf_counter()
    cfg = default_config("xor-map")
    mapped = run_xor_map(cfg)
    budget_ok = mapped.pulse_count <= mapped.n_transitions / 10
    tracked = mapped.tracked_pulse_count()
    band_ok = 10 <= tracked <= 40

    degenerate_cfg = replace(cfg, bridge=replace(cfg.bridge, dc_threshold=1))
    degenerate = run_xor_map(degenerate_cfg)
    degenerate_ok = degenerate.pulse_count == degenerate.n_transitions

    passed = budget_ok and band_ok and degenerate_ok
    return _result(
        "write-traffic", passed,
        f"pulses={mapped.pulse_count} vs transitions={mapped.n_transitions} "
        f"(budget<=1/10: {budget_ok}), tracked-8={tracked} in [10,40]: {band_ok}, "
        f"threshold-1 pulses==transitions: {degenerate_ok}", t0,
    )


def check_oracle_agreement(n_seeds: int = 100) -> CheckResult:
    """Cells decode the software action for every automaton far from the boundary."""
    t0 = time.perf_counter()
    base = default_config("xor-map")
    ok = 0
    gated_total = 0
    for seed in range(n_seeds):
        result = run_xor_map(replace(base, seed=seed))
        agree, total = result.gated_agreement()
        gated_total += total
        ok += agree == total
    runtime = time.perf_counter() - t0
    passed = ok >= 90
    return _result(
        "oracle-agreement", passed,
        f"{ok}/{n_seeds} seeds fully agree ({gated_total} gated automata), {runtime:.1f}s", t0,
    )


# --- randomized property suites ---------------------------------------------


def _property_ta_bounds(rng: np.random.Generator) -> str | None:
    ta = TsetlinAutomaton(n_half=int(rng.integers(1, 20)))
    hi = 2 * ta.n_half
    for _ in range(N_PROPERTY_TRIALS):
        ta.step(Feedback.REWARD if rng.random() < 0.5 else Feedback.PENALTY)
        if not 1 <= ta.state <= hi:
            return f"state {ta.state} escaped [1, {hi}]"
    return None


def _property_dc_reset(rng: np.random.Generator) -> str | None:
    dc = DivergenceCounter(threshold=int(rng.integers(1, 30)))
    for _ in range(N_PROPERTY_TRIALS):
        fired = dc.add(int(rng.integers(-1, 2)))
        if fired and dc.value != 0:
            return f"counter {dc.value} after fire"
        if abs(dc.value) >= dc.threshold:
            return f"counter magnitude {dc.value} >= threshold {dc.threshold}"
    return None


def _property_pulse_direction(rng: np.random.Generator) -> str | None:
    cell = YFlashCell(q=0.5, rng=rng.spawn(1)[0])
    ta = TsetlinAutomaton()
    m = MappedAutomaton(ta, cell, dc_threshold=15, pulse_width=0.5e-3)
    shadow = 0
    for _ in range(N_PROPERTY_TRIALS):
        delta = int(rng.integers(-1, 2))
        shadow += delta
        pulse = m.update(delta)
        if pulse is not None:
            if shadow >= 15 and pulse.mode is not PulseMode.ERASE:
                return f"dc {shadow} fired {pulse.mode.value}"
            if shadow <= -15 and pulse.mode is not PulseMode.PROGRAM:
                return f"dc {shadow} fired {pulse.mode.value}"
            if abs(shadow) < 15:
                return f"fired below threshold at dc {shadow}"
            shadow = 0
    return None


def _property_q_bounds(rng: np.random.Generator) -> str | None:
    params = DeviceParams(c2c_sigma=0.1)
    cell = YFlashCell(params=params, q=0.5, rng=rng.spawn(1)[0])
    widths = (10e-6, 200e-6, 0.5e-3, 2e-3)
    for _ in range(N_PROPERTY_TRIALS):
        width = widths[rng.integers(0, len(widths))]
        if rng.random() < 0.5:
            cell.program_pulse(width)
        else:
            cell.erase_pulse(width)
        if not 0.0 <= cell.q <= 1.0:
            return f"q {cell.q} escaped [0, 1]"
    return None


def _property_read_isolation(rng: np.random.Generator) -> str | None:
    cell = YFlashCell(rng=rng.spawn(1)[0])
    for _ in range(N_PROPERTY_TRIALS):
        cell.q = float(rng.random())
        before = cell.q
        v = float(rng.uniform(-3.0, 3.0))
        i = cell.read(v)
        if cell.q != before:
            return f"read at {v} V changed q"
        if v < 0 and abs(i) > cell.params.reverse_leak_ceiling:
            return f"reverse leak {i} above ceiling"
    return None


def _property_ledger_conservation(rng: np.random.Generator) -> str | None:
    arr = CrossbarArray(4, 4, rng=rng.spawn(1)[0])
    for _ in range(N_PROPERTY_TRIALS):
        r = int(rng.integers(0, 4))
        c = int(rng.integers(0, 4))
        op = rng.random()
        if op < 0.4:
            arr.read_cell(r, c)
        elif op < 0.7:
            arr.program_cell(r, c, 200e-6)
        else:
            arr.erase_cell(r, c, 200e-6)
    logs = [p for row in arr.cells for cell in row for p in cell.pulse_log]
    n_p = sum(p.mode is PulseMode.PROGRAM for p in logs)
    n_e = sum(p.mode is PulseMode.ERASE for p in logs)
    e_p = sum(p.energy for p in logs if p.mode is PulseMode.PROGRAM)
    e_e = sum(p.energy for p in logs if p.mode is PulseMode.ERASE)
    n_r = sum(cell.read_count for row in arr.cells for cell in row)
    led = arr.ledger
    if (led.n_programs, led.n_erases, led.n_reads) != (n_p, n_e, n_r):
        return f"counts ledger={led.n_programs, led.n_erases, led.n_reads} cells={n_p, n_e, n_r}"
    if not (math.isclose(led.e_program, e_p, rel_tol=1e-12)
            and math.isclose(led.e_erase, e_e, rel_tol=1e-12)):
        return "energy accumulators diverge from cell logs"
    expected_read = n_r * energy_of_pulse(PulseMode.READ, arr.cells[0][0].params.read_pulse_width)
    if not math.isclose(led.e_read, expected_read, rel_tol=1e-12):
        return "read energy diverges"
    return None


def _property_sneak_bound(rng: np.random.Generator) -> str | None:
    arr = CrossbarArray(4, 4, rng=rng.spawn(1)[0])
    bound = (4 * 4 - 1) * 1e-12
    for _ in range(N_PROPERTY_TRIALS):
        r = int(rng.integers(0, 4))
        c = int(rng.integers(0, 4))
        arr.cell(r, c).q = float(rng.random())
        _, sneak = arr.read_cell(r, c)
        if sneak > bound:
            return f"sneak {sneak} above {bound}"
    return None


_PROPERTY_SUITES = [
    ("ta-state-bounds", _property_ta_bounds),
    ("dc-reset-after-fire", _property_dc_reset),
    ("pulse-direction", _property_pulse_direction),
    ("q-bounds", _property_q_bounds),
    ("read-isolation", _property_read_isolation),
    ("ledger-conservation", _property_ledger_conservation),
    ("sneak-bound", _property_sneak_bound),
]


def check_property_suites() -> CheckResult:
    """Seven randomized invariants, 10,000 trials each."""
    t0 = time.perf_counter()
    failures = []
    for index, (name, suite) in enumerate(_PROPERTY_SUITES):
        error = suite(np.random.default_rng(np.random.SeedSequence([4242, index])))
        if error:
            failures.append(f"{name}: {error}")
    passed = not failures
    detail = (
        f"{len(_PROPERTY_SUITES)} suites x {N_PROPERTY_TRIALS} trials"
        + ("" if passed else "; " + "; ".join(failures))
    )
    return _result("property-suites", passed, detail, t0)


FAST_CHECKS = [
    check_staircase_states,
    check_resolution_scaling,
    check_energy_table,
    check_endurance,
    check_write_traffic,
]

SLOW_CHECKS = [
    check_d2d_statistics,
    check_xor_learning,
    check_oracle_agreement,
    check_property_suites,
]

ALL_CHECKS = [
    check_staircase_states,
    check_resolution_scaling,
    check_energy_table,
    check_endurance,
    check_d2d_statistics,
    check_xor_learning,
    check_write_traffic,
    check_oracle_agreement,
    check_property_suites,
]


def run_checks(skip_slow: bool = False) -> list[CheckResult]:
    checks = FAST_CHECKS if skip_slow else ALL_CHECKS
    return [check() for check in checks]
