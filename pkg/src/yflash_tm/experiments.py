"""Experiment runners that reproduce the characterization and mapping runs.

Each runner is a pure compute function returning a result object; `execute`
dispatches by name, writes the canonical CSV artifacts plus a human-readable
summary, and echoes the resolved configuration. Outputs are deterministic for
a fixed config and seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .automata import Action, TsetlinMachine, XOR_POINTS, xor_dataset
from .bridge import (
    ActionThreshold,
    build_mapped_automata,
    export_pulse_log,
    run_mapped_training,
    MappedTrainingResult,
)
from .config import ExperimentConfig, write_config_echo
from .device import (
    CycleRecord,
    PulseMode,
    YFlashCell,
    cycle_endurance,
    energy_of_pulse,
    sample_device,
    _MODE_POWER,
)

_PULSE_SAFETY_CAP = 100000


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return f"{x:.9e}"


# --- staircase -------------------------------------------------------------

STAIRCASE_HEADER = ["pulse_index", "mode", "g_S", "i_read_A"]


@dataclass
class StaircaseResult:
    rows: list[list]
    program_conductances: list[float]
    n_program_pulses: int
    n_erase_pulses: int

    def csv_rows(self) -> list[list]:
        return [[i, m, _fmt(g), _fmt(c)] for i, m, g, c in self.rows]


def run_staircase(cfg: ExperimentConfig) -> StaircaseResult:
    """Program a fresh cell rail to rail, then erase it back, reading each step."""
    ss = np.random.SeedSequence(cfg.seed)
    cell = YFlashCell(params=cfg.device, rng=np.random.default_rng(ss))
    width = cfg.staircase.width

    rows = []
    program_gs = [cell.conductance()]
    rows.append((0, "read", program_gs[0], cell.read()))
    n_program = 0
    while cell.q > 0.0:
        cell.program_pulse(width)
        n_program += 1
        g = cell.conductance()
        program_gs.append(g)
        rows.append((n_program, "program", g, cell.read()))
        if n_program > _PULSE_SAFETY_CAP:
            raise RuntimeError("staircase program phase did not saturate")
    n_erase = 0
    while cell.q < 1.0:
        cell.erase_pulse(width)
        n_erase += 1
        rows.append((n_program + n_erase, "erase", cell.conductance(), cell.read()))
        if n_erase > _PULSE_SAFETY_CAP:
            raise RuntimeError("staircase erase phase did not saturate")
    return StaircaseResult(rows, program_gs, n_program, n_erase)


# --- endurance -------------------------------------------------------------

ENDURANCE_HEADER = ["cycle", "lcs_S", "hcs_S", "t_program_s", "t_erase_s"]


@dataclass
class EnduranceResult:
    records: list[CycleRecord]

    def csv_rows(self) -> list[list]:
        return [
            [r.cycle, _fmt(r.lcs_read), _fmt(r.hcs_read), _fmt(r.t_program), _fmt(r.t_erase)]
            for r in self.records
        ]


def run_endurance(cfg: ExperimentConfig) -> EnduranceResult:
    ss = np.random.SeedSequence(cfg.seed)
    cell = YFlashCell(params=cfg.device, rng=np.random.default_rng(ss))
    records = cycle_endurance(
        cell, cfg.endurance.cycles, cfg.endurance.width, pulse_cap=cfg.endurance.pulse_cap
    )
    return EnduranceResult(records)


# --- device-to-device ------------------------------------------------------

D2D_HEADER = ["device_id", "lcs_S", "hcs_S"]


@dataclass
class D2dResult:
    rows: list[tuple[int, float, float]]

    def csv_rows(self) -> list[list]:
        return [[i, _fmt(l), _fmt(h)] for i, l, h in self.rows]

    def lcs_values(self) -> list[float]:
        return [l for _, l, _ in self.rows]

    def hcs_values(self) -> list[float]:
        return [h for _, _, h in self.rows]

    def summary(self) -> dict:
        lcs = np.array(self.lcs_values())
        hcs = np.array(self.hcs_values())
        return {
            "n_devices": len(self.rows),
            "lcs_mean_S": float(lcs.mean()),
            "lcs_std_S": float(lcs.std(ddof=1)) if len(lcs) > 1 else 0.0,
            "lcs_min_S": float(lcs.min()),
            "lcs_max_S": float(lcs.max()),
            "hcs_mean_S": float(hcs.mean()),
            "hcs_std_S": float(hcs.std(ddof=1)) if len(hcs) > 1 else 0.0,
            "hcs_min_S": float(hcs.min()),
            "hcs_max_S": float(hcs.max()),
        }


def run_d2d(cfg: ExperimentConfig) -> D2dResult:
    """Sample a device population and measure each device's rails by cycling it."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    rows = []
    for device_id in range(cfg.d2d.n_devices):
        cell = sample_device(cfg.population, rng, base=cfg.device)
        record = cycle_endurance(cell, 1, cfg.d2d.width)[0]
        rows.append((device_id, record.lcs_read, record.hcs_read))
    return D2dResult(rows)


# --- mapped XOR ------------------------------------------------------------

XOR_MAP_HEADER = ["sample_index", "ta_index", "ta_state", "dc_value", "pulse_issued", "g_S"]


@dataclass
class XorMapResult:
    training: MappedTrainingResult
    event_rows: list[list]
    final_states: list[int]
    final_conductances: list[float]
    software_actions: list[Action]
    mapped_actions: list[Action]
    accuracy: float
    n_half: int
    dc_threshold: int
    n_tracked: int
    reads_during_training: int

    @property
    def n_transitions(self) -> int:
        return len(self.training.transitions)

    @property
    def pulse_count(self) -> int:
        return self.training.pulse_count

    def tracked_pulse_count(self) -> int:
        return sum(self.training.pulses_per_ta[: self.n_tracked])

    def gated_agreement(self) -> tuple[int, int]:
        """(agreeing, total) over automata ending >= threshold states off boundary."""
        agree = total = 0
        for state, soft, hard in zip(
            self.final_states, self.software_actions, self.mapped_actions
        ):
            if state >= self.n_half + self.dc_threshold or state <= self.n_half - self.dc_threshold:
                total += 1
                agree += soft is hard
        return agree, total

    def included_g_max(self) -> float | None:
        gs = [g for g, a in zip(self.final_conductances, self.software_actions)
              if a is Action.INCLUDE]
        return max(gs) if gs else None

    def excluded_g_min(self) -> float | None:
        gs = [g for g, a in zip(self.final_conductances, self.software_actions)
              if a is Action.EXCLUDE]
        return min(gs) if gs else None

    def csv_rows(self) -> list[list]:
        return self.event_rows


def run_xor_map(cfg: ExperimentConfig) -> XorMapResult:
    """Train on XOR with every automaton mirrored into a Y-Flash cell."""
    ss = np.random.SeedSequence(cfg.seed)
    tm_ss, data_ss, cells_ss = ss.spawn(3)
    tm = TsetlinMachine(
        n_features=cfg.tm.n_features,
        n_clauses=cfg.tm.n_clauses,
        threshold_t=cfg.tm.threshold_t,
        specificity_s=cfg.tm.specificity_s,
        n_half=cfg.tm.n_half,
        rng=np.random.default_rng(tm_ss),
    )
    n_tas = len(tm.automata)
    cell_streams = cells_ss.spawn(n_tas)
    cells = [YFlashCell(params=cfg.device, rng=np.random.default_rng(s)) for s in cell_streams]
    g_mid = cfg.bridge.g_mid if cfg.bridge.g_mid > 0 else None
    mapped = build_mapped_automata(
        tm, cells, cfg.bridge.dc_threshold, cfg.bridge.pulse_width, g_mid
    )
    dataset = xor_dataset(cfg.xor.n_samples, np.random.default_rng(data_ss))

    reads_before = sum(cell.read_count for cell in cells)
    training = run_mapped_training(tm, mapped, dataset)
    reads_during = sum(cell.read_count for cell in cells) - reads_before

    event_rows = [
        [
            entry.event.sample_index,
            entry.event.ta_index,
            entry.event.new_state,
            entry.dc_value,
            entry.pulse.mode.value if entry.pulse is not None else "",
            _fmt(entry.g_after),
        ]
        for entry in training.trace
    ]

    thr = ActionThreshold(g_mid) if g_mid is not None else None
    software_actions = [ta.action for ta in tm.automata]
    mapped_actions = [m.read_action(thr) for m in mapped]
    return XorMapResult(
        training=training,
        event_rows=event_rows,
        final_states=[ta.state for ta in tm.automata],
        final_conductances=training.final_conductances,
        software_actions=software_actions,
        mapped_actions=mapped_actions,
        accuracy=tm.accuracy(XOR_POINTS),
        n_half=cfg.tm.n_half,
        dc_threshold=cfg.bridge.dc_threshold,
        n_tracked=min(cfg.xor.n_tracked, n_tas),
        reads_during_training=reads_during,
    )


# --- software-only training ------------------------------------------------

TRAIN_HEADER = ["sample_index", "ta_index", "old_state", "new_state"]


@dataclass
class TrainResult:
    transitions: list
    final_states: list[int]
    accuracy: float

    def csv_rows(self) -> list[list]:
        return [[e.sample_index, e.ta_index, e.old_state, e.new_state] for e in self.transitions]


def run_train(cfg: ExperimentConfig) -> TrainResult:
    """Software-only oracle run: train the machine on XOR, no device attached."""
    ss = np.random.SeedSequence(cfg.seed)
    tm_ss, data_ss, _ = ss.spawn(3)
    tm = TsetlinMachine(
        n_features=cfg.tm.n_features,
        n_clauses=cfg.tm.n_clauses,
        threshold_t=cfg.tm.threshold_t,
        specificity_s=cfg.tm.specificity_s,
        n_half=cfg.tm.n_half,
        rng=np.random.default_rng(tm_ss),
    )
    events = tm.fit(xor_dataset(cfg.xor.n_samples, np.random.default_rng(data_ss)))
    return TrainResult(events, [ta.state for ta in tm.automata], tm.accuracy(XOR_POINTS))


# --- energy table ----------------------------------------------------------

ENERGY_HEADER = ["mode", "voltage_V", "n_states", "avg_power_uW", "avg_energy_nJ"]


@dataclass
class EnergyResult:
    rows: list[tuple[str, float, int, float, float]]

    def csv_rows(self) -> list[list]:
        return [[m, f"{v:g}", n, _fmt(p), _fmt(e)] for m, v, n, p, e in self.rows]

    def format_table(self) -> str:
        lines = [f"{'mode':<10}{'voltage (V)':>12}{'states':>8}"
                 f"{'avg power (uW)':>16}{'avg energy (nJ)':>17}"]
        for m, v, n, p, e in self.rows:
            lines.append(f"{m:<10}{v:>12g}{n:>8}{p:>16.3g}{e:>17.3g}")
        return "\n".join(lines)


def run_energy(cfg: ExperimentConfig) -> EnergyResult:
    """Recompute the per-mode power/energy table from the pulse constants."""
    dev = cfg.device
    width = cfg.staircase.width
    n_program = round(dev.steps_per_range(width, PulseMode.PROGRAM))
    n_erase = round(dev.steps_per_range(width, PulseMode.ERASE))
    rows = []
    for mode, voltage, n_states, pulse_width in (
        (PulseMode.READ, dev.v_read, n_program, dev.read_pulse_width),
        (PulseMode.PROGRAM, dev.v_program, n_program, width),
        (PulseMode.ERASE, dev.v_erase, n_erase, width),
    ):
        rows.append((
            mode.value,
            voltage,
            n_states,
            _MODE_POWER[mode] * 1e6,
            energy_of_pulse(mode, pulse_width) * 1e9,
        ))
    return EnergyResult(rows)


# --- dispatch and persistence ----------------------------------------------

def execute(cfg: ExperimentConfig, out_dir: Path | str) -> Path:
    """Run the configured experiment and write its artifacts; returns out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config_echo(cfg, out)
    summary_lines = [f"experiment = {cfg.experiment}", f"seed = {cfg.seed}"]

    if cfg.experiment == "staircase":
        result = run_staircase(cfg)
        _write_csv(out / "staircase.csv", STAIRCASE_HEADER, result.csv_rows())
        distinct = len(set(result.program_conductances))
        summary_lines += [
            f"program_pulses = {result.n_program_pulses}",
            f"program_side_states = {distinct}",
            f"erase_pulses = {result.n_erase_pulses}",
            f"g_first_S = {result.program_conductances[0]:.3e}",
            f"g_last_S = {result.program_conductances[-1]:.3e}",
        ]
    elif cfg.experiment == "endurance":
        result = run_endurance(cfg)
        _write_csv(out / "endurance.csv", ENDURANCE_HEADER, result.csv_rows())
        tp = [r.t_program for r in result.records]
        te = [r.t_erase for r in result.records]
        summary_lines += [
            f"cycles = {len(result.records)}",
            f"max_t_program_s = {max(tp):.4e}",
            f"max_t_erase_s = {max(te):.4e}",
            f"t_program_nondecreasing = {all(a <= b for a, b in zip(tp, tp[1:]))}",
            f"t_erase_nondecreasing = {all(a <= b for a, b in zip(te, te[1:]))}",
        ]
    elif cfg.experiment == "d2d":
        result = run_d2d(cfg)
        _write_csv(out / "d2d.csv", D2D_HEADER, result.csv_rows())
        summary_lines += [f"{k} = {v:.6e}" if isinstance(v, float) else f"{k} = {v}"
                          for k, v in result.summary().items()]
    elif cfg.experiment == "xor-map":
        result = run_xor_map(cfg)
        _write_csv(out / "xor_map.csv", XOR_MAP_HEADER, result.csv_rows())
        export_pulse_log(result.training.pulses, out / "pulses.csv")
        agree, total = result.gated_agreement()
        g_inc = result.included_g_max()
        g_exc = result.excluded_g_min()
        summary_lines += [
            f"samples = {cfg.xor.n_samples}",
            f"xor_accuracy = {result.accuracy:.2f}",
            f"transitions = {result.n_transitions}",
            f"pulses_total = {result.pulse_count}",
            f"pulses_tracked_first_{result.n_tracked} = {result.tracked_pulse_count()}",
            f"reduction_factor = {result.n_transitions / result.pulse_count:.1f}"
            if result.pulse_count else "reduction_factor = inf",
            f"pulses_per_ta = {result.training.pulses_per_ta}",
            f"reads_during_training = {result.reads_during_training}",
            f"gated_action_agreement = {agree}/{total}",
            f"max_included_g_S = {g_inc:.3e}" if g_inc is not None else "max_included_g_S = n/a",
            f"min_excluded_g_S = {g_exc:.3e}" if g_exc is not None else "min_excluded_g_S = n/a",
        ]
    elif cfg.experiment == "train":
        result = run_train(cfg)
        _write_csv(out / "train_transitions.csv", TRAIN_HEADER, result.csv_rows())
        summary_lines += [
            f"samples = {cfg.xor.n_samples}",
            f"xor_accuracy = {result.accuracy:.2f}",
            f"transitions = {len(result.transitions)}",
        ]
    elif cfg.experiment == "energy":
        result = run_energy(cfg)
        _write_csv(out / "energy.csv", ENERGY_HEADER, result.csv_rows())
        summary_lines.append(result.format_table())
    else:  # pragma: no cover - ExperimentConfig already validates
        raise ValueError(f"unknown experiment {cfg.experiment!r}")

    (out / "summary.txt").write_text("\n".join(summary_lines) + "\n")
    return out
