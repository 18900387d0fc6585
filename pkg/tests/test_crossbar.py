import numpy as np
import pytest

from yflash_tm.crossbar import CrossbarArray, EnergyLedger
from yflash_tm.device import DeviceParams, PulseMode, PulseResult, energy_of_pulse


class TestArrayRead:
    def test_single_cell_array(self):
        arr = CrossbarArray(1, 1, rng=0)
        i_sel, i_sneak = arr.read_cell(0, 0)
        assert i_sel == pytest.approx(5e-6)
        assert i_sneak == 0.0

    def test_sneak_bound_16x16(self):
        arr = CrossbarArray(16, 16, rng=0)
        i_sel, i_sneak = arr.read_cell(3, 7)
        assert i_sneak <= 255 * 1e-12
        # Margin against the worst-case selected read (an LCS cell at 2 V).
        arr.cell(3, 7).q = 0.0
        i_sel, i_sneak = arr.read_cell(3, 7)
        assert i_sel == pytest.approx(2e-9)
        assert i_sel / i_sneak > 5

    def test_read_changes_no_state(self):
        arr = CrossbarArray(4, 4, rng=1)
        states = [[arr.cell(r, c).q for c in range(4)] for r in range(4)]
        for r in range(4):
            for c in range(4):
                arr.read_cell(r, c)
        assert states == [[arr.cell(r, c).q for c in range(4)] for r in range(4)]

    def test_out_of_bounds(self):
        arr = CrossbarArray(2, 3, rng=0)
        with pytest.raises(IndexError):
            arr.read_cell(2, 0)
        with pytest.raises(IndexError):
            arr.read_cell(0, 3)
        with pytest.raises(IndexError):
            arr.read_cell(-1, 0)


class TestAddressIsolation:
    def test_program_touches_only_target(self):
        arr = CrossbarArray(3, 3, rng=2)
        before = {(r, c): arr.cell(r, c).q for r in range(3) for c in range(3)}
        arr.program_cell(1, 2, 200e-6)
        for (r, c), q in before.items():
            if (r, c) == (1, 2):
                assert arr.cell(r, c).q < q
            else:
                assert arr.cell(r, c).q == q


class TestLedger:
    def test_forty_program_pulses(self):
        arr = CrossbarArray(1, 1, rng=0)
        for _ in range(40):
            arr.program_cell(0, 0, 200e-6)
        rows = {r["mode"]: r for r in arr.ledger.report_rows()}
        assert rows["program"]["pulses"] == 40
        assert rows["program"]["total_energy_J"] == pytest.approx(5.56e-6)
        assert rows["program"]["per_pulse_energy_J"] == pytest.approx(139e-9)

    def test_thirty_two_erase_pulses(self):
        arr = CrossbarArray(1, 1, rng=0)
        arr.cell(0, 0).q = 0.0
        for _ in range(32):
            arr.erase_cell(0, 0, 200e-6)
        rows = {r["mode"]: r for r in arr.ledger.report_rows()}
        assert rows["erase"]["total_energy_J"] == pytest.approx(32 * 1.6e-12)

    def test_empty_ledger_reports_zeros(self):
        rows = EnergyLedger().report_rows()
        assert all(r["pulses"] == 0 for r in rows)
        assert all(r["total_energy_J"] == 0.0 for r in rows)
        assert all(r["per_pulse_energy_J"] == 0.0 for r in rows)

    def test_conservation_against_cell_logs(self):
        arr = CrossbarArray(3, 3, rng=4)
        rng = np.random.default_rng(0)
        for _ in range(500):
            r, c = int(rng.integers(0, 3)), int(rng.integers(0, 3))
            roll = rng.random()
            if roll < 0.3:
                arr.read_cell(r, c)
            elif roll < 0.7:
                arr.program_cell(r, c, 200e-6)
            else:
                arr.erase_cell(r, c, 200e-6)
        logs = [p for row in arr.cells for cell in row for p in cell.pulse_log]
        assert arr.ledger.n_programs == sum(p.mode is PulseMode.PROGRAM for p in logs)
        assert arr.ledger.n_erases == sum(p.mode is PulseMode.ERASE for p in logs)
        assert arr.ledger.n_reads == sum(cell.read_count for row in arr.cells for cell in row)
        assert arr.ledger.e_program == pytest.approx(
            sum(p.energy for p in logs if p.mode is PulseMode.PROGRAM)
        )

    def test_read_energy_accumulates(self):
        ledger = EnergyLedger()
        ledger.record_read(5e-9)
        assert ledger.e_read == pytest.approx(energy_of_pulse(PulseMode.READ, 5e-9))

    def test_ledger_rejects_read_results(self):
        ledger = EnergyLedger()
        bogus = PulseResult(PulseMode.READ, 5e-9, 0.0, 1e-9, 1e-9)
        with pytest.raises(ValueError):
            ledger.record(bogus)

    def test_format_report_lines(self):
        report = EnergyLedger().format_report()
        assert report.count("\n") == 3


class TestSnapshot:
    def test_round_trip(self, tmp_path):
        arr = CrossbarArray(2, 2, rng=7)
        arr.program_cell(0, 1, 200e-6)
        arr.program_cell(1, 0, 200e-6)
        arr.program_cell(1, 0, 200e-6)
        path = tmp_path / "snap.csv"
        arr.export_snapshot(path)

        restored = CrossbarArray(2, 2, rng=8)
        restored.import_snapshot(path)
        for r in range(2):
            for c in range(2):
                assert restored.cell(r, c).q == arr.cell(r, c).q

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError):
            CrossbarArray(1, 1, rng=0).import_snapshot(path)

    def test_incomplete_snapshot_rejected(self, tmp_path):
        arr = CrossbarArray(2, 2, rng=0)
        path = tmp_path / "snap.csv"
        arr.export_snapshot(path)
        with pytest.raises(ValueError):
            CrossbarArray(2, 3, rng=0).import_snapshot(path)


class TestConstruction:
    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            CrossbarArray(0, 4)

    def test_custom_params(self):
        params = DeviceParams(g_hcs=1e-6, g_lcs=1e-10)
        arr = CrossbarArray(2, 2, params=params, rng=0)
        assert arr.cell(0, 0).params.g_hcs == 1e-6

    def test_cells_grid_shape_checked(self):
        from yflash_tm.device import YFlashCell

        with pytest.raises(ValueError):
            CrossbarArray(2, 2, cells=[[YFlashCell(rng=0)]])
