from dataclasses import replace

import pytest

from yflash_tm.cli import main
from yflash_tm.config import default_config
from yflash_tm.experiments import (
    execute,
    run_d2d,
    run_endurance,
    run_energy,
    run_staircase,
    run_train,
    run_xor_map,
)


def _cfg(experiment, **kwargs):
    cfg = default_config(experiment)
    return replace(cfg, **kwargs) if kwargs else cfg


class TestStaircase:
    def test_default_run_counts(self):
        result = run_staircase(_cfg("staircase"))
        assert result.n_program_pulses == 40
        assert len(set(result.program_conductances)) == 41
        assert result.program_conductances[0] == pytest.approx(2.5e-6)
        assert result.program_conductances[-1] == pytest.approx(1e-9)

    def test_recovery_erase_phase_present(self):
        result = run_staircase(_cfg("staircase"))
        assert result.n_erase_pulses >= 32
        modes = [m for _, m, _, _ in result.rows]
        assert modes[0] == "read"
        assert modes.count("program") == 40

    def test_fine_width_resolution(self):
        cfg = _cfg("staircase")
        cfg = replace(cfg, staircase=replace(cfg.staircase, width=10e-6))
        result = run_staircase(cfg)
        assert len(set(result.program_conductances)) >= 1000


class TestEndurance:
    def test_default_run(self):
        result = run_endurance(_cfg("endurance"))
        assert len(result.records) == 250
        assert max(r.t_program for r in result.records) <= 8.6e-3
        assert max(r.t_erase for r in result.records) <= 11.2e-3

    def test_short_run_rows(self):
        cfg = _cfg("endurance")
        cfg = replace(cfg, endurance=replace(cfg.endurance, cycles=5))
        result = run_endurance(cfg)
        assert [r.cycle for r in result.records] == list(range(5))


class TestD2d:
    def test_summary_statistics(self):
        result = run_d2d(_cfg("d2d"))
        stats = result.summary()
        assert stats["n_devices"] == 100
        assert abs(stats["lcs_mean_S"] - 0.92e-9) <= 0.015e-9
        assert abs(stats["hcs_mean_S"] - 1.04e-6) <= 0.009e-6

    def test_zero_sigma_population_identical(self):
        cfg = _cfg("d2d")
        cfg = replace(
            cfg,
            population=replace(cfg.population, lcs_sigma=0.0, hcs_sigma=0.0),
            d2d=replace(cfg.d2d, n_devices=10),
        )
        result = run_d2d(cfg)
        assert len(set(result.lcs_values())) == 1
        assert len(set(result.hcs_values())) == 1


class TestXorMap:
    def test_default_run_profile(self):
        result = run_xor_map(_cfg("xor-map"))
        assert result.accuracy == 1.0
        assert result.pulse_count <= result.n_transitions // 10
        assert 10 <= result.tracked_pulse_count() <= 40
        assert result.reads_during_training == 0
        agree, total = result.gated_agreement()
        assert agree == total

    def test_endpoint_bands(self):
        # Single-run magnitudes: included automata reach the microsiemens
        # decade, excluded ones fall to the nanosiemens decades.
        result = run_xor_map(_cfg("xor-map"))
        assert result.included_g_max() >= 1e-6
        assert result.excluded_g_min() <= 100e-9

    def test_event_rows_match_trace(self):
        result = run_xor_map(_cfg("xor-map"))
        assert len(result.event_rows) == result.n_transitions
        fired = [row for row in result.event_rows if row[4]]
        assert len(fired) == result.pulse_count


class TestTrainAndEnergy:
    def test_train_oracle(self):
        result = run_train(_cfg("train"))
        assert result.accuracy == 1.0
        assert all(abs(e.new_state - e.old_state) == 1 for e in result.transitions)

    def test_train_is_exact_oracle_of_mapped_run(self):
        # Same seed, same generator layout: the software-only run and the
        # mapped run drive identical machines, so their trajectories match.
        software = run_train(_cfg("train"))
        mapped = run_xor_map(_cfg("xor-map"))
        assert software.final_states == mapped.final_states
        assert len(software.transitions) == mapped.n_transitions

    def test_energy_rows(self):
        rows = {m: (v, n, p, e) for m, v, n, p, e in run_energy(_cfg("energy")).rows}
        assert rows["read"][3] == pytest.approx(9.14e-6)
        assert rows["program"][3] == pytest.approx(139.0)
        assert rows["erase"][3] == pytest.approx(1.6e-3)
        assert rows["program"][1] == 40
        assert rows["erase"][1] == 32
        assert rows["read"][0] == 2.0 and rows["program"][0] == 5.0 and rows["erase"][0] == 8.0


class TestPersistence:
    @pytest.mark.parametrize("experiment", ["staircase", "endurance", "d2d", "xor-map", "train", "energy"])
    def test_artifacts_written(self, tmp_path, experiment):
        cfg = _cfg(experiment)
        if experiment == "endurance":
            cfg = replace(cfg, endurance=replace(cfg.endurance, cycles=3))
        if experiment == "d2d":
            cfg = replace(cfg, d2d=replace(cfg.d2d, n_devices=5))
        if experiment in ("xor-map", "train"):
            cfg = replace(cfg, xor=replace(cfg.xor, n_samples=500))
        out = execute(cfg, tmp_path / experiment)
        assert (out / "resolved_config.txt").exists()
        assert (out / "summary.txt").exists()
        csvs = list(out.glob("*.csv"))
        assert csvs, "every experiment must write at least one CSV"
        for csv_path in csvs:
            assert csv_path.stat().st_size > 0

    def test_byte_identical_reruns(self, tmp_path):
        cfg = _cfg("xor-map")
        cfg = replace(cfg, xor=replace(cfg.xor, n_samples=800))
        out1 = execute(cfg, tmp_path / "a")
        out2 = execute(cfg, tmp_path / "b")
        for name in ("xor_map.csv", "pulses.csv", "summary.txt", "resolved_config.txt"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        cfg = _cfg("xor-map")
        cfg = replace(cfg, xor=replace(cfg.xor, n_samples=800))
        out1 = execute(cfg, tmp_path / "a")
        out2 = execute(replace(cfg, seed=26), tmp_path / "b")
        assert (out1 / "xor_map.csv").read_bytes() != (out2 / "xor_map.csv").read_bytes()


class TestCli:
    def test_print_defaults(self, capsys):
        assert main(["print-defaults", "endurance"]) == 0
        out = capsys.readouterr().out
        assert "device.g_lcs = 8.5e-10" in out
        assert "endurance.cycles = 250" in out

    def test_experiment_run(self, tmp_path, capsys):
        rc = main(["staircase", "--out", str(tmp_path / "s"), "--seed", "3"])
        assert rc == 0
        assert (tmp_path / "s" / "staircase.csv").exists()
        echo = (tmp_path / "s" / "resolved_config.txt").read_text()
        assert "seed = 3" in echo

    def test_config_file_run(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("endurance.cycles = 4\n")
        rc = main(["endurance", "--config", str(cfg_file), "--out", str(tmp_path / "e")])
        assert rc == 0
        lines = (tmp_path / "e" / "endurance.csv").read_text().splitlines()
        assert len(lines) == 5  # header + 4 cycles

    def test_bad_config_key_exit_code(self, tmp_path, capsys):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("nonsense.key = 1\n")
        assert main(["staircase", "--config", str(cfg_file), "--out", str(tmp_path / "x")]) == 2

    def test_verify_fast_path(self, capsys):
        assert main(["verify", "--skip-slow"]) == 0
        out = capsys.readouterr().out
        assert "PASS staircase-states" in out
