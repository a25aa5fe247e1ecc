import json
import math

import numpy as np
import pytest

from spatial_cim.config import (
    EnvConfig,
    RunConfig,
    dump_experiment,
    load_experiment,
    parse_experiment,
    table_pump_multiple,
)
from spatial_cim.errors import ConfigError
from spatial_cim.graphs import GraphFamily, make_graph, save_graph
from spatial_cim.harness import (
    bracket_threshold,
    hardware_time,
    pump_sweep,
    recompute_report,
    run_experiment,
)
from spatial_cim.harness.cli import main
from spatial_cim.machine import read_config_hash, read_csv, read_json


class TestSchema:
    def test_minimal(self, ml_experiment):
        spec = parse_experiment(ml_experiment())
        assert spec.schema_version == 1
        assert spec.assembly.a == 0.96
        assert spec.run.r_out == pytest.approx(math.sqrt(0.9))

    def test_unknown_key_rejected(self, ml_experiment):
        payload = ml_experiment()
        payload["run"]["pump_level"] = 1.2
        with pytest.raises(ConfigError):
            parse_experiment(payload)

    def test_schema_version_required_to_match(self, ml_experiment):
        payload = ml_experiment()
        payload["schema_version"] = 2
        with pytest.raises(ConfigError):
            parse_experiment(payload)

    def test_graph_source_exclusive(self, ml_experiment, tmp_path):
        payload = ml_experiment()
        del payload["graph"]
        with pytest.raises(ConfigError):
            parse_experiment(payload)
        payload["graph_file"] = str(tmp_path / "missing.json")
        with pytest.raises(ConfigError):
            parse_experiment(payload)

    def test_seeds(self, ml_experiment):
        with pytest.raises(ConfigError):
            parse_experiment(ml_experiment(seeds=()))
        with pytest.raises(ConfigError):
            parse_experiment(ml_experiment(seeds=(1, 1)))

    def test_bad_physics_rejected(self, ml_experiment):
        for bad in ({"noise_amp": 0.0}, {"r_out": 1.5}, {"n_round_trips": 0}):
            with pytest.raises(ConfigError):
                parse_experiment(ml_experiment(**bad))

    def test_preset_fills_unset_fields(self, ml_experiment):
        payload = ml_experiment()
        payload["run"] = {"steps_per_pass": 20}
        payload["preset"] = "fig2-quadratures"
        spec = parse_experiment(payload)
        assert spec.run.n_round_trips == 300
        assert spec.run.record_fields == "full"
        assert spec.run.steps_per_pass == 20

    def test_preset_keeps_explicit_fields(self, ml_experiment):
        payload = ml_experiment(n_round_trips=50)
        payload["preset"] = "fig3-energy"
        assert parse_experiment(payload).run.n_round_trips == 50

    def test_sweep_preset_grid(self, ml_experiment):
        payload = ml_experiment()
        payload["preset"] = "pump-sweep"
        assert parse_experiment(payload).pump_grid == [1.05, 1.2, 1.5]

    def test_hash_ignores_output_location(self, ml_experiment):
        a = parse_experiment(ml_experiment())
        payload = ml_experiment()
        payload["outputs"] = {"directory": "/elsewhere"}
        b = parse_experiment(payload)
        c = parse_experiment(ml_experiment(seeds=(0, 2)))
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != c.config_hash()
        assert len(a.config_hash()) == 16

    def test_dump_round_trip(self, ml_experiment):
        spec = parse_experiment(ml_experiment())
        again = parse_experiment(json.loads(dump_experiment(spec)))
        assert again.config_hash() == spec.config_hash()

    def test_load_from_file(self, ml_experiment, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps(ml_experiment()), encoding="utf-8")
        spec = load_experiment(path, {"seeds": [5]})
        assert spec.seeds == [5]
        with pytest.raises(ConfigError):
            load_experiment(tmp_path / "absent.json")

    def test_pump_table(self):
        assert table_pump_multiple("K", 224) == 1.36
        assert table_pump_multiple(GraphFamily.ERDOS_RENYI, 112) == 1.3
        with pytest.raises(ConfigError):
            table_pump_multiple("ML", 100)

    def test_default_output_dir_from_env(self, ml_experiment, tmp_path):
        spec = parse_experiment(ml_experiment(name="demo"))
        assert spec.output_dir() == tmp_path / "runs" / "demo"
        assert EnvConfig.get_threads() == 1


class TestThreshold:
    def test_bracket_matches_closed_form(self):
        result = bracket_threshold(0.98, RunConfig())
        assert result.formula == pytest.approx(-math.log(math.sqrt(0.9) * 0.98) / 0.01)
        assert result.rel_error < 0.01

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [0.9, 0.98])
    @pytest.mark.parametrize("r_out", [0.8, math.sqrt(0.9)])
    def test_bracket_grid(self, rho, r_out):
        assert bracket_threshold(rho, RunConfig(r_out=r_out)).rel_error < 0.01

    def test_hardware_time(self):
        timing = hardware_time(RunConfig(cavity_length_m=1.0, cavity_n_refr=2.0, n_round_trips=1000))
        assert timing["round_trip_s"] == pytest.approx(13.34e-9, rel=1e-3)
        assert timing["total_s"] == pytest.approx(13.34e-6, rel=1e-3)
        assert timing["estimate"] is True


class TestExperiment:
    def test_outputs_and_report(self, ml_experiment, tmp_path):
        spec = parse_experiment(ml_experiment())
        bundle = run_experiment(spec, out_dir=tmp_path / "out")
        out = tmp_path / "out"
        for name in ("config.json", "graph.json", "oracle.json", "report.json",
                     "seed_0000.csv", "seed_0000.json", "seed_0001.csv", "seed_0001.json"):
            assert (out / name).is_file(), name
        assert read_config_hash(out / "seed_0000.csv") == spec.config_hash()
        assert read_json(out / "report.json")["config_hash"] == spec.config_hash()
        assert bundle.oracle["method"] == "circulant-eigenvector"
        assert bundle.aggregate["n_seeds"] == 2
        assert set(bundle.trajectories) == {0, 1}
        assert {"run", "write", "graph", "oracle"} <= bundle.stage_stats.keys()
        assert read_json(out / "stages.json")["stage_stats"].keys() == bundle.stage_stats.keys()
        assert "stage_stats" not in read_json(out / "report.json")
        assert bundle.physical["threshold_volts_per_m"] == pytest.approx(
            bundle.physical["threshold_a0"] * 6.77e3)

    def test_report_recount(self, ml_experiment, tmp_path):
        run_experiment(parse_experiment(ml_experiment(seeds=(0, 1, 2))), out_dir=tmp_path)
        summary = recompute_report(tmp_path)
        assert summary["consistent"]
        assert summary["recomputed"]["n_seeds"] == 3

    def test_success_counts_match_final_energies(self, ml_experiment, tmp_path):
        bundle = run_experiment(parse_experiment(ml_experiment(seeds=(0, 1, 2))), out_dir=tmp_path)
        oracle = bundle.oracle["energy"]
        recount = sum(r.oscillating and r.final_energy <= oracle + 1e-9 for r in bundle.results)
        assert bundle.aggregate["n_success"] == recount

    def test_rerun_from_emitted_config_is_byte_identical(self, ml_experiment, tmp_path):
        run_experiment(parse_experiment(ml_experiment()), out_dir=tmp_path / "first")
        again = load_experiment(tmp_path / "first" / "config.json")
        run_experiment(again, out_dir=tmp_path / "second")
        for name in ("seed_0000.csv", "seed_0001.csv", "seed_0000.json", "oracle.json", "report.json"):
            assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()

    def test_thread_count_does_not_change_results(self, ml_experiment, tmp_path):
        spec = parse_experiment(ml_experiment(seeds=(0, 1, 2, 3)))
        run_experiment(spec, threads=1, out_dir=tmp_path / "one")
        run_experiment(spec, threads=3, out_dir=tmp_path / "three")
        for seed in range(4):
            name = f"seed_{seed:04d}.csv"
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "three" / name).read_bytes()

    def test_failed_seed_is_recorded(self, ml_experiment, tmp_path):
        payload = ml_experiment(n_round_trips=3)
        payload["run"]["pump"] = {"absolute": 1e200}
        bundle = run_experiment(parse_experiment(payload), out_dir=tmp_path)
        assert len(bundle.failures) == 2
        assert bundle.failures[0].stage == "run"
        assert bundle.failures[0].kind == "numerical"
        assert bundle.aggregate["success_fraction"] == 0.0
        assert (tmp_path / "report.json").is_file()

    def test_annealing_oracle_for_random_graphs(self, tmp_path):
        payload = {
            "name": "k12",
            "graph": {"family": "K", "n": 12, "seed": 1},
            "run": {"n_round_trips": 100, "steps_per_pass": 20},
            "anneal": {"sweeps": 200, "restarts": 4},
            "seeds": [0],
        }
        bundle = run_experiment(parse_experiment(payload), out_dir=tmp_path)
        assert bundle.oracle["method"] == "metropolis"

    def test_graph_file_source(self, ml_experiment, tmp_path, ml8):
        path = save_graph(ml8, tmp_path / "ml8.json")
        payload = ml_experiment(seeds=(0,))
        del payload["graph"]
        payload["graph_file"] = str(path)
        bundle = run_experiment(parse_experiment(payload), out_dir=tmp_path / "out")
        assert len(bundle.results) == 1

    def test_quadrature_preset(self, ml_experiment, tmp_path):
        payload = ml_experiment(seeds=(0,), n_round_trips=20, record_fields="full")
        payload["preset"] = "fig2-quadratures"
        payload["outputs"] = {"formats": ["csv", "json", "fields"]}
        run_experiment(parse_experiment(payload), out_dir=tmp_path)
        frame = read_csv(tmp_path / "seed_0000_quadratures.csv")
        assert len(frame) == 21 * 8
        assert (tmp_path / "seed_0000_fields.bin").stat().st_size == 21 * 8 * 8

    def test_threshold_check_preset(self, ml_experiment, tmp_path):
        payload = ml_experiment(seeds=(0,), n_round_trips=10)
        payload["preset"] = "threshold-check"
        bundle = run_experiment(parse_experiment(payload), out_dir=tmp_path)
        assert bundle.threshold_check["rel_error"] < 0.01


class TestSweep:
    def test_below_threshold_row_is_undefined(self, ml_experiment, tmp_path):
        spec = parse_experiment(ml_experiment(seeds=(0,), n_round_trips=300))
        table = pump_sweep(spec, [0.5, 1.2], out_dir=tmp_path)
        assert list(table["pump_multiple"]) == [0.5, 1.2]
        below, above = table.iloc[0], table.iloc[1]
        assert below["oscillating_fraction"] == 0.0
        assert np.isnan(below["mean_final_energy"])
        assert below["success_fraction"] == 0.0
        assert above["oscillating_fraction"] == 1.0
        assert read_config_hash(tmp_path / "sweep.csv") == spec.config_hash()
        assert (tmp_path / "pump_1.2" / "report.json").is_file()

    def test_needs_grid(self, ml_experiment, tmp_path):
        with pytest.raises(ConfigError):
            pump_sweep(parse_experiment(ml_experiment()), out_dir=tmp_path)


class TestCli:
    def test_generate_and_exact(self, tmp_path, capsys):
        graph = tmp_path / "ml8.json"
        assert main(["generate-graph", "--family", "ML", "--n", "8", "--out", str(graph)]) == 0
        result = tmp_path / "exact.json"
        assert main(["exact", "--graph", str(graph), "--out", str(result)]) == 0
        payload = read_json(result)
        assert payload["energy"] == pytest.approx(-1.6)
        assert payload["method"] == "brute-force"
        assert len(payload["config_hash"]) == 16

    def test_anneal_to_stdout(self, tmp_path, capsys):
        graph = tmp_path / "k10.json"
        save_graph(make_graph(GraphFamily.COMPLETE, 10, seed=2), graph)
        code = main(["anneal", "--graph", str(graph), "--seed", "3", "--sweeps", "100", "--restarts", "2"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["seed"] == 3
        assert payload["schedule"]["sweeps"] == 100

    def test_anneal_uses_experiment_schedule(self, tmp_path, capsys):
        config = tmp_path / "k10.json"
        config.write_text(json.dumps({
            "name": "k10",
            "graph": {"family": "K", "n": 10, "seed": 2},
            "anneal": {"sweeps": 150, "restarts": 3},
            "anneal_seed": 7,
            "seeds": [0],
        }), encoding="utf-8")
        assert main(["anneal", "--config", str(config)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["seed"] == 7
        assert payload["schedule"]["sweeps"] == 150
        assert payload["schedule"]["restarts"] == 3
        assert main(["anneal", "--config", str(config), "--restarts", "2", "--seed", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["seed"] == 1
        assert payload["schedule"]["sweeps"] == 150
        assert payload["schedule"]["restarts"] == 2

    def test_run_and_report(self, ml_experiment, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps(ml_experiment()), encoding="utf-8")
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out), "--seed", "4", "--threads", "2"]) == 0
        assert (out / "seed_0004.json").is_file()
        assert main(["report", str(out)]) == 0

    def test_config_error_exit_code(self, tmp_path, capsys):
        config = tmp_path / "bad.json"
        config.write_text(json.dumps({"name": "x", "seeds": [0], "mystery": 1}), encoding="utf-8")
        assert main(["run", "--config", str(config)]) == 2
        assert "error" in capsys.readouterr().err

    def test_numerical_failure_exit_code(self, ml_experiment, tmp_path):
        payload = ml_experiment(seeds=(0,), n_round_trips=2)
        payload["run"]["pump"] = {"absolute": 1e200}
        config = tmp_path / "exp.json"
        config.write_text(json.dumps(payload), encoding="utf-8")
        assert main(["run", "--config", str(config), "--out", str(tmp_path / "out")]) == 3

    def test_sweep_command(self, ml_experiment, tmp_path):
        config = tmp_path / "exp.json"
        config.write_text(json.dumps(ml_experiment(seeds=(0,), n_round_trips=50)), encoding="utf-8")
        assert main(["sweep", "--config", str(config), "--out", str(tmp_path / "s"), "--grid", "1.2"]) == 0
        assert (tmp_path / "s" / "sweep.csv").is_file()

    def test_exact_rejects_large_random_graph(self, tmp_path):
        graph = tmp_path / "k30.json"
        save_graph(make_graph(GraphFamily.COMPLETE, 30, seed=0), graph)
        assert main(["exact", "--graph", str(graph)]) == 2
