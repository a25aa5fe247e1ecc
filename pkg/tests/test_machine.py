import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spatial_cim.config import PumpConfig, RunConfig
from spatial_cim.coupling import CouplingOperator, threshold_from_radius
from spatial_cim.errors import ConfigError, DimensionError, IntegrationDivergedError
from spatial_cim.graphs import GraphFamily, assemble_q, make_graph
from spatial_cim.machine import (
    FieldState,
    init_noise,
    read_config_hash,
    read_csv,
    read_fields,
    read_json,
    resolve_pump,
    round_trip,
    run,
    spins_from_field,
    trajectory_summary,
    write_fields,
    write_json,
    write_quadratures_csv,
    write_trajectory_csv,
)
from spatial_cim.oracles import brute_force_ground_state

R_OUT = math.sqrt(0.9)


class TestInitNoise:
    def test_rms_amplitude(self):
        state = init_noise(100_000, 1e-3, seed=0)
        rms = math.sqrt(np.mean(np.abs(state.amplitudes) ** 2))
        assert rms == pytest.approx(1e-3, rel=0.02)
        assert state.round_trip == 0

    def test_same_seed_same_noise(self):
        assert np.array_equal(init_noise(50, 1e-3, 7).amplitudes, init_noise(50, 1e-3, 7).amplitudes)
        assert not np.array_equal(init_noise(50, 1e-3, 7).amplitudes, init_noise(50, 1e-3, 8).amplitudes)

    def test_prefix_stable_in_site_order(self):
        short = init_noise(10, 1e-3, 3).amplitudes
        long = init_noise(20, 1e-3, 3).amplitudes
        assert np.array_equal(short, long[:10])

    def test_zero_noise_rejected(self):
        with pytest.raises(ValueError):
            RunConfig(noise_amp=0.0)
        with pytest.raises(ConfigError):
            init_noise(4, 0.0, 0)


class TestReadout:
    def test_sign_of_real_part(self):
        spins = spins_from_field(np.array([0.3 + 5j, -0.1 - 2j, 0.0 + 1j, -0.0]))
        assert spins.tolist() == [1, -1, 1, 1]


class TestRoundTrip:
    def test_loss_only_without_pump(self):
        cfg = RunConfig(pump=PumpConfig(absolute=0.0), r_out=R_OUT)
        state = init_noise(64, 1e-3, 1)
        out = round_trip(state, CouplingOperator.identity(64), cfg, pump=0.0)
        assert_allclose(np.abs(out.amplitudes) / np.abs(state.amplitudes), R_OUT, rtol=1e-6)
        assert out.round_trip == 1

    @pytest.mark.parametrize("direction,grows", [(0.99, False), (1.01, True)])
    def test_single_site_threshold(self, direction, grows):
        cfg = RunConfig(pump=PumpConfig(absolute=0.0))
        threshold = threshold_from_radius(0.98, cfg.r_out, cfg.units.to_units())
        op = CouplingOperator.dense([[0.98]])
        state = FieldState(np.array([1e-3 + 0j]))
        start = abs(state.amplitudes[0])
        for _ in range(500):
            state = round_trip(state, op, cfg, pump=direction * threshold)
        assert bool(abs(state.amplitudes[0]) > start) == grows

    def test_real_field_stays_real(self, ml8, assembly, fast_run):
        for graph in (ml8, make_graph(GraphFamily.COMPLETE, 8, seed=0)):
            op = assemble_q(graph, assembly)
            pump = resolve_pump(fast_run, op).pump
            state = FieldState(init_noise(8, 1e-3, 2).amplitudes.real)
            for _ in range(300):
                state = round_trip(state, op, fast_run, pump=pump)
                assert np.all(state.amplitudes.imag == 0.0)
            assert np.max(np.abs(state.amplitudes)) > 5e-3

    def test_dimension_mismatch(self, fast_run):
        with pytest.raises(DimensionError):
            round_trip(init_noise(3, 1e-3, 0), CouplingOperator.identity(4), fast_run, pump=1.0)

    def test_divergence_tagged_with_round_trip(self, fast_run):
        state = FieldState(np.array([1e-3 + 0j, 1e-3 + 0j]), round_trip=17)
        with pytest.raises(IntegrationDivergedError) as info:
            round_trip(state, CouplingOperator.identity(2), fast_run, pump=1e200)
        assert info.value.round_trip == 17
        assert "round trip 17" in str(info.value)

    def test_trip_noise(self, fast_run):
        cfg = fast_run.model_copy(update={"trip_noise_amp": 1e-4})
        op = CouplingOperator.dense(0.5 * np.eye(4))
        state = FieldState(np.zeros(4, dtype=np.complex128))
        quiet = round_trip(state, op, fast_run, pump=0.0)
        noisy = round_trip(state, op, cfg, pump=0.0, rng=np.random.default_rng(0))
        assert np.all(quiet.amplitudes == 0)
        assert np.all(noisy.amplitudes != 0)

    def test_trip_noise_without_rng_uses_seeded_stream(self, fast_run):
        cfg = fast_run.model_copy(update={"trip_noise_amp": 1e-4})
        op = CouplingOperator.dense(0.5 * np.eye(4))
        state = FieldState(np.zeros(4, dtype=np.complex128))
        first = round_trip(state, op, cfg, pump=0.0)
        again = round_trip(state, op, cfg, pump=0.0)
        later = round_trip(FieldState(state.amplitudes, 5), op, cfg, pump=0.0)
        assert np.all(first.amplitudes != 0)
        assert np.array_equal(first.amplitudes, again.amplitudes)
        assert not np.array_equal(first.amplitudes, later.amplitudes)


class TestResolvePump:
    def test_multiple_of_threshold(self, ml8, assembly):
        op = assemble_q(ml8, assembly)
        resolved = resolve_pump(RunConfig(pump=PumpConfig(threshold_multiple=1.2)), op)
        assert resolved.pump == pytest.approx(1.2 * resolved.threshold)
        assert resolved.threshold == pytest.approx(-math.log(R_OUT * op.spectral_radius) / 0.01)

    def test_absolute(self, ml8, assembly):
        op = assemble_q(ml8, assembly)
        resolved = resolve_pump(RunConfig(pump=PumpConfig(absolute=5.0)), op)
        assert resolved.pump == 5.0
        assert resolved.multiple == pytest.approx(5.0 / resolved.threshold)

    def test_table(self, ml112, assembly):
        op = assemble_q(ml112, assembly)
        resolved = resolve_pump(RunConfig(pump=PumpConfig(table=True)), op, ml112)
        assert resolved.multiple == 1.2

    def test_table_needs_graph(self, ml8, assembly):
        with pytest.raises(ConfigError):
            resolve_pump(RunConfig(pump=PumpConfig(table=True)), assemble_q(ml8, assembly))

    def test_pump_forms_exclusive(self):
        with pytest.raises(ValueError):
            PumpConfig(absolute=1.0, threshold_multiple=1.2)
        with pytest.raises(ValueError):
            PumpConfig()


class TestRun:
    def test_record_count(self, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run)
        assert len(traj.records) == fast_run.n_round_trips + 1
        assert traj.records[0].tau == 0
        assert traj.final_spins.shape == (8,)

    def test_deterministic(self, ml8, assembly, fast_run):
        a = run(ml8, assembly, fast_run)
        b = run(ml8, assembly, fast_run)
        assert a.to_frame().equals(b.to_frame())
        assert np.array_equal(a.final_amplitudes, b.final_amplitudes)

    def test_no_pump_no_oscillation(self, ml8, assembly, fast_run):
        cfg = fast_run.model_copy(update={"pump": PumpConfig(absolute=0.0)})
        traj = run(ml8, assembly, cfg)
        assert traj.records[-1].max_abs < traj.records[0].max_abs
        assert not traj.oscillating
        assert not traj.metadata["oscillating"]

    def test_metadata(self, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run)
        assert traj.metadata["pump"] == pytest.approx(1.2 * traj.metadata["threshold"])
        assert traj.metadata["variant"] == "circulant"
        assert traj.metadata["rho"] < 1.0
        assert isinstance(traj.metadata["converged"], bool)

    def test_energy_matches_readout(self, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run)
        s = traj.final_spins.astype(float)
        assert traj.final_energy == pytest.approx(-0.5 * s @ ml8.j_matrix @ s)

    def test_mobius_ladder_8_reaches_ground_state(self, ml8, assembly):
        cfg = RunConfig(pump=PumpConfig(threshold_multiple=1.2), n_round_trips=1500, steps_per_pass=20)
        exact = brute_force_ground_state(ml8).energy
        hits = sum(run(ml8, assembly, cfg.model_copy(update={"seed": s})).final_energy <= exact + 1e-9
                   for s in range(3))
        assert hits >= 2

    def test_full_snapshots(self, ml8, assembly, fast_run):
        cfg = fast_run.model_copy(update={"record_fields": "full", "n_round_trips": 20})
        traj = run(ml8, assembly, cfg)
        assert len(traj.snapshots) == 21
        frame = traj.quadrature_frame()
        assert len(frame) == 21 * 8
        assert list(frame.columns) == ["tau", "site", "re", "im"]

    def test_quadratures_need_full_snapshots(self, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run.model_copy(update={"n_round_trips": 5}))
        with pytest.raises(ConfigError):
            traj.quadrature_frame()

    def test_settle_round_trip(self, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run)
        settle = traj.settle_round_trip
        assert all(r.spins_changed == 0 for r in traj.records[settle + 1:])
        if settle > 0:
            assert traj.records[settle].spins_changed > 0


class TestOutputs:
    def test_csv_header_and_columns(self, tmp_path, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run.model_copy(update={"n_round_trips": 10}))
        path = write_trajectory_csv(traj, tmp_path / "t.csv", "abc123")
        assert read_config_hash(path) == "abc123"
        frame = read_csv(path)
        assert list(frame.columns) == ["tau", "ising_energy", "mean_abs_re", "mean_abs_im",
                                       "max_abs", "spins_changed"]
        assert len(frame) == 11

    def test_summary_json(self, tmp_path, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run.model_copy(update={"n_round_trips": 10}))
        path = write_json(trajectory_summary(traj), tmp_path / "s.json", "abc123")
        payload = read_json(path)
        assert payload["config_hash"] == "abc123"
        assert payload["final_energy"] == traj.final_energy
        assert payload["final_spins"] == traj.final_spins.tolist()
        assert {"converged", "threshold", "rho"} <= payload.keys()

    def test_field_snapshots(self, tmp_path, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run.model_copy(update={"n_round_trips": 6, "record_fields": "full"}))
        write_fields(traj, tmp_path, "abc123")
        index = read_json(tmp_path / "fields.json")
        assert index["dtype"] == "<c8"
        assert index["entries"][1]["offset"] == 8 * 8
        data = read_fields(tmp_path / "fields.json")
        assert data.shape == (7, 8)
        assert_allclose(data, np.stack(traj.snapshots), rtol=1e-6, atol=1e-9)

    def test_quadrature_window(self, tmp_path, ml8, assembly, fast_run):
        traj = run(ml8, assembly, fast_run.model_copy(update={"n_round_trips": 12, "record_fields": "full"}))
        frame = read_csv(write_quadratures_csv(traj, tmp_path / "q.csv", "h", tau_max=5))
        assert frame["tau"].max() == 5
