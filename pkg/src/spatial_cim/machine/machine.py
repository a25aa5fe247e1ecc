"""
Round-trip map of the spatial CIM.

Each round trip takes every site through the nonlinear medium with a fresh
pump B(z=0) = B0, couples the field through Q and scales it by R_out:

    A(tau+1) = R_out * Q @ NLM[A(tau)]

The NLM pass is vectorized over sites, so results do not depend on how many
workers run seeds side by side.
"""
import hashlib
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from loguru import logger
from tqdm import tqdm

from ..config.schema import RunConfig, table_pump_multiple
from ..coupling import CouplingOperator, apply, threshold_pump
from ..errors import ConfigError, DimensionError, IntegrationDivergedError, NoThresholdError
from ..graphs import CouplingAssembly, GraphInstance, assemble_q
from ..physics import integrate_fields
from ..rng import Stream, stream
from .models import FieldState, Trajectory, TripRecord

# sgn(0) is read as +1
ZERO_SPIN = 1


def spins_from_field(amplitudes: np.ndarray) -> np.ndarray:
    """Spin readout sgn(Re A)."""
    re = np.real(amplitudes)
    return np.where(re > 0.0, 1, np.where(re < 0.0, -1, ZERO_SPIN)).astype(np.int8)


def spins_hash(spins: np.ndarray) -> str:
    return hashlib.blake2b(np.ascontiguousarray(spins, dtype=np.int8).tobytes(), digest_size=8).hexdigest()


def init_noise(n: int, noise_amp: float, seed: int) -> FieldState:
    """
    White-noise signal at tau = 0.

    Each amplitude is circular complex Gaussian with per-quadrature standard
    deviation noise_amp / sqrt(2), drawn from the NOISE stream in site order.
    """
    if n < 1:
        raise ConfigError(f"need at least one site, got {n}")
    if not noise_amp > 0.0:
        raise ConfigError(f"noise_amp must be positive, got {noise_amp}")
    draws = stream(seed, Stream.NOISE).standard_normal((n, 2))
    scale = noise_amp / np.sqrt(2.0)
    return FieldState(scale * (draws[:, 0] + 1j * draws[:, 1]), 0)


@dataclass(frozen=True)
class PumpResolution:
    pump: float
    threshold: Optional[float]
    multiple: Optional[float]


def resolve_pump(cfg: RunConfig, op: CouplingOperator,
                 graph: Optional[GraphInstance] = None) -> PumpResolution:
    """Absolute pump amplitude for the run, with the threshold it refers to."""
    units = cfg.units.to_units()
    spec = cfg.pump
    if spec.absolute is not None:
        try:
            threshold = threshold_pump(op, cfg.r_out, units)
        except NoThresholdError:
            threshold = None
        multiple = spec.absolute / threshold if threshold else None
        return PumpResolution(spec.absolute, threshold, multiple)

    if spec.table:
        if graph is None:
            raise ConfigError("a tabulated pump needs the graph family and size")
        multiple = table_pump_multiple(graph.family, graph.n)
    else:
        multiple = spec.threshold_multiple
    threshold = threshold_pump(op, cfg.r_out, units)
    return PumpResolution(multiple * threshold, threshold, multiple)


def round_trip(state: FieldState, op: CouplingOperator, cfg: RunConfig, *,
               pump: Optional[float] = None,
               rng: Optional[np.random.Generator] = None) -> FieldState:
    """
    One cavity round trip: NLM pass, coupling, outcoupling loss.

    Args:
        state: field at round trip tau
        op: coupling operator
        cfg: run configuration
        pump: absolute pump amplitude; resolved from ``cfg`` when omitted
        rng: noise stream, used only when ``cfg.trip_noise_amp`` > 0; without
            one the draws come from a stream keyed by ``cfg.seed`` and the
            round-trip index

    Raises:
        DimensionError: field and operator sizes differ
        IntegrationDivergedError: tagged with the site and round trip
    """
    if state.n_sites != op.n_sites:
        raise DimensionError(f"field has {state.n_sites} sites, operator has {op.n_sites}")
    if pump is None:
        pump = resolve_pump(cfg, op).pump
    try:
        amplified, _ = integrate_fields(state.amplitudes, pump, cfg.units.kappa_tilde, cfg.steps_per_pass)
    except IntegrationDivergedError as e:
        raise e.at_round_trip(state.round_trip) from e
    coupled = apply(op, amplified) * cfg.r_out
    if cfg.trip_noise_amp > 0.0:
        if rng is None:
            rng = stream(cfg.seed, Stream.NOISE, 2, state.round_trip)
        draws = rng.standard_normal((state.n_sites, 2))
        coupled = coupled + cfg.trip_noise_amp / np.sqrt(2.0) * (draws[:, 0] + 1j * draws[:, 1])
    return FieldState(coupled, state.round_trip + 1)


class _Recorder:
    """Collects per-round-trip statistics while a run advances."""

    def __init__(self, j_matrix: np.ndarray, keep_fields: bool):
        self.j_matrix = j_matrix
        self.keep_fields = keep_fields
        self.records: List[TripRecord] = []
        self.snapshots: List[np.ndarray] = []
        self._last_spins: Optional[np.ndarray] = None

    def observe(self, state: FieldState) -> None:
        a = state.amplitudes
        spins = spins_from_field(a)
        s = spins.astype(np.float64)
        changed = 0 if self._last_spins is None else int(np.count_nonzero(spins != self._last_spins))
        self.records.append(TripRecord(
            tau=state.round_trip,
            ising_energy=float(-0.5 * (s @ self.j_matrix @ s)),
            mean_abs_re=float(np.mean(np.abs(a.real))),
            mean_abs_im=float(np.mean(np.abs(a.imag))),
            max_abs=float(np.max(np.abs(a))),
            spins_hash=spins_hash(spins),
            spins_changed=changed,
        ))
        if self.keep_fields:
            self.snapshots.append(np.array(a))
        self._last_spins = spins

    def finish(self, state: FieldState, metadata: dict) -> Trajectory:
        return Trajectory(
            records=self.records,
            final_spins=self._last_spins,
            final_amplitudes=np.array(state.amplitudes),
            snapshots=self.snapshots if self.keep_fields else None,
            metadata=metadata,
        )


def run(graph: GraphInstance, asm: CouplingAssembly, cfg: RunConfig, *,
        op: Optional[CouplingOperator] = None, allow_active: bool = False,
        progress: bool = False) -> Trajectory:
    """
    Run the machine for ``cfg.n_round_trips`` round trips from initial noise.

    Args:
        graph: Ising instance; its J scores every round trip
        asm: weights of Q = a*1 + b*J
        cfg: run configuration (pump given absolutely, as a threshold
            multiple, or from the published table)
        op: prebuilt coupling operator for ``graph`` and ``asm``
        allow_active: build Q even when rho(Q) >= 1
        progress: show a tqdm bar

    Returns:
        Trajectory with n_round_trips + 1 records; non-convergence is flagged
        in ``metadata['converged']`` and never raised
    """
    if op is None:
        op = assemble_q(graph, asm, allow_active=allow_active)
    if op.n_sites != graph.n:
        raise DimensionError(f"operator has {op.n_sites} sites, graph has {graph.n}")
    pump = resolve_pump(cfg, op, graph)
    logger.info(f"[Machine] {graph.family.value} n={graph.n} seed={cfg.seed}: "
                f"pump {pump.pump:.6g} A0 (threshold {pump.threshold}), {cfg.n_round_trips} round trips")

    state = init_noise(graph.n, cfg.noise_amp, cfg.seed)
    trip_rng = stream(cfg.seed, Stream.NOISE, 1) if cfg.trip_noise_amp > 0.0 else None
    recorder = _Recorder(graph.j_matrix, keep_fields=cfg.record_fields == "full")
    recorder.observe(state)
    for _ in tqdm(range(cfg.n_round_trips), disable=not progress,
                  desc=f"seed {cfg.seed}", leave=False):
        state = round_trip(state, op, cfg, pump=pump.pump, rng=trip_rng)
        recorder.observe(state)

    trajectory = recorder.finish(state, {
        "seed": cfg.seed,
        "pump": pump.pump,
        "pump_multiple": pump.multiple,
        "threshold": pump.threshold,
        "rho": op.spectral_radius,
        "variant": op.variant.value,
    })
    trajectory.metadata["converged"] = trajectory.converged
    trajectory.metadata["oscillating"] = trajectory.oscillating
    if not trajectory.converged:
        logger.warning(f"[Machine] seed {cfg.seed}: spins still changing in the last "
                       f"{trajectory.convergence_window()} round trips")
    return trajectory
