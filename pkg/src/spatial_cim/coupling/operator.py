"""
Intracavity coupling operator.

Two variants mirror the two ways the SLM can realise Q:

* circulant: the SLM sits in the Fourier plane and multiplies the field
  spectrum by the kernel spectrum, so applying Q is an FFT convolution;
* dense: vector-matrix scheme, Q is an arbitrary N x N complex matrix.

The circulant kernel is the first column of the materialized matrix,
``C[i, j] = kernel[(i - j) mod N]`` (``scipy.linalg.circulant``), so its
first element sits on the diagonal and ``apply`` agrees with ``C @ field``.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.fft
import scipy.linalg
from loguru import logger

from ..errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    NoThresholdError,
    PassivityError,
)
from ..physics.units import NormalizedUnits

PASSIVITY_TOL = 1e-12
POWER_ITER_TOL = 1e-8
POWER_ITER_MAX = 100_000
KRYLOV_BLOCK = 4
KRYLOV_BREAKDOWN_TOL = 1e-12


class CouplingVariant(Enum):
    CIRCULANT = "circulant"
    DENSE = "dense"


@dataclass(frozen=True, eq=False)
class CouplingOperator:
    """Immutable coupling operator; build through ``circulant`` or ``dense``."""
    variant: CouplingVariant
    n_sites: int
    data: np.ndarray = field(repr=False)
    allow_active: bool = False

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128, copy=True)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        if self.n_sites < 1:
            raise DimensionError(f"operator needs at least one site, got {self.n_sites}")
        if self.variant is CouplingVariant.CIRCULANT and data.shape != (self.n_sites,):
            raise DimensionError(f"circulant kernel must have length {self.n_sites}, got shape {data.shape}")
        if self.variant is CouplingVariant.DENSE and data.shape != (self.n_sites, self.n_sites):
            raise DimensionError(f"dense matrix must be {self.n_sites}x{self.n_sites}, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise ConfigError("coupling operator entries must be finite")
        if not self.allow_active and not self.is_passive:
            raise PassivityError(self.spectral_radius)

    @classmethod
    def circulant(cls, kernel, allow_active: bool = False) -> "CouplingOperator":
        kernel = np.asarray(kernel, dtype=np.complex128)
        if kernel.ndim != 1:
            raise DimensionError(f"circulant kernel must be one-dimensional, got shape {kernel.shape}")
        return cls(CouplingVariant.CIRCULANT, kernel.shape[0], kernel, allow_active)

    @classmethod
    def dense(cls, matrix, allow_active: bool = False) -> "CouplingOperator":
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"dense coupling must be a square matrix, got shape {matrix.shape}")
        return cls(CouplingVariant.DENSE, matrix.shape[0], matrix, allow_active)

    @classmethod
    def identity(cls, n_sites: int) -> "CouplingOperator":
        """Lossless identity coupling; rho = 1, so it is always built as active."""
        kernel = np.zeros(n_sites, dtype=np.complex128)
        kernel[0] = 1.0
        return cls.circulant(kernel, allow_active=True)

    @property
    def is_circulant(self) -> bool:
        return self.variant is CouplingVariant.CIRCULANT

    @cached_property
    def kernel_spectrum(self) -> np.ndarray:
        """DFT of the circulant kernel, i.e. the eigenvalues of Q."""
        if not self.is_circulant:
            raise ConfigError("kernel spectrum is only defined for circulant operators")
        spectrum = scipy.fft.fft(self.data)
        spectrum.setflags(write=False)
        return spectrum

    @cached_property
    def _real_rspectrum(self) -> Optional[np.ndarray]:
        """rfft of a real circulant kernel, None when the kernel is complex."""
        if not self.is_circulant or np.any(self.data.imag != 0.0):
            return None
        return scipy.fft.rfft(self.data.real)

    @cached_property
    def _real_matrix(self) -> Optional[np.ndarray]:
        if self.is_circulant or np.any(self.data.imag != 0.0):
            return None
        return np.ascontiguousarray(self.data.real)

    @cached_property
    def spectral_radius(self) -> float:
        return spectral_radius(self)

    @property
    def is_passive(self) -> bool:
        return self.spectral_radius < 1.0 - PASSIVITY_TOL

    def to_dense(self) -> np.ndarray:
        """Materialized N x N matrix."""
        if self.is_circulant:
            return scipy.linalg.circulant(self.data)
        return np.array(self.data)

    def apply(self, field: np.ndarray) -> np.ndarray:
        return apply(self, field)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready form; floats keep their shortest exact repr."""
        flat = self.data.reshape(-1)
        payload = {
            "variant": self.variant.value,
            "n_sites": self.n_sites,
            "allow_active": self.allow_active,
            "entries": [[float(z.real), float(z.imag)] for z in flat],
        }
        if not self.is_circulant:
            payload["layout"] = "row-major"
        return payload

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "CouplingOperator":
        try:
            variant = CouplingVariant(payload["variant"])
            n = int(payload["n_sites"])
            entries = np.array([complex(re, im) for re, im in payload["entries"]], dtype=np.complex128)
            allow_active = bool(payload.get("allow_active", False))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed coupling operator payload: {e}") from e
        if variant is CouplingVariant.CIRCULANT:
            return cls(variant, n, entries, allow_active)
        if entries.size != n * n:
            raise DimensionError(f"dense payload has {entries.size} entries, expected {n * n}")
        return cls(variant, n, entries.reshape(n, n), allow_active)


def apply(op: CouplingOperator, field: np.ndarray) -> np.ndarray:
    """
    Couple a field vector: circular convolution for circulant operators,
    matrix-vector product for dense ones.

    Raises:
        DimensionError: field length differs from ``op.n_sites``
    """
    field = np.asarray(field, dtype=np.complex128)
    if field.shape != (op.n_sites,):
        raise DimensionError(f"field has shape {field.shape}, operator expects ({op.n_sites},)")
    if op.is_circulant:
        spectrum = op._real_rspectrum
        if spectrum is None:
            return scipy.fft.ifft(scipy.fft.fft(field) * op.kernel_spectrum)
        # real kernel: quadratures stay decoupled and a real field stays exactly real
        n = op.n_sites
        re = scipy.fft.irfft(scipy.fft.rfft(field.real) * spectrum, n)
        im = scipy.fft.irfft(scipy.fft.rfft(field.imag) * spectrum, n)
        return re + 1j * im
    matrix = op._real_matrix
    if matrix is None:
        return op.data @ field
    return matrix @ field.real + 1j * (matrix @ field.imag)


def spectral_radius(op: CouplingOperator) -> float:
    """
    Largest eigenvalue modulus of Q.

    Circulant operators are exact (max |DFT(kernel)|). Hermitian dense
    operators, which covers every Q = a*1 + b*J with J real symmetric, use a
    symmetric eigendecomposition. Other dense operators fall back to power
    iteration.
    """
    if op.is_circulant:
        return float(np.max(np.abs(op.kernel_spectrum)))
    q = op.data
    if np.array_equal(q, q.conj().T):
        eig = scipy.linalg.eigvalsh(q)
        return float(np.max(np.abs(eig)))
    return _power_iteration_radius(q)


def _krylov_ritz_radius(q: np.ndarray, x: np.ndarray, size: int) -> Tuple[float, bool]:
    """Largest Ritz value modulus on span{x, Qx, ..., Q^(size-1) x}; True if that span is invariant."""
    n = x.size
    v = np.zeros((n, size), dtype=np.complex128)
    h = np.zeros((size, size), dtype=np.complex128)
    v[:, 0] = x
    for j in range(size):
        w = q @ v[:, j]
        raw = float(np.linalg.norm(w))
        for i in range(j + 1):
            h[i, j] = np.vdot(v[:, i], w)
            w = w - h[i, j] * v[:, i]
        beta = float(np.linalg.norm(w))
        if beta <= KRYLOV_BREAKDOWN_TOL * raw or raw == 0.0:
            return float(np.max(np.abs(np.linalg.eigvals(h[:j + 1, :j + 1])))), True
        if j + 1 < size:
            h[j + 1, j] = beta
            v[:, j + 1] = w / beta
    return float(np.max(np.abs(np.linalg.eigvals(h)))), False


def _power_iteration_radius(q: np.ndarray, tol: float = POWER_ITER_TOL,
                            max_iter: int = POWER_ITER_MAX) -> float:
    """
    Power method with a small Krylov block per iterate.

    ``|Q x| / |x|`` never settles when the largest eigenvalues form a
    complex-conjugate pair or otherwise share a modulus, so each iterate
    ``Q^k x`` is extended to a Krylov block and the largest Ritz value modulus
    of that block is the estimate.

    Raises:
        ConvergenceError: the estimate moved by more than ``tol`` (relative)
            on every one of ``max_iter`` iterations
    """
    n = q.shape[0]
    size = min(KRYLOV_BLOCK, n)
    # fixed start vector keeps the estimate deterministic
    x = np.exp(1j * np.arange(n)) + 1.0
    x /= np.linalg.norm(x)
    estimate = None
    for it in range(1, max_iter + 1):
        value, invariant = _krylov_ritz_radius(q, x, size)
        if invariant or (estimate is not None and abs(value - estimate) <= tol * value):
            logger.debug(f"[Coupling] power iteration converged after {it} iterations")
            return value
        estimate = value
        for _ in range(size):
            x = q @ x
            x /= np.linalg.norm(x)
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations (last estimate {estimate:.10g})")


def threshold_from_radius(rho: float, r_out: float, units: NormalizedUnits) -> float:
    """B0_th = -ln(R_out * rho) / kappa_tilde, in units of A0."""
    if not 0.0 < r_out <= 1.0:
        raise ConfigError(f"r_out must lie in (0, 1], got {r_out}")
    loss = r_out * rho
    if loss <= 0.0:
        raise NoThresholdError(f"R_out * rho(Q) = {loss:.12g}; a dark cavity never oscillates")
    if loss > 1.0 + PASSIVITY_TOL:
        raise NoThresholdError(f"R_out * rho(Q) = {loss:.12g} >= 1: the cavity has gain without pump")
    return max(0.0, -math.log(loss) / units.kappa_tilde)


def threshold_pump(op: CouplingOperator, r_out: float, units: NormalizedUnits) -> float:
    """Oscillation threshold of the pump amplitude for this coupling."""
    return threshold_from_radius(op.spectral_radius, r_out, units)
