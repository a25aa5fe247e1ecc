"""SLM pixel accounting for the two coupling schemes."""
from dataclasses import dataclass

from ..errors import ConfigError
from .operator import CouplingOperator


@dataclass(frozen=True)
class PixelBudget:
    """SLM size in pixels"""
    m_x: int = 1000
    m_y: int = 1000

    def __post_init__(self):
        if self.m_x < 1 or self.m_y < 1:
            raise ConfigError(f"SLM must have at least one pixel per axis, got {self.m_x}x{self.m_y}")


@dataclass(frozen=True)
class BudgetReport:
    scheme: str
    n_sites: int
    capacity: int
    fits: bool
    # pixels spent on each OPO
    redundancy: int

    @property
    def message(self) -> str:
        verdict = "fits" if self.fits else "exceeds"
        return (f"{self.scheme}: N={self.n_sites} {verdict} capacity {self.capacity} "
                f"({self.redundancy} pixel(s) per OPO)")


def validate_budget(op: CouplingOperator, budget: PixelBudget) -> BudgetReport:
    """
    Check whether the operator fits on the SLM.

    Fourier-plane (circulant) scheme: one pixel per OPO, N <= M_x * M_y.
    Vector-matrix (dense) scheme: one column of M_y pixels per OPO, N <= M_x.
    """
    if op.is_circulant:
        capacity = budget.m_x * budget.m_y
        redundancy = 1
    else:
        capacity = budget.m_x
        redundancy = budget.m_y
    return BudgetReport(
        scheme=op.variant.value,
        n_sites=op.n_sites,
        capacity=capacity,
        fits=op.n_sites <= capacity,
        redundancy=redundancy,
    )
