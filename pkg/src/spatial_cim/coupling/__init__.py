"""Coupling operators realised by the intracavity SLM."""
from .operator import (
    CouplingOperator,
    CouplingVariant,
    apply,
    spectral_radius,
    threshold_from_radius,
    threshold_pump,
)
from .budget import BudgetReport, PixelBudget, validate_budget

__all__ = [
    "BudgetReport",
    "CouplingOperator",
    "CouplingVariant",
    "PixelBudget",
    "apply",
    "spectral_radius",
    "threshold_from_radius",
    "threshold_pump",
    "validate_budget",
]
