"""Parametric amplification in the nonlinear medium."""
from .units import NormalizedUnits
from .nlm import (
    DEFAULT_STEPS,
    PolarState,
    SitePair,
    from_polar,
    integrate_fields,
    integrate_pass,
    integrate_pass_polar,
    to_polar,
    wrap_phase,
)

__all__ = [
    "DEFAULT_STEPS",
    "NormalizedUnits",
    "PolarState",
    "SitePair",
    "from_polar",
    "integrate_fields",
    "integrate_pass",
    "integrate_pass_polar",
    "to_polar",
    "wrap_phase",
]
