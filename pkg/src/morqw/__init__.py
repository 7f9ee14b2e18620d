"""Steady-state magneto-optical rotation in a four-level GaAs quantum-well waveguide."""

from .core import (
    DensityMatrix,
    Susceptibilities,
    SystemParams,
    Transmission,
    validate_params,
    zeeman_from_field,
)
from .liouville import build_generator, evolve, residual, steady_state
from .optics import (
    analytic_susceptibilities,
    analytic_transmission,
    birefringence_dichroism,
    susceptibilities,
    transmission,
)
from .sweep import SweepAxis, figure_preset, run_sweep

__all__ = [
    "DensityMatrix",
    "Susceptibilities",
    "SystemParams",
    "Transmission",
    "SweepAxis",
    "analytic_susceptibilities",
    "analytic_transmission",
    "birefringence_dichroism",
    "build_generator",
    "evolve",
    "figure_preset",
    "residual",
    "run_sweep",
    "steady_state",
    "susceptibilities",
    "transmission",
    "validate_params",
    "zeeman_from_field",
]
