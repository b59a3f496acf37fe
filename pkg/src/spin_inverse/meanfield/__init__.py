"""Thermodynamic-limit machinery: fixed points, stability, susceptibility."""

from spin_inverse.meanfield.solver import (
    basin_labels,
    solve_cw,
    solve_model,
    solve_ms,
    spectral_radius,
    stable_solutions,
)
from spin_inverse.meanfield.susceptibility import (
    chi_cw,
    chi_model,
    chi_ms,
    forward_report,
    limit_values,
)

__all__ = [
    "basin_labels",
    "chi_cw",
    "chi_model",
    "chi_ms",
    "forward_report",
    "limit_values",
    "solve_cw",
    "solve_model",
    "solve_ms",
    "spectral_radius",
    "stable_solutions",
]
