"""Exact finite-size equilibrium: distributions, moments, well restriction."""

from spin_inverse.gibbs.distribution import (
    DEFAULT_CELL_BUDGET,
    cw_distribution,
    distribution_for,
    exact_moments,
    marginal,
    ms_distribution,
    restrict_to_well,
)
from spin_inverse.gibbs.oracle import brute_force_moments

__all__ = [
    "DEFAULT_CELL_BUDGET",
    "brute_force_moments",
    "cw_distribution",
    "distribution_for",
    "exact_moments",
    "marginal",
    "ms_distribution",
    "restrict_to_well",
]
