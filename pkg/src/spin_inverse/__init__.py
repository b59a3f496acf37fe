"""
Spin Inverse

Forward and inverse problems for Curie-Weiss and multi-species mean-field
spin models:
- Exact finite-size equilibrium distributions over the magnetization spectrum
- Mean-field fixed points, stability and susceptibility
- Reproducible sampling of independent magnetization draws
- Maximum-likelihood inference of couplings and fields
- Finite-size and sample-size scaling studies and recovery sweeps
"""

__version__ = "0.1.0"
__author__ = "Spin Inverse Team"

from spin_inverse.errors import (
    ModelValidationError,
    NumericalError,
    ResourceError,
    SpinInverseError,
    UsageError,
)
from spin_inverse.gibbs import (
    brute_force_moments,
    cw_distribution,
    exact_moments,
    ms_distribution,
    restrict_to_well,
)
from spin_inverse.inversion import (
    cw_invert,
    cw_moments_from_sample,
    estimate,
    estimate_replicates,
    ms_invert,
    ms_moments_from_sample,
)
from spin_inverse.meanfield import chi_cw, chi_ms, solve_cw, solve_ms
from spin_inverse.models import (
    CwParams,
    EstimationResult,
    FractionVector,
    MagnetizationDistribution,
    MagnetizationSample,
    MeanFieldSolution,
    MsParams,
    SamplerConfig,
    validate,
)
from spin_inverse.sampling import replicate_seeds, sample

__all__ = [
    # Types
    "CwParams",
    "MsParams",
    "FractionVector",
    "MagnetizationSample",
    "MagnetizationDistribution",
    "MeanFieldSolution",
    "SamplerConfig",
    "EstimationResult",
    "validate",
    # Forward problem
    "cw_distribution",
    "ms_distribution",
    "exact_moments",
    "restrict_to_well",
    "brute_force_moments",
    "solve_cw",
    "solve_ms",
    "chi_cw",
    "chi_ms",
    # Sampling
    "sample",
    "replicate_seeds",
    # Inverse problem
    "cw_moments_from_sample",
    "cw_invert",
    "ms_moments_from_sample",
    "ms_invert",
    "estimate",
    "estimate_replicates",
    # Errors
    "SpinInverseError",
    "ModelValidationError",
    "NumericalError",
    "ResourceError",
    "UsageError",
]
