"""The inverse problem: from samples to couplings and fields."""

from spin_inverse.inversion.estimators import (
    EmpiricalMoments,
    MatrixInversion,
    cw_invert,
    cw_moments_from_sample,
    degrees_of_freedom,
    estimate,
    estimate_replicates,
    ms_invert,
    ms_moments_from_sample,
    stable_atanh,
)
from spin_inverse.inversion.linalg import gauss_jordan_inverse

__all__ = [
    "EmpiricalMoments",
    "MatrixInversion",
    "cw_invert",
    "cw_moments_from_sample",
    "degrees_of_freedom",
    "estimate",
    "estimate_replicates",
    "gauss_jordan_inverse",
    "ms_invert",
    "ms_moments_from_sample",
    "stable_atanh",
]
