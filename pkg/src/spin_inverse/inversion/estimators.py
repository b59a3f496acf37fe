"""Maximum-likelihood estimators of the couplings and fields.

The likelihood is maximal where the model's first and second moments match
the empirical ones; composing that condition with the mean-field inversion
formulas gives closed-form estimators:

    J = (P^-1 - chi^-1) D_alpha^-1,    h = atanh(m) - J D_alpha m
"""

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from spin_inverse.errors import (
    DegenerateMagnetizationError,
    DegenerateSusceptibilityError,
    SingularityError,
)
from spin_inverse.inversion.linalg import gauss_jordan_inverse
from spin_inverse.models import (
    EstimateSet,
    EstimationResult,
    FractionVector,
    MagnetizationSample,
)
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

SUSCEPTIBILITY_FLOOR = 1e-14


class EmpiricalMoments(NamedTuple):
    m_exp: np.ndarray
    chi_exp: np.ndarray
    p_exp: np.ndarray


class MatrixInversion(NamedTuple):
    coupling: np.ndarray
    field: np.ndarray
    asymmetry: float
    condition: float


def stable_atanh(m):
    """atanh(m) = 1/2 log1p(2m / (1 - m)), accurate near 0 and near +-1."""
    m = np.asarray(m, dtype=float)
    return 0.5 * np.log1p(2.0 * m / (1.0 - m))


def _check_magnetization(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)) or np.any(np.abs(m) >= 1.0):
        raise DegenerateMagnetizationError(
            f"empirical magnetization {np.round(m, 15).tolist()} has |m| >= 1; "
            "the sample is saturated"
        )


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / len(values)


def cw_moments_from_sample(sample: MagnetizationSample, n_spins: Optional[int] = None) -> Tuple[float, float]:
    """m_exp = mean of m, chi_exp = N (mean of m^2 - m_exp^2).

    The variance is accumulated around m_exp, so identical draws give
    exactly zero.
    """
    if sample.k != 1:
        raise ValueError(f"expected a single-group sample, got k={sample.k}")
    n = n_spins if n_spins is not None else sample.group_sizes[0]
    m = sample.values[:, 0]
    m_exp = _mean(m)
    chi_exp = n * _mean((m - m_exp) ** 2)
    return m_exp, chi_exp


def ms_moments_from_sample(sample: MagnetizationSample) -> EmpiricalMoments:
    """m_l,exp, chi_ls,exp = N_s Cov(m_l, m_s) and P_exp = diag(1 - m_l,exp^2)."""
    values = sample.values
    k = sample.k
    m_exp = np.array([_mean(values[:, l]) for l in range(k)])
    centered = values - m_exp
    covariance = np.empty((k, k))
    for l in range(k):
        for s in range(l, k):
            covariance[l, s] = covariance[s, l] = _mean(centered[:, l] * centered[:, s])
    chi_exp = covariance * np.array(sample.group_sizes, dtype=float)[None, :]
    return EmpiricalMoments(m_exp=m_exp, chi_exp=chi_exp, p_exp=np.diag(1.0 - m_exp**2))


def cw_invert(m_exp: float, chi_exp: float) -> Tuple[float, float]:
    """J_exp = 1/(1 - m^2) - 1/chi and h_exp = atanh(m) - J_exp m.

    Raises:
        DegenerateMagnetizationError: if |m_exp| >= 1
        DegenerateSusceptibilityError: if chi_exp < 1e-14
    """
    _check_magnetization(np.array([m_exp]))
    if not math.isfinite(chi_exp) or chi_exp < SUSCEPTIBILITY_FLOOR:
        raise DegenerateSusceptibilityError(f"empirical susceptibility {chi_exp!r} is not positive")
    coupling = 1.0 / (1.0 - m_exp * m_exp) - 1.0 / chi_exp
    field = float(stable_atanh(m_exp)) - coupling * m_exp
    return coupling, field


def ms_invert(m_exp: np.ndarray, chi_exp: np.ndarray, alpha: FractionVector) -> MatrixInversion:
    """Matrix estimators, with J_exp symmetrized.

    ``asymmetry`` is max |J_ls - J_sl| before symmetrization, ``condition``
    the infinity-norm condition number of chi_exp.

    Raises:
        DegenerateMagnetizationError: if some |m_l,exp| >= 1
        DegenerateSusceptibilityError: if chi_exp is singular
    """
    m = np.asarray(m_exp, dtype=float)
    _check_magnetization(m)
    try:
        inverse = gauss_jordan_inverse(chi_exp)
    except SingularityError as e:
        raise DegenerateSusceptibilityError(f"empirical susceptibility matrix is singular: {e}") from e

    raw = (np.diag(1.0 / (1.0 - m * m)) - inverse.matrix) * (1.0 / alpha.array)[None, :]
    asymmetry = float(np.max(np.abs(raw - raw.T)))
    coupling = 0.5 * (raw + raw.T)
    field = stable_atanh(m) - coupling @ (alpha.array * m)
    if asymmetry > 0.0:
        logger.debug(f"Symmetrized J_exp, asymmetry {asymmetry:.3e}")
    return MatrixInversion(coupling=coupling, field=field, asymmetry=asymmetry, condition=inverse.condition)


def degrees_of_freedom(k: int) -> int:
    """Independent parameters of a k-group model: k(k+1)/2 couplings plus k fields."""
    return k * (k + 3) // 2


def _estimate_one(sample: MagnetizationSample) -> Tuple[EstimateSet, float, float]:
    if sample.k == 1:
        m_exp, chi_exp = cw_moments_from_sample(sample)
        coupling, field = cw_invert(m_exp, chi_exp)
        estimates = EstimateSet(m_exp=[m_exp], chi_exp=[[chi_exp]], j_exp=[[coupling]], h_exp=[field])
        return estimates, 0.0, 1.0

    moments = ms_moments_from_sample(sample)
    alpha = FractionVector.from_sizes(sample.group_sizes)
    inverted = ms_invert(moments.m_exp, moments.chi_exp, alpha)
    estimates = EstimateSet(
        m_exp=moments.m_exp.tolist(),
        chi_exp=moments.chi_exp.tolist(),
        j_exp=inverted.coupling.tolist(),
        h_exp=inverted.field.tolist(),
    )
    return estimates, inverted.asymmetry, inverted.condition


def estimate(sample: MagnetizationSample) -> EstimationResult:
    """Empirical moments and inferred parameters of one sample."""
    estimates, asymmetry, condition = _estimate_one(sample)
    return EstimationResult(
        mean=estimates,
        replicates=[estimates],
        max_asymmetry=asymmetry,
        max_condition=condition,
    )


def _reduce(sets: List[EstimateSet], reducer) -> EstimateSet:
    fields = {}
    for name in ("m_exp", "chi_exp", "j_exp", "h_exp"):
        stacked = np.array([getattr(s, name) for s in sets], dtype=float)
        fields[name] = reducer(stacked).tolist()
    return EstimateSet(**fields)


def estimate_replicates(samples: Sequence[MagnetizationSample]) -> EstimationResult:
    """Estimate every replicate, then average them in replicate order.

    The spread is the unbiased (R - 1) standard deviation; it is left unset
    for a single replicate.
    """
    if not samples:
        raise ValueError("at least one replicate is required")
    sets: List[EstimateSet] = []
    asymmetry, condition = 0.0, 1.0
    for sample in samples:
        estimates, rep_asymmetry, rep_condition = _estimate_one(sample)
        sets.append(estimates)
        asymmetry = max(asymmetry, rep_asymmetry)
        condition = max(condition, rep_condition)

    mean = _reduce(sets, lambda a: np.mean(a, axis=0))
    std = _reduce(sets, lambda a: np.std(a, axis=0, ddof=1)) if len(sets) > 1 else None
    logger.debug(f"Reduced {len(sets)} replicate estimate(s)")
    return EstimationResult(
        mean=mean,
        std=std,
        replicates=sets,
        replicate_count=len(sets),
        max_asymmetry=asymmetry,
        max_condition=condition,
    )
