"""Exact finite-size equilibrium distribution over the magnetization spectrum.

Mean-field Hamiltonians depend on a configuration only through the group
magnetizations, so the Gibbs measure collapses onto the grid of up-spin
counts (c_1, ..., c_k) with multiplicity prod_l binomial(N_l, c_l).
"""

import itertools
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from spin_inverse.errors import DegenerateRestrictionError, NumericalError, ResourceError
from spin_inverse.meanfield.solver import basin_labels, stable_solutions
from spin_inverse.models import (
    CwParams,
    ExactMoments,
    MagnetizationDistribution,
    MeanFieldSolution,
    ModelParams,
    validate,
)
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_CELL_BUDGET = 10**8
WELL_MATCH_TOLERANCE = 1e-6
SUM_CHUNK = 1 << 20


def log_binomial(n: int, c: np.ndarray) -> np.ndarray:
    """log binomial(n, c) through the log-gamma function, symmetric in c <-> n - c."""
    c = np.asarray(c, dtype=float)
    return gammaln(n + 1.0) - (gammaln(c + 1.0) + gammaln(n - c + 1.0))


def compensated_sum(values: np.ndarray) -> float:
    """Correctly rounded sum, independent of summation order.

    The values are fed to fsum in slices of SUM_CHUNK so only one slice is
    ever held as Python floats.
    """
    flat = np.asarray(values, dtype=float).ravel()
    return math.fsum(
        itertools.chain.from_iterable(
            flat[start:start + SUM_CHUNK].tolist() for start in range(0, flat.size, SUM_CHUNK)
        )
    )


def _normalize(log_weights: np.ndarray):
    """Probabilities and log Z from log weights via a max-shifted sum."""
    log_partition = float(logsumexp(log_weights))
    probabilities = np.exp(log_weights - log_partition)
    probabilities = probabilities / compensated_sum(probabilities)
    return probabilities, log_partition


def _check_budget(shape, cell_budget: int) -> int:
    cells = math.prod(shape)
    if cells > cell_budget:
        raise ResourceError(
            f"magnetization grid has {cells:,} cells, above the budget of {cell_budget:,}"
        )
    return cells


def cw_distribution(
    params: CwParams,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> MagnetizationDistribution:
    """Exact distribution of m_N for the Curie-Weiss model.

    The weight of up-spin count c is binomial(N, c) exp(N (J/2 m^2 + h m)),
    m = (2c - N) / N.
    """
    validate(params)
    n = params.n_spins
    _check_budget((n + 1,), cell_budget)

    counts = np.arange(n + 1)
    m = (2.0 * counts - n) / n
    log_weights = log_binomial(n, counts) + n * (0.5 * params.coupling * m * m + params.field * m)
    probabilities, log_partition = _normalize(log_weights)

    logger.debug(f"Curie-Weiss distribution N={n}, J={params.coupling}, h={params.field}")
    return MagnetizationDistribution(
        model=params,
        shape=(n + 1,),
        counts=counts.reshape(-1, 1),
        log_weights=log_weights,
        probabilities=probabilities,
        log_partition=log_partition,
    )


def ms_distribution(
    params: ModelParams,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> MagnetizationDistribution:
    """Exact distribution over the k-dimensional grid of group magnetizations.

    -H = N (1/2 <J D m, D m> + <h, D m>) with D = D_alpha.

    Raises:
        ResourceError: if prod(N_l + 1) exceeds ``cell_budget``
    """
    validate(params)
    if isinstance(params, CwParams):
        params = params.as_multispecies()
    sizes = params.group_sizes
    shape = tuple(n + 1 for n in sizes)
    cells = _check_budget(shape, cell_budget)
    logger.info(f"Building exact distribution over {cells:,} cells for sizes {sizes}")

    counts = np.indices(shape).reshape(len(shape), -1).T
    sizes_arr = np.array(sizes, dtype=float)
    m = (2.0 * counts - sizes_arr) / sizes_arr
    x = m * params.fractions.array
    J = params.coupling_array()
    quadratic = np.einsum("si,ij,sj->s", x, J, x)
    linear = x @ params.field_array()

    log_weights = params.total_spins * (0.5 * quadratic + linear)
    for l, n in enumerate(sizes):
        log_weights = log_weights + log_binomial(n, np.arange(n + 1))[counts[:, l]]
    probabilities, log_partition = _normalize(log_weights)

    return MagnetizationDistribution(
        model=params,
        shape=shape,
        counts=counts,
        log_weights=log_weights,
        probabilities=probabilities,
        log_partition=log_partition,
    )


def distribution_for(
    params: ModelParams,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> MagnetizationDistribution:
    """cw_distribution for CwParams, ms_distribution otherwise."""
    if isinstance(params, CwParams):
        return cw_distribution(params, cell_budget)
    return ms_distribution(params, cell_budget)


def moments_from_table(
    probabilities: np.ndarray,
    magnetizations: np.ndarray,
    group_sizes,
) -> ExactMoments:
    """Moments of a probability table over magnetization vectors.

    chi_N[l, s] = N_s (w(m_l m_s) - w(m_l) w(m_s)), accumulated around the
    mean with compensated sums.
    """
    k = magnetizations.shape[1]
    p = np.asarray(probabilities, dtype=float)
    mean = np.array([compensated_sum(p * magnetizations[:, l]) for l in range(k)])
    second = np.empty((k, k))
    covariance = np.empty((k, k))
    centered = magnetizations - mean
    for l in range(k):
        for s in range(l, k):
            second[l, s] = second[s, l] = compensated_sum(p * magnetizations[:, l] * magnetizations[:, s])
            covariance[l, s] = covariance[s, l] = compensated_sum(p * centered[:, l] * centered[:, s])
    chi = covariance * np.array(group_sizes, dtype=float)[None, :]
    return ExactMoments(mean=mean, second=second, finite_size_chi=chi)


def exact_moments(dist: MagnetizationDistribution) -> ExactMoments:
    """Exact w(m_l), w(m_l m_s) and chi_N of a distribution."""
    return moments_from_table(dist.probabilities, dist.magnetizations, dist.group_sizes)


def marginal(dist: MagnetizationDistribution, group: int) -> np.ndarray:
    """Probabilities of the up-spin count of one group, length N_group + 1."""
    table = dist.probabilities.reshape(dist.shape)
    other_axes = tuple(axis for axis in range(dist.k) if axis != group)
    return table.sum(axis=other_axes) if other_axes else table.copy()


def _matching_index(solution: MeanFieldSolution, attractors) -> Optional[int]:
    for index, candidate in enumerate(attractors):
        if np.max(np.abs(candidate.vector - solution.vector)) < WELL_MATCH_TOLERANCE:
            return index
    return None


def restrict_to_well(
    dist: MagnetizationDistribution,
    solution: MeanFieldSolution,
) -> MagnetizationDistribution:
    """Condition the distribution on the basin of one stable solution.

    Each support point belongs to the stable solution the damped mean-field
    map carries it to. With a single stable solution the distribution is
    returned unchanged.

    Raises:
        NumericalError: if ``solution`` is not a stable solution of the model
        DegenerateRestrictionError: if the well holds no probability
    """
    if not solution.stable:
        raise NumericalError(f"well restriction needs a stable solution, got {solution.magnetization}")
    attractors = stable_solutions(dist.model)
    index = _matching_index(solution, attractors)
    if index is None:
        raise NumericalError(f"{solution.magnetization} is not a stable solution of this model")
    if len(attractors) == 1:
        return dist

    labels = basin_labels(dist.magnetizations, dist.model, attractors)
    inside = labels == index
    if not np.any(inside):
        raise DegenerateRestrictionError(f"no support cell belongs to the well at {solution.magnetization}")

    log_weights = np.where(inside, dist.log_weights, -np.inf)
    if not np.any(np.isfinite(log_weights)):
        raise DegenerateRestrictionError(f"the well at {solution.magnetization} carries no weight")
    probabilities, log_partition = _normalize(log_weights)
    logger.info(
        f"Restricted to well {solution.magnetization}: {int(inside.sum()):,} of "
        f"{dist.support_size:,} cells"
    )
    return dist.model_copy(update={
        "log_weights": log_weights,
        "probabilities": probabilities,
        "log_partition": log_partition,
        "well": solution.magnetization,
    })
