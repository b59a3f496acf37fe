"""Brute-force moments by summing over every spin configuration.

Independent of the magnetization-spectrum reduction: the Hamiltonian is
evaluated spin by spin with the full N x N coupling matrix.
"""

import numpy as np
from scipy.special import logsumexp

from spin_inverse.errors import ResourceError
from spin_inverse.gibbs.distribution import moments_from_table
from spin_inverse.models import CwParams, ExactMoments, ModelParams, validate
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

MAX_SPINS = 20
CHUNK_BITS = 16


def _spin_couplings(params: ModelParams):
    """Full per-spin coupling matrix J_ij / N, per-spin fields and group labels."""
    if isinstance(params, CwParams):
        params = params.as_multispecies()
    labels = np.repeat(np.arange(params.k), params.group_sizes)
    J = params.coupling_array()[np.ix_(labels, labels)] / params.total_spins
    h = params.field_array()[labels]
    return params, J, h, labels


def _configurations(start: int, stop: int, n: int) -> np.ndarray:
    """Spin configurations start..stop-1, bit i of the index giving spin i (1 -> +1)."""
    index = np.arange(start, stop, dtype=np.int64)
    bits = (index[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return 2.0 * bits - 1.0


def brute_force_moments(params: ModelParams) -> ExactMoments:
    """Moments from exp(-H) summed over all 2^N configurations.

    -H = 1/(2N) sum_ij J_g(i)g(j) s_i s_j + sum_i h_g(i) s_i

    Raises:
        ResourceError: if N > 20
    """
    validate(params)
    n = params.total_spins
    if n > MAX_SPINS:
        raise ResourceError(f"brute-force enumeration is limited to {MAX_SPINS} spins, got {n}")

    ms, J, h, labels = _spin_couplings(params)
    sizes = np.array(ms.group_sizes, dtype=float)
    total = 1 << n
    chunk = 1 << CHUNK_BITS

    log_weights = np.empty(total)
    magnetizations = np.empty((total, ms.k))
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        spins = _configurations(start, stop, n)
        log_weights[start:stop] = 0.5 * np.einsum("ci,ij,cj->c", spins, J, spins) + spins @ h
        for l in range(ms.k):
            magnetizations[start:stop, l] = spins[:, labels == l].sum(axis=1) / sizes[l]

    probabilities = np.exp(log_weights - logsumexp(log_weights))
    logger.debug(f"Brute-force enumeration over {total:,} configurations")
    return moments_from_table(probabilities, magnetizations, ms.group_sizes)
