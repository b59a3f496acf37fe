"""Independent draws from an exact magnetization distribution."""

import numpy as np

from spin_inverse.errors import ResourceError
from spin_inverse.gibbs.distribution import restrict_to_well
from spin_inverse.models import MagnetizationDistribution, MagnetizationSample, SamplerConfig
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

EXPANSION_LIMIT = 20


def make_generator(seed: int) -> np.random.Generator:
    """Philox counter-based generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


class InverseCdfSampler:
    """Binary search over the cumulative table of a distribution.

    The table is built once, O(S); each draw costs O(log S).
    """

    def __init__(self, dist: MagnetizationDistribution):
        self.dist = dist
        cumulative = np.cumsum(dist.probabilities)
        self.cumulative = cumulative / cumulative[-1]

    def indices(self, generator: np.random.Generator, count: int) -> np.ndarray:
        """Support indices of ``count`` draws, in draw order."""
        uniforms = generator.random(count)
        found = np.searchsorted(self.cumulative, uniforms, side="right")
        return np.minimum(found, len(self.cumulative) - 1)

    def draw(self, generator: np.random.Generator, count: int) -> MagnetizationSample:
        picked = self.indices(generator, count)
        return MagnetizationSample(group_sizes=self.dist.group_sizes, counts=self.dist.counts[picked])


def sample(dist: MagnetizationDistribution, config: SamplerConfig) -> MagnetizationSample:
    """M i.i.d. draws, restricted to ``config.well`` when one is given.

    The output is a pure function of (distribution, M, seed).
    """
    if config.well is not None:
        dist = restrict_to_well(dist, config.well)
    sampler = InverseCdfSampler(dist)
    drawn = sampler.draw(make_generator(config.seed), config.sample_count)
    logger.debug(f"Drew {config.sample_count:,} samples with seed {config.seed}")
    return drawn


def expand_configurations(sample: MagnetizationSample, max_spins: int = EXPANSION_LIMIT) -> np.ndarray:
    """Explicit +-1 configurations, one row per draw.

    Within each group the first c spins are up, c being the drawn up-spin
    count; groups are laid out in order.

    Raises:
        ResourceError: if the total number of spins exceeds ``max_spins``
    """
    total = sum(sample.group_sizes)
    if total > max_spins:
        raise ResourceError(f"expanding {total} spins per draw exceeds the limit of {max_spins}")
    blocks = []
    for l, n in enumerate(sample.group_sizes):
        position = np.arange(n)[None, :]
        blocks.append(np.where(position < sample.counts[:, l:l + 1], 1, -1))
    return np.hstack(blocks).astype(np.int8)
