"""Reproducible sampling from exact distributions."""

from spin_inverse.sampling.sampler import (
    InverseCdfSampler,
    expand_configurations,
    make_generator,
    sample,
)
from spin_inverse.sampling.seeds import mix_seed, replicate_seeds

__all__ = [
    "InverseCdfSampler",
    "expand_configurations",
    "make_generator",
    "mix_seed",
    "replicate_seeds",
    "sample",
]
