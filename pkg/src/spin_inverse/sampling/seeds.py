"""Deterministic seed derivation for replicates."""

from typing import List

import numpy as np

SEED_MODULUS = 2**64


def mix_seed(base_seed: int, index: int) -> int:
    """64-bit seed for replicate ``index`` of ``base_seed``.

    The SeedSequence hash of (base_seed, spawn key (index,)), first uint64
    word of its generated state.
    """
    sequence = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def replicate_seeds(base_seed: int, count: int) -> List[int]:
    """``count`` pairwise distinct seeds derived from ``base_seed``.

    Seed r is mix_seed(base_seed, r); a collision (never observed, but not
    excluded by the hash) moves on to the next free index.
    """
    if count < 1:
        raise ValueError("replicate count must be at least 1")
    if not 0 <= base_seed < SEED_MODULUS:
        raise ValueError("base seed must be a 64-bit unsigned integer")
    seeds: List[int] = []
    seen = set()
    index = 0
    while len(seeds) < count:
        seed = mix_seed(base_seed, index)
        index += 1
        if seed in seen:
            continue
        seen.add(seed)
        seeds.append(seed)
    return seeds
