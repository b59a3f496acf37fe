"""Tests for exact sampling and seed derivation."""

import math

import numpy as np
import pytest
from scipy import stats

from spin_inverse.errors import ResourceError
from spin_inverse.experiments.powerlaw import powerlaw_fit
from spin_inverse.gibbs import cw_distribution, exact_moments, ms_distribution
from spin_inverse.inversion.estimators import cw_moments_from_sample
from spin_inverse.meanfield import stable_solutions
from spin_inverse.models import CwParams, MagnetizationSample, MsParams, SamplerConfig
from spin_inverse.sampling import (
    InverseCdfSampler,
    expand_configurations,
    make_generator,
    mix_seed,
    replicate_seeds,
    sample,
)


@pytest.fixture(scope="module")
def paramagnet():
    """Exact distribution at N=10000, J=0.6, h=0.1."""
    return cw_distribution(CwParams(n_spins=10000, coupling=0.6, field=0.1))


def test_point_mass_always_drawn():
    """Test that a saturated distribution only produces m=1."""
    dist = cw_distribution(CwParams(n_spins=3, coupling=0.0, field=30.0))
    drawn = sample(dist, SamplerConfig(sample_count=1000, seed=1))
    assert np.all(drawn.values == 1.0)


def test_two_spin_frequencies():
    """Test N=2, J=0 frequencies within 4 multinomial standard deviations."""
    dist = cw_distribution(CwParams(n_spins=2, coupling=0.0, field=0.0))
    m = 10**6
    drawn = sample(dist, SamplerConfig(sample_count=m, seed=42))
    observed = np.bincount(drawn.counts[:, 0], minlength=3) / m
    for p_hat, p in zip(observed, (0.25, 0.5, 0.25)):
        assert abs(p_hat - p) <= 4 * math.sqrt(p * (1 - p) / m)


def test_same_seed_same_sample(paramagnet):
    """Test that the sample is a pure function of distribution, M and seed."""
    config = SamplerConfig(sample_count=5000, seed=123456789)
    first = sample(paramagnet, config)
    second = sample(paramagnet, config)
    np.testing.assert_array_equal(first.counts, second.counts)
    other = sample(paramagnet, SamplerConfig(sample_count=5000, seed=987654321))
    assert not np.array_equal(first.counts, other.counts)


def test_prefix_stability(paramagnet):
    """Test that a shorter sample is a prefix of a longer one with the same seed."""
    short = sample(paramagnet, SamplerConfig(sample_count=100, seed=5))
    long = sample(paramagnet, SamplerConfig(sample_count=1000, seed=5))
    np.testing.assert_array_equal(short.counts, long.counts[:100])


@pytest.mark.parametrize("seed", [1, 20170101, 2**63 + 11])
def test_chi_square_goodness_of_fit(seed):
    """Test empirical frequencies against the exact table with a chi-square test."""
    dist = cw_distribution(CwParams(n_spins=100, coupling=0.6, field=0.1))
    m = 10**6
    drawn = sample(dist, SamplerConfig(sample_count=m, seed=seed))
    observed = np.bincount(drawn.counts[:, 0], minlength=dist.support_size)
    expected = m * dist.probabilities
    keep = expected >= 5
    pooled_observed = np.append(observed[keep], observed[~keep].sum())
    pooled_expected = np.append(expected[keep], expected[~keep].sum())
    statistic = float(np.sum((pooled_observed - pooled_expected) ** 2 / pooled_expected))
    p_value = stats.chi2.sf(statistic, df=len(pooled_observed) - 1)
    assert p_value > 1e-3


def test_sample_mean_near_exact_mean(paramagnet):
    """Test the sample mean lies within 4 sqrt(chi_N / (N M)) of m_N."""
    moments = exact_moments(paramagnet)
    m = 20000
    drawn = sample(paramagnet, SamplerConfig(sample_count=m, seed=2017))
    m_exp, _ = cw_moments_from_sample(drawn)
    assert abs(m_exp - moments.m_n) <= 4 * math.sqrt(moments.chi_n / (10000 * m))


def test_sample_mean_spread_decays_as_inverse_root(paramagnet):
    """Test std of the sample mean across seeds scales like M^-1/2."""
    counts = [100, 1000, 10000]
    spreads = []
    for count in counts:
        means = [
            cw_moments_from_sample(sample(paramagnet, SamplerConfig(sample_count=count, seed=seed)))[0]
            for seed in replicate_seeds(77 + count, 40)
        ]
        spreads.append(float(np.std(means, ddof=1)))
    fit = powerlaw_fit(counts, spreads)
    assert -0.7 <= fit.exponent <= -0.3


def test_multispecies_sample_shape():
    """Test draws from a two-group grid are stored per group."""
    params = MsParams(group_sizes=(10, 20), coupling_matrix=((1.0, 0.2), (0.2, 0.8)), field_vector=(0.1, 0.0))
    drawn = sample(ms_distribution(params), SamplerConfig(sample_count=300, seed=9))
    assert drawn.counts.shape == (300, 2)
    assert drawn.group_sizes == (10, 20)
    assert np.all(drawn.counts <= np.array([10, 20]))


def test_well_restricted_sampling():
    """Test that draws restricted to the positive well are all non-negative."""
    params = CwParams(n_spins=200, coupling=1.5, field=0.0)
    positive = stable_solutions(params)[-1]
    config = SamplerConfig(sample_count=5000, seed=3, well=positive)
    drawn = sample(cw_distribution(params), config)
    assert np.all(drawn.values[:, 0] >= 0.0)
    assert np.mean(drawn.values) == pytest.approx(positive.magnetization[0], abs=0.05)


def test_inverse_cdf_indices_in_range():
    """Test that a uniform near 1 maps to the last support index."""
    dist = cw_distribution(CwParams(n_spins=4, coupling=0.5, field=0.0))
    sampler = InverseCdfSampler(dist)
    assert sampler.cumulative[-1] == 1.0
    indices = sampler.indices(make_generator(0), 10000)
    assert indices.min() >= 0
    assert indices.max() <= 4


def test_mix_seed_deterministic_and_spread():
    """Test seed mixing is stable and separates nearby inputs."""
    assert mix_seed(20170101, 0) == mix_seed(20170101, 0)
    assert mix_seed(20170101, 0) != mix_seed(20170101, 1)
    assert mix_seed(20170101, 0) != mix_seed(20170102, 0)
    assert 0 <= mix_seed(2**64 - 1, 5) < 2**64


def test_replicate_seeds_distinct():
    """Test replicate seeds are distinct and extend as a prefix."""
    seeds = replicate_seeds(1, 1000)
    assert len(set(seeds)) == 1000
    assert replicate_seeds(1, 10) == seeds[:10]


def test_replicate_seeds_validation():
    """Test invalid counts and seeds are refused."""
    with pytest.raises(ValueError):
        replicate_seeds(1, 0)
    with pytest.raises(ValueError):
        replicate_seeds(-1, 3)


def test_expand_configurations():
    """Test explicit spins reproduce the drawn group magnetizations."""
    drawn = MagnetizationSample(group_sizes=(3, 2), counts=[[0, 2], [3, 1], [1, 0]])
    spins = expand_configurations(drawn)
    assert spins.shape == (3, 5)
    assert spins.dtype == np.int8
    np.testing.assert_array_equal(spins[:, :3].mean(axis=1), drawn.values[:, 0])
    np.testing.assert_array_equal(spins[:, 3:].mean(axis=1), drawn.values[:, 1])


def test_expand_configurations_limit():
    """Test that large systems are not expanded."""
    drawn = MagnetizationSample(group_sizes=(21,), counts=[[4]])
    with pytest.raises(ResourceError):
        expand_configurations(drawn)
