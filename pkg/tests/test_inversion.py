"""Tests for the maximum-likelihood estimators."""

import math

import numpy as np
import pytest

from spin_inverse.errors import (
    DegenerateMagnetizationError,
    DegenerateSusceptibilityError,
    NumericalError,
    SingularityError,
)
from spin_inverse.experiments import CASE_1, CASE_18, powerlaw_fit, run_replicates
from spin_inverse.gibbs import ms_distribution
from spin_inverse.inversion import (
    cw_invert,
    cw_moments_from_sample,
    degrees_of_freedom,
    estimate,
    estimate_replicates,
    gauss_jordan_inverse,
    ms_invert,
    ms_moments_from_sample,
    stable_atanh,
)
from spin_inverse.meanfield import chi_cw, chi_ms, limit_values, solve_cw, stable_solutions
from spin_inverse.models import CwParams, FractionVector, MagnetizationSample, MsParams, SamplerConfig
from spin_inverse.sampling import sample


@pytest.fixture(scope="module")
def case_18_sample():
    """10000 draws from case 18 with 1000 spins per group."""
    return sample(ms_distribution(CASE_18), SamplerConfig(sample_count=10000, seed=18))


def test_constant_sample_has_zero_chi():
    """Test identical draws give chi_exp = 0 exactly."""
    drawn = MagnetizationSample(group_sizes=(4,), counts=[[3]] * 50)
    assert cw_moments_from_sample(drawn) == (0.5, 0.0)


def test_balanced_single_spin_sample():
    """Test draws of -1 and +1 in equal number."""
    drawn = MagnetizationSample(group_sizes=(1,), counts=[[0], [1]] * 10)
    m_exp, chi_exp = cw_moments_from_sample(drawn)
    assert m_exp == 0.0
    assert chi_exp == 1.0


def test_cw_invert_paramagnet():
    """Test m=0, chi=2.5 gives J=0.6 and h=0."""
    coupling, field = cw_invert(0.0, 2.5)
    assert coupling == pytest.approx(0.6, abs=1e-15)
    assert field == 0.0


def test_cw_round_trip_through_limit_values():
    """Test inverting the thermodynamic (m, chi) at J=0.6, h=0.1."""
    (solution,) = solve_cw(0.6, 0.1)
    chi = chi_cw(0.6, solution).scalar
    coupling, field = cw_invert(solution.magnetization[0], chi)
    assert coupling == pytest.approx(0.6, abs=1e-10)
    assert field == pytest.approx(0.1, abs=1e-10)


@pytest.mark.parametrize("m_exp", [1.0, -1.0, math.nan])
def test_cw_invert_saturated_magnetization(m_exp):
    """Test |m_exp| >= 1 is rejected."""
    with pytest.raises(DegenerateMagnetizationError):
        cw_invert(m_exp, 1.0)


@pytest.mark.parametrize("chi_exp", [0.0, -0.5, 1e-15])
def test_cw_invert_vanishing_susceptibility(chi_exp):
    """Test chi_exp below the floor is rejected."""
    with pytest.raises(DegenerateSusceptibilityError):
        cw_invert(0.2, chi_exp)


def test_stable_atanh_accuracy():
    """Test atanh near 0 and near 1."""
    assert stable_atanh(1e-300) == 1e-300
    assert float(stable_atanh(0.5)) == pytest.approx(math.atanh(0.5), rel=1e-15)
    assert float(stable_atanh(1 - 1e-15)) == pytest.approx(math.atanh(1 - 1e-15), rel=1e-9)


def test_ms_round_trip_case_1():
    """Test the matrix estimators invert the thermodynamic moments of case 1."""
    for solution in stable_solutions(CASE_1):
        chi = chi_ms(CASE_1.fractions, CASE_1.coupling_array(), solution).array
        inverted = ms_invert(solution.vector, chi, CASE_1.fractions)
        np.testing.assert_allclose(inverted.coupling, CASE_1.coupling_array(), rtol=0, atol=1e-10)
        np.testing.assert_allclose(inverted.field, CASE_1.field_array(), rtol=0, atol=1e-10)
        assert inverted.asymmetry < 1e-10


def test_ms_invert_single_group_matches_scalar():
    """Test one-group matrix inversion is bitwise the scalar inversion."""
    for m, chi in [(0.2385, 1.9), (-0.7, 0.4), (0.0, 2.5)]:
        inverted = ms_invert(np.array([m]), np.array([[chi]]), FractionVector(fractions=(1.0,)))
        coupling, field = cw_invert(m, chi)
        assert inverted.coupling[0, 0] == coupling
        assert inverted.field[0] == field


def test_ms_constant_sample_is_degenerate():
    """Test a sample of identical vectors has a zero, singular chi_exp."""
    drawn = MagnetizationSample(group_sizes=(4, 4), counts=[[1, 3]] * 20)
    moments = ms_moments_from_sample(drawn)
    np.testing.assert_array_equal(moments.chi_exp, np.zeros((2, 2)))
    with pytest.raises(DegenerateSusceptibilityError):
        ms_invert(moments.m_exp, moments.chi_exp, FractionVector.from_sizes((4, 4)))


def test_ms_invert_singular_matrix():
    """Test perfectly correlated groups are rejected."""
    with pytest.raises(DegenerateSusceptibilityError):
        ms_invert(np.array([0.1, 0.1]), np.ones((2, 2)), FractionVector.from_sizes((5, 5)))


def test_randomized_round_trips():
    """Test solve, chi and invert recover (J, h) for random unique-regime models."""
    rng = np.random.default_rng(101)
    checked = 0
    while checked < 100:
        k = int(rng.integers(1, 4))
        J = rng.uniform(-0.6, 1.1, size=(k, k))
        J = np.triu(J, 1) + np.triu(J, 1).T + np.diag(rng.uniform(0.55, 1.2, size=k))
        h = rng.uniform(-0.3, 0.3, size=k)
        params = MsParams(
            group_sizes=tuple(int(n) for n in rng.integers(100, 2000, size=k)),
            coupling_matrix=tuple(tuple(row) for row in J.tolist()),
            field_vector=tuple(h.tolist()),
        )
        try:
            solution, chi = limit_values(params)
        except NumericalError:
            continue
        if np.linalg.cond(chi.array) > 1e4:
            continue
        inverted = ms_invert(solution.vector, chi.array, params.fractions)
        np.testing.assert_allclose(inverted.coupling, J, rtol=0, atol=1e-10)
        np.testing.assert_allclose(inverted.field, h, rtol=0, atol=1e-10)
        checked += 1


def test_gauss_jordan_matches_numpy():
    """Test the pivoted inverse against numpy on well-conditioned matrices."""
    rng = np.random.default_rng(11)
    for k in range(1, 6):
        a = rng.normal(size=(k, k)) + k * np.eye(k)
        result = gauss_jordan_inverse(a)
        np.testing.assert_allclose(result.matrix, np.linalg.inv(a), rtol=1e-12, atol=1e-12)
        expected = np.linalg.norm(a, np.inf) * np.linalg.norm(np.linalg.inv(a), np.inf)
        assert result.condition == pytest.approx(expected, rel=1e-10)


def test_gauss_jordan_needs_pivoting():
    """Test a zero leading entry is handled by row exchange."""
    result = gauss_jordan_inverse(np.array([[0.0, 2.0], [4.0, 0.0]]))
    np.testing.assert_allclose(result.matrix, [[0.0, 0.25], [0.5, 0.0]], rtol=0, atol=1e-16)


def test_gauss_jordan_singular():
    """Test a rank-deficient matrix raises."""
    with pytest.raises(SingularityError):
        gauss_jordan_inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SingularityError):
        gauss_jordan_inverse(np.zeros((3, 3)))


def test_weighted_chi_exp_symmetric(case_18_sample):
    """Test D_alpha chi_exp is symmetric for a case 18 sample."""
    chi = ms_moments_from_sample(case_18_sample).chi_exp
    weighted = CASE_18.fractions.diagonal() @ chi
    np.testing.assert_allclose(weighted, weighted.T, rtol=0, atol=1e-10)


def test_group_exchange_symmetry(case_18_sample):
    """Test relabelling the groups relabels the estimates."""
    swapped = MagnetizationSample(group_sizes=(1000, 1000), counts=case_18_sample.counts[:, ::-1])
    original = estimate(case_18_sample)
    exchanged = estimate(swapped)
    np.testing.assert_allclose(
        np.array(exchanged.j_exp), np.array(original.j_exp)[::-1, ::-1], rtol=0, atol=1e-12
    )
    np.testing.assert_allclose(exchanged.h_exp, original.h_exp[::-1], rtol=0, atol=1e-12)


def test_spin_flip_covariance(case_18_sample):
    """Test flipping every spin keeps J_exp and negates h_exp."""
    flipped = MagnetizationSample(group_sizes=(1000, 1000), counts=1000 - case_18_sample.counts)
    original = estimate(case_18_sample)
    mirrored = estimate(flipped)
    np.testing.assert_allclose(mirrored.j_exp, original.j_exp, rtol=0, atol=1e-12)
    np.testing.assert_allclose(mirrored.h_exp, -np.array(original.h_exp), rtol=0, atol=1e-12)


def test_degrees_of_freedom():
    """Test k(k+3)/2 estimated quantities."""
    assert [degrees_of_freedom(k) for k in (1, 2, 3, 4)] == [2, 5, 9, 14]


def test_estimate_replicates_statistics():
    """Test replicate means and (R - 1) standard deviations."""
    samples = [
        MagnetizationSample(group_sizes=(10,), counts=[[c] for c in counts])
        for counts in ([4, 5, 6, 7], [5, 6, 7, 8], [3, 5, 6, 6])
    ]
    result = estimate_replicates(samples)
    singles = [estimate(s).j_exp[0][0] for s in samples]
    assert result.replicate_count == 3
    assert result.j_exp[0][0] == pytest.approx(np.mean(singles), abs=1e-14)
    assert result.std.j_exp[0][0] == pytest.approx(np.std(singles, ddof=1), abs=1e-14)

    single = estimate_replicates(samples[:1])
    assert single.std is None
    assert single.replicate_count == 1


def test_estimate_replicates_empty():
    """Test an empty replicate list is refused."""
    with pytest.raises(ValueError):
        estimate_replicates([])


@pytest.mark.slow
def test_coupling_spread_decays_with_sample_size():
    """Test std of J_exp over replicates scales like M^-1/2."""
    params = CwParams(n_spins=10000, coupling=0.6, field=0.1)
    counts = [1000, 10000, 100000]
    spreads = [run_replicates(params, m, 20, 20170101 + m).std for m in counts]
    j_fit = powerlaw_fit(counts, [s.j_exp[0][0] for s in spreads])
    h_fit = powerlaw_fit(counts, [s.h_exp[0] for s in spreads])
    assert -0.6 <= j_fit.exponent <= -0.4
    assert -0.6 <= h_fit.exponent <= -0.4
