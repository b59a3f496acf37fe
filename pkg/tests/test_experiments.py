"""Tests for power-law fits, scaling studies and recovery sweeps."""

import time

import numpy as np
import pytest

from spin_inverse.errors import FitDomainError, NumericalError, UsageError
from spin_inverse.experiments import (
    CASE_1,
    CASE_18,
    canonical_cases,
    cw_recovery_sweep,
    draw_cases,
    evaluate_case,
    monotonicity_study,
    ms_case_sweep,
    powerlaw_fit,
    replicate_band,
    run_jobs,
    run_replicates,
    sample_scaling_study,
    size_scaling_study,
)
from spin_inverse.experiments.cases import has_unique_stable_solution
from spin_inverse.experiments.studies import direction
from spin_inverse.models import CwParams, EstimateSet, EstimationResult, MsParams
from spin_inverse.sampling import mix_seed


def _result(j_exp, h_exp, j_std=None, h_std=None):
    k = len(h_exp)
    mean = EstimateSet(m_exp=[0.0] * k, chi_exp=[[1.0] * k] * k, j_exp=j_exp, h_exp=h_exp)
    std = None
    if j_std is not None:
        std = EstimateSet(m_exp=[0.0] * k, chi_exp=[[0.0] * k] * k, j_exp=j_std, h_exp=h_std)
    return EstimationResult(mean=mean, std=std, replicate_count=20 if std else 1)


def test_exact_power_law():
    """Test y = 2 / x is fitted exactly."""
    xs = [1.0, 2.0, 4.0, 8.0, 16.0]
    fit = powerlaw_fit(xs, [2.0 / x for x in xs])
    assert fit.amplitude == pytest.approx(2.0, rel=1e-12)
    assert fit.exponent == pytest.approx(-1.0, abs=1e-12)
    assert fit.r_squared == 1.0
    assert fit.points == 5


def test_constant_series():
    """Test a constant y has slope 0 and R^2 = 1."""
    fit = powerlaw_fit([1, 10, 100], [3.0, 3.0, 3.0])
    assert fit.exponent == pytest.approx(0.0, abs=1e-15)
    assert fit.amplitude == pytest.approx(3.0, rel=1e-14)
    assert fit.r_squared == 1.0


def test_fit_scale_covariance():
    """Test scaling y scales the amplitude and nothing else."""
    xs = [100, 1000, 10000, 100000]
    ys = [0.11, 0.033, 0.0098, 0.0035]
    base = powerlaw_fit(xs, ys)
    scaled = powerlaw_fit(xs, [7.5 * y for y in ys])
    assert scaled.amplitude == pytest.approx(7.5 * base.amplitude, rel=1e-12)
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-12)
    assert scaled.r_squared == pytest.approx(base.r_squared, abs=1e-12)


@pytest.mark.parametrize(
    "xs, ys",
    [
        ([1, 2], [1, 2]),
        ([1, 2, 3], [1, 2]),
        ([1, 2, 3], [1, 0, 2]),
        ([1, -2, 3], [1, 2, 3]),
        ([5, 5, 5], [1, 2, 3]),
    ],
)
def test_fit_domain_errors(xs, ys):
    """Test unusable fit inputs are rejected."""
    with pytest.raises(FitDomainError):
        powerlaw_fit(xs, ys)


def test_direction_labels():
    """Test monotonic direction labels."""
    assert direction([1, 2, 3]) == "increasing"
    assert direction([3, 2, 1]) == "decreasing"
    assert direction([2, 2, 2]) == "constant"
    assert direction([1, 3, 2]) == "mixed"


def test_size_scaling_above_critical_coupling():
    """Test finite-size corrections decay like 1/N at J=1.2, h=0.3."""
    study = size_scaling_study(1.2, 0.3, list(range(1000, 10001, 1000)))
    assert len(study.rows) == 10
    for fit in (study.magnetization_fit, study.susceptibility_fit):
        assert -1.05 <= fit.exponent <= -0.95
        assert fit.r_squared > 0.999
    assert abs(study.magnetization_fit.exponent - study.susceptibility_fit.exponent) < 0.05
    assert not study.degenerate


def test_size_scaling_paramagnet():
    """Test the 1/N law at J=0.6, h=0.1."""
    study = size_scaling_study(0.6, 0.1, [500, 1000, 2000, 5000])
    assert -1.05 <= study.magnetization_fit.exponent <= -0.95
    errors = [row.abs_err_m for row in study.rows]
    assert errors == sorted(errors, reverse=True)
    chi_errors = [row.abs_err_chi for row in study.rows]
    assert chi_errors == sorted(chi_errors, reverse=True)


def test_size_scaling_independent_spins_degenerate():
    """Test J=0 has no finite-size correction and no fit."""
    study = size_scaling_study(0.0, 0.1, [10, 100, 1000])
    assert study.degenerate
    assert study.magnetization_fit is None
    assert study.susceptibility_fit is None
    assert all(row.abs_err_m <= 1e-10 for row in study.rows)


def test_monotonicity_study_sorts_sizes():
    """Test sizes are reported in increasing order."""
    table = monotonicity_study(0.6, 0.1, [2000, 100, 500])
    assert table.sizes == [100, 500, 2000]
    assert len(table.m_n) == len(table.chi_n) == 3


def test_sample_scaling_needs_two_replicates():
    """Test R=1 is refused because the spread is undefined."""
    params = CwParams(n_spins=100, coupling=0.6, field=0.1)
    with pytest.raises(UsageError, match="replicates"):
        sample_scaling_study(params, [100, 1000, 10000], 1, 7)


def test_sample_scaling_small_run():
    """Test a small sample-scaling study is deterministic and decays."""
    params = CwParams(n_spins=500, coupling=0.6, field=0.1)
    first = sample_scaling_study(params, [10000, 100, 1000], 8, 99)
    second = sample_scaling_study(params, [100, 1000, 10000], 8, 99, workers=3)
    assert [row.sample_count for row in first.rows] == [100, 1000, 10000]
    assert first.rows == second.rows
    assert first.magnetization_decay > 0


def test_evaluate_case_errors():
    """Test distances and percentage errors of a single-group case."""
    params = CwParams(n_spins=100, coupling=0.6, field=0.1)
    case = evaluate_case(3, params, _result([[0.63]], [0.1]))
    assert case.case_id == 3
    assert case.j_distance == pytest.approx(0.03, abs=1e-15)
    assert case.h_distance == 0.0
    assert case.max_pct_error_j == pytest.approx(5.0, rel=1e-12)
    assert case.max_pct_error == pytest.approx(5.0, rel=1e-12)
    assert case.max_abs_error_near_zero is None


def test_evaluate_case_near_zero_entries():
    """Test zero true entries are reported as absolute errors."""
    params = MsParams(group_sizes=(10, 10), coupling_matrix=((1.0, 0.0), (0.0, 1.0)), field_vector=(0.0, 0.0))
    case = evaluate_case(1, params, _result([[1.1, 0.02], [0.02, 0.9]], [0.01, -0.03]))
    assert case.max_pct_error_j == pytest.approx(10.0, rel=1e-12)
    assert case.max_pct_error_h is None
    assert case.max_abs_error_near_zero == pytest.approx(0.03, abs=1e-15)


def test_replicate_band():
    """Test the three-sigma band check."""
    params = CwParams(n_spins=100, coupling=0.6, field=0.1)
    inside = evaluate_case(1, params, _result([[0.65]], [0.09], [[0.02]], [0.01]))
    outside = evaluate_case(1, params, _result([[0.75]], [0.09], [[0.02]], [0.01]))
    assert replicate_band(inside)
    assert not replicate_band(outside)
    assert not replicate_band(evaluate_case(1, params, _result([[0.6]], [0.1])))


def test_canonical_cases():
    """Test the canonical list holds cases 1 and 18 and 18 drawn cases."""
    cases = canonical_cases()
    assert len(cases) == 20
    assert cases[0] == CASE_1
    assert cases[17] == CASE_18
    assert canonical_cases() == cases
    for case in cases[1:17] + cases[18:]:
        J = case.coupling_matrix
        assert 0.55 <= J[0][0] <= 1.2 and 0.55 <= J[1][1] <= 1.2
        assert -0.6 <= J[0][1] <= 1.1
        assert all(-0.3 <= h <= 0.3 for h in case.field_vector)
        assert case.group_sizes == (1000, 1000)
        assert has_unique_stable_solution(case)


def test_draw_cases_deterministic_prefix():
    """Test drawn cases depend only on the seed and extend as a prefix."""
    longer = draw_cases(5, 314, group_sizes=(50, 70))
    assert draw_cases(3, 314, group_sizes=(50, 70)) == longer[:3]
    assert draw_cases(5, 315, group_sizes=(50, 70)) != longer
    for case in longer:
        assert case.group_sizes == (50, 70)
        assert all(round(v, 2) == v for row in case.coupling_matrix for v in row)


def test_run_jobs_keeps_submission_order():
    """Test results come back in job order whatever the completion order."""

    def job(index):
        def run():
            time.sleep(0.01 * (5 - index))
            return index
        return run

    progress = []
    results = run_jobs([job(i) for i in range(5)], max_workers=4,
                       progress_callback=lambda done, total: progress.append((done, total)))
    assert results == [0, 1, 2, 3, 4]
    assert progress[-1] == (5, 5)


def test_run_jobs_propagates_failure():
    """Test a failing job re-raises its exception."""

    def boom():
        raise RuntimeError("job failed")

    with pytest.raises(RuntimeError, match="job failed"):
        run_jobs([lambda: 1, boom, lambda: 3], max_workers=2)
    with pytest.raises(RuntimeError):
        run_jobs([boom])


def test_replicates_independent_of_worker_count():
    """Test parallel replicates reproduce the sequential result."""
    params = CwParams(n_spins=300, coupling=0.8, field=0.05)
    sequential = run_replicates(params, 2000, 5, 11, workers=1)
    parallel = run_replicates(params, 2000, 5, 11, workers=4)
    assert sequential == parallel
    assert sequential.replicate_count == 5


def test_cw_sweep_case_seeds():
    """Test sweep case i uses base seed mix_seed(base_seed, i - 1)."""
    cases = cw_recovery_sweep([0.6, 0.9], 0.1, 400, 3000, 3, 42)
    assert [case.case_id for case in cases] == [1, 2]
    again = run_replicates(CwParams(n_spins=400, coupling=0.9, field=0.1), 3000, 3, mix_seed(42, 1))
    assert cases[1].result == again


def test_cw_sweep_refuses_two_well_grid_point():
    """Test a grid point without a unique stable solution fails before sampling."""
    with pytest.raises(NumericalError, match="unique stable solution"):
        cw_recovery_sweep([0.6, 1.5], 0.0, 400, 3000, 3, 42)


def test_null_multispecies_case():
    """Test the decoupled zero-field model recovers h = 0 within three stds."""
    null = MsParams(
        group_sizes=(200, 200),
        coupling_matrix=((0.0, 0.0), (0.0, 0.0)),
        field_vector=(0.0, 0.0),
    )
    (case,) = ms_case_sweep([null], 5000, 6, 2017)
    h_exp = np.array(case.result.h_exp)
    h_std = np.array(case.result.std.h_exp)
    assert np.all(np.abs(h_exp) <= 3 * h_std)
    assert case.max_pct_error is None
    assert case.max_abs_error_near_zero is not None
