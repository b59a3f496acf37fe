"""End-to-end reproduction runs: sampling, inversion and recovery at full size.

These are slow; deselect them with ``-m "not slow"``.
"""

import numpy as np
import pytest

from spin_inverse.experiments import (
    CASE_1,
    CASE_18,
    cw_recovery_sweep,
    ms_case_sweep,
    sample_scaling_study,
)
from spin_inverse.models import CwParams

pytestmark = pytest.mark.slow

CASE_1_J = np.array([[1.173, 0.993], [0.993, 0.794]])
CASE_1_J_STD = np.array([[0.036, 0.028], [0.028, 0.040]])
CASE_1_H = np.array([0.102, 0.198])
CASE_1_H_STD = np.array([0.012, 0.011])
CASE_18_J = np.array([[0.601, -0.798], [-0.798, 0.901]])
CASE_18_J_STD = np.array([[0.022, 0.019], [0.019, 0.020]])
CASE_18_H = np.array([-0.201, -0.300])
CASE_18_H_STD = np.array([0.005, 0.005])


def test_sample_size_scaling():
    """Test the spread of m_exp and chi_exp decays like M^-1/2."""
    params = CwParams(n_spins=10000, coupling=0.6, field=0.1)
    study = sample_scaling_study(params, [100, 1000, 10000, 100000], 20, 20170101, workers=4)
    assert abs(study.magnetization_decay - 0.4933) <= 0.12
    assert abs(study.susceptibility_decay - 0.5175) <= 0.2


@pytest.mark.parametrize("field", [0.1, -0.1])
def test_curie_weiss_recovery(field):
    """Test J_exp and h_exp sit on the identity line over J in [0.6, 1.2]."""
    couplings = [0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2]
    cases = cw_recovery_sweep(couplings, field, 10000, 20000, 20, 20170101, workers=4)
    for J, case in zip(couplings, cases):
        j_exp, h_exp = case.result.j_exp[0][0], case.result.h_exp[0]
        j_std, h_std = case.result.std.j_exp[0][0], case.result.std.h_exp[0]
        assert abs(j_exp - J) <= 3 * j_std
        assert abs(h_exp - field) <= 3 * h_std
        assert abs(j_exp - J) / J < 0.05


def test_independent_spin_control():
    """Test J=0 is recovered as zero coupling."""
    (case,) = cw_recovery_sweep([0.0], 0.1, 10000, 20000, 20, 7, workers=4)
    assert abs(case.result.j_exp[0][0]) <= 3 * case.result.std.j_exp[0][0]


def test_largest_error_case():
    """Test case 1 against the published replicate means and spreads."""
    (case,) = ms_case_sweep([CASE_1], 10000, 20, 20170101, workers=4)
    j_exp = np.array(case.result.j_exp)
    assert np.all(np.abs(j_exp - CASE_1_J) <= 3 * CASE_1_J_STD)
    assert np.all(np.abs(np.array(case.result.h_exp) - CASE_1_H) <= 3 * CASE_1_H_STD)


def test_smallest_error_case():
    """Test case 18 against the published replicate means and spreads."""
    (case,) = ms_case_sweep([CASE_18], 10000, 20, 20170101, workers=4)
    assert np.all(np.abs(np.array(case.result.j_exp) - CASE_18_J) <= 3 * CASE_18_J_STD)
    assert np.all(np.abs(np.array(case.result.h_exp) - CASE_18_H) <= 3 * CASE_18_H_STD)
    assert case.max_pct_error_j < 10.0
