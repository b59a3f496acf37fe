"""Scaling studies, recovery sweeps and their supporting tools."""

from spin_inverse.experiments.cases import CASE_1, CASE_18, canonical_cases, draw_cases
from spin_inverse.experiments.pool import run_jobs
from spin_inverse.experiments.powerlaw import powerlaw_fit
from spin_inverse.experiments.studies import (
    monotonicity_study,
    sample_scaling_study,
    size_scaling_study,
)
from spin_inverse.experiments.sweeps import (
    cw_recovery_sweep,
    evaluate_case,
    ms_case_sweep,
    replicate_band,
    run_replicates,
)

__all__ = [
    "CASE_1",
    "CASE_18",
    "canonical_cases",
    "cw_recovery_sweep",
    "draw_cases",
    "evaluate_case",
    "monotonicity_study",
    "ms_case_sweep",
    "powerlaw_fit",
    "replicate_band",
    "run_jobs",
    "run_replicates",
    "sample_scaling_study",
    "size_scaling_study",
]
