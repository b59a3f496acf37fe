"""Parameter-recovery sweeps: sample from known parameters, infer them back."""

from typing import Callable, List, Optional, Sequence

import numpy as np

from spin_inverse.experiments.pool import run_jobs
from spin_inverse.gibbs.distribution import DEFAULT_CELL_BUDGET, distribution_for, restrict_to_well
from spin_inverse.inversion.estimators import estimate_replicates
from spin_inverse.meanfield.susceptibility import limit_values
from spin_inverse.models import (
    CwParams,
    EstimationResult,
    MeanFieldSolution,
    ModelParams,
    MsParams,
    SamplerConfig,
    SweepCase,
)
from spin_inverse.sampling.sampler import sample
from spin_inverse.sampling.seeds import mix_seed, replicate_seeds
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

NEAR_ZERO = 1e-6


def run_replicates(
    params: ModelParams,
    sample_count: int,
    replicates: int,
    base_seed: int,
    well: Optional[MeanFieldSolution] = None,
    workers: int = 1,
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> EstimationResult:
    """Draw R independent M-samples and average their estimates.

    Replicate r uses seed replicate_seeds(base_seed, R)[r]. With ``well``
    set, every sample is drawn from the distribution restricted to that
    well.
    """
    dist = distribution_for(params, cell_budget)
    if well is not None:
        dist = restrict_to_well(dist, well)
    seeds = replicate_seeds(base_seed, replicates)
    jobs = [
        (lambda seed=seed: sample(dist, SamplerConfig(sample_count=sample_count, seed=seed)))
        for seed in seeds
    ]
    samples = run_jobs(jobs, max_workers=workers)
    return estimate_replicates(samples)


def _true_values(params: ModelParams):
    return params.coupling_array(), params.field_array()


def _percent_errors(estimated: np.ndarray, true: np.ndarray):
    """Percentage errors over entries with |true| >= 1e-6, absolute errors elsewhere."""
    error = np.abs(estimated - true)
    eligible = np.abs(true) >= NEAR_ZERO
    pct = 100.0 * error[eligible] / np.abs(true[eligible])
    max_pct = float(np.max(pct)) if pct.size else None
    max_abs = float(np.max(error[~eligible])) if np.any(~eligible) else None
    return max_pct, max_abs


def evaluate_case(case_id: int, params: ModelParams, result: EstimationResult) -> SweepCase:
    """Distances and maximum percentage errors of a replicate-averaged estimate."""
    J, h = _true_values(params)
    j_exp = np.array(result.j_exp, dtype=float)
    h_exp = np.array(result.h_exp, dtype=float)

    pct_j, abs_j = _percent_errors(j_exp, J)
    pct_h, abs_h = _percent_errors(h_exp, h)
    pct_all = [p for p in (pct_j, pct_h) if p is not None]
    abs_all = [a for a in (abs_j, abs_h) if a is not None]

    return SweepCase(
        case_id=case_id,
        params=params,
        result=result,
        j_distance=float(np.linalg.norm(j_exp - J)),
        h_distance=float(np.linalg.norm(h_exp - h)),
        max_pct_error=max(pct_all) if pct_all else None,
        max_pct_error_j=pct_j,
        max_pct_error_h=pct_h,
        max_abs_error_near_zero=max(abs_all) if abs_all else None,
    )


def _sweep(
    cases: Sequence[ModelParams],
    sample_count: int,
    replicates: int,
    base_seed: int,
    workers: int,
    cell_budget: int,
    progress_callback: Optional[Callable[[int, int], None]],
) -> List[SweepCase]:
    outcomes = []
    for position, params in enumerate(cases):
        result = run_replicates(
            params,
            sample_count,
            replicates,
            mix_seed(base_seed, position),
            workers=workers,
            cell_budget=cell_budget,
        )
        case = evaluate_case(position + 1, params, result)
        logger.info(
            f"Case {case.case_id}: |J_exp - J| = {case.j_distance:.4g}, "
            f"|h_exp - h| = {case.h_distance:.4g}"
        )
        outcomes.append(case)
        if progress_callback:
            progress_callback(position + 1, len(cases))
    return outcomes


def cw_recovery_sweep(
    couplings: Sequence[float],
    field: float,
    n_spins: int,
    sample_count: int,
    replicates: int,
    base_seed: int,
    workers: int = 1,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    progress_callback: Optional[Callable[[int, int], None]] = None,
) -> List[SweepCase]:
    """Curie-Weiss recovery of (J, h) for each J of a grid at fixed h.

    Case i (1-based) uses base seed mix_seed(base_seed, i - 1).

    Raises:
        NumericalError: before any sampling, if some (J, h) lacks a unique
            stable mean-field solution
    """
    cases = [CwParams(n_spins=n_spins, coupling=float(J), field=field) for J in couplings]
    for params in cases:
        limit_values(params)
    return _sweep(cases, sample_count, replicates, base_seed, workers, cell_budget, progress_callback)


def ms_case_sweep(
    cases: Sequence[MsParams],
    sample_count: int,
    replicates: int,
    base_seed: int,
    workers: int = 1,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    progress_callback: Optional[Callable[[int, int], None]] = None,
) -> List[SweepCase]:
    """Multi-species recovery over a list of cases, in case order."""
    return _sweep(list(cases), sample_count, replicates, base_seed, workers, cell_budget, progress_callback)


def replicate_band(case: SweepCase, widths: float = 3.0) -> bool:
    """Whether J_exp and h_exp lie within ``widths`` replicate stds of the truth."""
    std = case.result.std
    if std is None:
        return False
    J, h = _true_values(case.params)
    j_ok = np.abs(np.array(case.result.j_exp) - J) <= widths * np.array(std.j_exp)
    h_ok = np.abs(np.array(case.result.h_exp) - h) <= widths * np.array(std.h_exp)
    return bool(np.all(j_ok) and np.all(h_ok))
