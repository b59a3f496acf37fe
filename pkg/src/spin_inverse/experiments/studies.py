"""Finite-size and sample-size scaling studies for the Curie-Weiss model."""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from spin_inverse.errors import UsageError
from spin_inverse.experiments.pool import run_jobs
from spin_inverse.experiments.powerlaw import powerlaw_fit
from spin_inverse.gibbs.distribution import DEFAULT_CELL_BUDGET, cw_distribution, exact_moments
from spin_inverse.inversion.estimators import cw_moments_from_sample
from spin_inverse.meanfield.susceptibility import limit_values
from spin_inverse.models import (
    CwParams,
    FiniteSizeTable,
    SampleScalingRow,
    SampleScalingStudy,
    SamplerConfig,
    SizeScalingRow,
    SizeScalingStudy,
)
from spin_inverse.sampling.sampler import sample
from spin_inverse.sampling.seeds import mix_seed, replicate_seeds
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

DEGENERATE_TOLERANCE = 1e-10


def direction(values: Sequence[float]) -> str:
    """'increasing', 'decreasing' or 'constant' when strictly so, else 'mixed'."""
    steps = np.diff(np.asarray(values, dtype=float))
    if steps.size == 0 or np.all(steps == 0):
        return "constant"
    if np.all(steps > 0):
        return "increasing"
    if np.all(steps < 0):
        return "decreasing"
    return "mixed"


def _finite_size_values(
    coupling: float,
    field: float,
    sizes: Sequence[int],
    cell_budget: int,
) -> List[Tuple[int, float, float]]:
    values = []
    for n in sizes:
        params = CwParams(n_spins=n, coupling=coupling, field=field)
        moments = exact_moments(cw_distribution(params, cell_budget))
        values.append((int(n), moments.m_n, moments.chi_n))
        logger.debug(f"N={n}: m_N={moments.m_n!r}, chi_N={moments.chi_n!r}")
    return values


def monotonicity_study(
    coupling: float,
    field: float,
    sizes: Sequence[int],
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> FiniteSizeTable:
    """Exact m_N and chi_N over increasing N and their direction of change.

    chi_N grows with N below the critical coupling and shrinks above it.
    """
    ordered = sorted(sizes)
    values = _finite_size_values(coupling, field, ordered, cell_budget)
    m_n = [v[1] for v in values]
    chi_n = [v[2] for v in values]
    return FiniteSizeTable(
        coupling=coupling,
        field=field,
        sizes=ordered,
        m_n=m_n,
        chi_n=chi_n,
        m_direction=direction(m_n),
        chi_direction=direction(chi_n),
    )


def size_scaling_study(
    coupling: float,
    field: float,
    sizes: Sequence[int],
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> SizeScalingStudy:
    """Distance of exact m_N and chi_N to their limits, with power-law fits.

    A column whose distances all vanish (J = 0 has no finite-size
    correction) is reported as degenerate and left unfitted.

    Raises:
        NumericalError: outside the unique-solution regime
    """
    solution, chi = limit_values(CwParams(n_spins=1, coupling=coupling, field=field))
    m_limit, chi_limit = solution.magnetization[0], chi.scalar

    ordered = sorted(sizes)
    rows = [
        SizeScalingRow(
            n_spins=n,
            m_n=m_n,
            chi_n=chi_n,
            abs_err_m=abs(m_n - m_limit),
            abs_err_chi=abs(chi_n - chi_limit),
        )
        for n, m_n, chi_n in _finite_size_values(coupling, field, ordered, cell_budget)
    ]

    xs = [row.n_spins for row in rows]
    m_errors = [row.abs_err_m for row in rows]
    chi_errors = [row.abs_err_chi for row in rows]
    m_degenerate = max(m_errors) <= DEGENERATE_TOLERANCE
    chi_degenerate = max(chi_errors) <= DEGENERATE_TOLERANCE
    study = SizeScalingStudy(
        coupling=coupling,
        field=field,
        m_limit=m_limit,
        chi_limit=chi_limit,
        rows=rows,
        m_direction=direction([row.m_n for row in rows]),
        chi_direction=direction([row.chi_n for row in rows]),
        magnetization_fit=None if m_degenerate else powerlaw_fit(xs, m_errors),
        susceptibility_fit=None if chi_degenerate else powerlaw_fit(xs, chi_errors),
        degenerate=m_degenerate or chi_degenerate,
    )
    logger.info(f"Size scaling at J={coupling}, h={field} over {len(rows)} sizes")
    return study


def sample_scaling_study(
    params: CwParams,
    sample_counts: Sequence[int],
    replicates: int,
    base_seed: int,
    workers: int = 1,
    cell_budget: int = DEFAULT_CELL_BUDGET,
    progress_callback: Optional[Callable[[int, int], None]] = None,
) -> SampleScalingStudy:
    """Replicate spread of m_exp and chi_exp as a function of M.

    Each sample size gets its own replicate seeds, derived from
    mix_seed(base_seed, position of M in the sorted list).

    Raises:
        UsageError: for fewer than 2 replicates, where the spread is undefined
    """
    if replicates < 2:
        raise UsageError("a standard deviation needs at least 2 replicates", key="replicates")
    dist = cw_distribution(params, cell_budget)
    moments = exact_moments(dist)
    ordered = sorted(sample_counts)

    rows: List[SampleScalingRow] = []
    for position, count in enumerate(ordered):
        seeds = replicate_seeds(mix_seed(base_seed, position), replicates)
        jobs = [
            (lambda seed=seed, count=count: cw_moments_from_sample(
                sample(dist, SamplerConfig(sample_count=count, seed=seed))
            ))
            for seed in seeds
        ]
        pairs = np.array(run_jobs(jobs, max_workers=workers))
        rows.append(SampleScalingRow(
            sample_count=count,
            mean_m_exp=float(np.mean(pairs[:, 0])),
            std_m_exp=float(np.std(pairs[:, 0], ddof=1)),
            mean_chi_exp=float(np.mean(pairs[:, 1])),
            std_chi_exp=float(np.std(pairs[:, 1], ddof=1)),
        ))
        if progress_callback:
            progress_callback(position + 1, len(ordered))

    xs = [row.sample_count for row in rows]
    study = SampleScalingStudy(
        params=params,
        replicates=replicates,
        base_seed=base_seed,
        m_n=moments.m_n,
        chi_n=moments.chi_n,
        rows=rows,
        magnetization_fit=powerlaw_fit(xs, [row.std_m_exp for row in rows]),
        susceptibility_fit=powerlaw_fit(xs, [row.std_chi_exp for row in rows]),
    )
    logger.info(
        f"Sample scaling: std(m_exp) ~ M^{study.magnetization_fit.exponent:.4f}, "
        f"std(chi_exp) ~ M^{study.susceptibility_fit.exponent:.4f}"
    )
    return study
