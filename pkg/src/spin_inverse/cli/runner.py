"""Dispatch a validated RunConfig to the library."""

from typing import Any, Callable, Dict, Optional

from spin_inverse.errors import UsageError
from spin_inverse.experiments.cases import canonical_cases
from spin_inverse.experiments.pool import run_jobs
from spin_inverse.experiments.studies import sample_scaling_study, size_scaling_study
from spin_inverse.experiments.sweeps import cw_recovery_sweep, ms_case_sweep, run_replicates
from spin_inverse.gibbs.distribution import distribution_for, exact_moments, restrict_to_well
from spin_inverse.meanfield.solver import stable_solutions
from spin_inverse.meanfield.susceptibility import forward_report
from spin_inverse.models import (
    Command,
    CwParams,
    ExactReport,
    MeanFieldSolution,
    RunConfig,
    SampleBatch,
    SamplerConfig,
)
from spin_inverse.sampling.sampler import sample
from spin_inverse.sampling.seeds import replicate_seeds
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

Progress = Optional[Callable[[int, int], None]]


def selected_well(config: RunConfig) -> Optional[MeanFieldSolution]:
    """The stable solution picked by ``well`` (0-based, lexicographic order)."""
    if config.well is None:
        return None
    stable = stable_solutions(config.model_params())
    if not 0 <= config.well < len(stable):
        raise UsageError(
            f"index {config.well} out of range; the model has {len(stable)} stable solution(s)",
            key="well",
        )
    return stable[config.well]


def _forward(config: RunConfig, progress: Progress) -> Any:
    return forward_report(config.model_params())


def _exact(config: RunConfig, progress: Progress) -> Any:
    dist = distribution_for(config.model_params(), config.cell_budget)
    well = selected_well(config)
    if well is not None:
        dist = restrict_to_well(dist, well)
    return ExactReport(distribution=dist, moments=exact_moments(dist))


def _sample(config: RunConfig, progress: Progress) -> Any:
    dist = distribution_for(config.model_params(), config.cell_budget)
    well = selected_well(config)
    if well is not None:
        dist = restrict_to_well(dist, well)
    seeds = replicate_seeds(config.seed, config.replicates)
    jobs = [
        (lambda seed=seed: sample(dist, SamplerConfig(sample_count=config.sample_count, seed=seed)))
        for seed in seeds
    ]
    return SampleBatch(seeds=seeds, samples=run_jobs(jobs, config.workers, progress))


def _invert(config: RunConfig, progress: Progress) -> Any:
    return run_replicates(
        config.model_params(),
        config.sample_count,
        config.replicates,
        config.seed,
        well=selected_well(config),
        workers=config.workers,
        cell_budget=config.cell_budget,
    )


def _study_n(config: RunConfig, progress: Progress) -> Any:
    return size_scaling_study(config.coupling, config.field, config.sizes, config.cell_budget)


def _study_m(config: RunConfig, progress: Progress) -> Any:
    params = CwParams(n_spins=config.n_spins, coupling=config.coupling, field=config.field)
    return sample_scaling_study(
        params,
        config.sample_counts,
        config.replicates,
        config.seed,
        workers=config.workers,
        cell_budget=config.cell_budget,
        progress_callback=progress,
    )


def _sweep_cw(config: RunConfig, progress: Progress) -> Any:
    return cw_recovery_sweep(
        config.couplings,
        config.field,
        config.n_spins,
        config.sample_count,
        config.replicates,
        config.seed,
        workers=config.workers,
        cell_budget=config.cell_budget,
        progress_callback=progress,
    )


def _sweep_ms(config: RunConfig, progress: Progress) -> Any:
    cases = config.cases if config.cases else canonical_cases()
    return ms_case_sweep(
        cases,
        config.sample_count,
        config.replicates,
        config.seed,
        workers=config.workers,
        cell_budget=config.cell_budget,
        progress_callback=progress,
    )


HANDLERS: Dict[Command, Callable[[RunConfig, Progress], Any]] = {
    Command.FORWARD: _forward,
    Command.EXACT: _exact,
    Command.SAMPLE: _sample,
    Command.INVERT: _invert,
    Command.STUDY_N: _study_n,
    Command.STUDY_M: _study_m,
    Command.SWEEP_CW: _sweep_cw,
    Command.SWEEP_MS: _sweep_ms,
}


def execute(config: RunConfig, progress: Progress = None) -> Any:
    """Run the command a config names and return its result object."""
    logger.info(f"Running {config.command.value} (model {config.model.value}, seed {config.seed})")
    return HANDLERS[config.command](config, progress)
