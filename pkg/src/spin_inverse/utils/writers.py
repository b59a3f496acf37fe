"""Result files: CSV tables, JSON reports and the run manifest.

CSV files always carry a header, use ',' and '.' and end lines with LF.
Floats are written with 17 significant digits in CSV; JSON uses the
shortest repr that reads back to the same double.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from spin_inverse.errors import OutputError, UsageError
from spin_inverse.models import (
    Command,
    EstimationResult,
    ExactReport,
    ForwardReport,
    OutputFormat,
    RunConfig,
    SampleBatch,
    SampleScalingStudy,
    SizeScalingStudy,
    SweepCase,
)
from spin_inverse.utils.logger import setup_logger
from spin_inverse.utils.manifest import RunManifest

logger = setup_logger(__name__)

OUTPUT_DIR_ENV = "SPIN_INVERSE_OUTPUT_DIR"


def format_value(value: Any) -> str:
    """CSV text for one cell."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def render_json(document: Any) -> str:
    return json.dumps(document, indent=2) + "\n"


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from e
    logger.debug(f"Wrote {path}")
    return path


def resolve_output(config: RunConfig, output_dir: Optional[Path] = None) -> Path:
    """Result path: ``output`` under ``output_dir`` when relative, else <command>.<format>."""
    base = Path(output_dir) if output_dir else Path.cwd()
    if config.output:
        path = Path(config.output)
        return path if path.is_absolute() else base / path
    return base / f"{config.command.value}.{config.output_format.value}"


def companion(path: Path, suffix: str) -> Path:
    """Sibling file <stem>.<suffix>, e.g. results.manifest.json."""
    return path.with_name(f"{path.stem}.{suffix}")


def _indices(k: int) -> List[str]:
    return [str(l + 1) for l in range(k)]


def _pairs(k: int) -> List[str]:
    return [f"{l + 1}{s + 1}" for l in range(k) for s in range(k)]


def _flat(matrix: Any) -> List[float]:
    return [float(v) for v in np.asarray(matrix, dtype=float).ravel()]


# Per-command tables


def forward_table(report: ForwardReport):
    k = report.params.k
    header = (
        ["solution"] + [f"m_{i}" for i in _indices(k)]
        + ["residual", "stable", "marginal", "jacobian_radius"]
        + [f"chi_{p}" for p in _pairs(k)]
    )
    rows = []
    for index, (solution, chi) in enumerate(zip(report.solutions, report.susceptibilities), 1):
        chi_cells = _flat(chi.chi) if chi is not None else [None] * (k * k)
        rows.append(
            [index, *solution.magnetization, solution.residual, solution.stable,
             solution.marginal, solution.jacobian_radius, *chi_cells]
        )
    return header, rows


def distribution_table(report: ExactReport):
    dist = report.distribution
    k = dist.k
    header = (
        [f"count_{i}" for i in _indices(k)]
        + [f"magnetization_{i}" for i in _indices(k)]
        + ["probability"]
    )
    magnetizations = dist.magnetizations
    rows = (
        [*dist.counts[s].tolist(), *magnetizations[s].tolist(), float(dist.probabilities[s])]
        for s in range(dist.support_size)
    )
    return header, rows


def sample_table(batch: SampleBatch):
    k = batch.samples[0].k
    header = ["replicate", "draw_index"] + [f"m_{i}" for i in _indices(k)]

    def rows():
        for replicate, drawn in enumerate(batch.samples, 1):
            values = drawn.values
            for index in range(drawn.size):
                yield [replicate, index + 1, *values[index].tolist()]

    return header, rows()


MATRIX_QUANTITIES = ("chi_exp", "j_exp")


def estimation_table(result: EstimationResult):
    header = ["quantity", "index", "mean", "std"]
    rows = []
    k = len(result.m_exp)
    for name in ("m_exp", "chi_exp", "j_exp", "h_exp"):
        means = _flat(getattr(result.mean, name))
        stds = _flat(getattr(result.std, name)) if result.std is not None else [None] * len(means)
        labels = _pairs(k) if name in MATRIX_QUANTITIES else _indices(k)
        rows.extend([name, label, m, s] for label, m, s in zip(labels, means, stds))
    return header, rows


def size_scaling_table(study: SizeScalingStudy):
    header = ["N", "m_N", "chi_N", "abs_err_m", "abs_err_chi"]
    rows = [[r.n_spins, r.m_n, r.chi_n, r.abs_err_m, r.abs_err_chi] for r in study.rows]
    return header, rows


def sample_scaling_table(study: SampleScalingStudy):
    header = ["M", "mean_m_exp", "std_m_exp", "mean_chi_exp", "std_chi_exp"]
    rows = [
        [r.sample_count, r.mean_m_exp, r.std_m_exp, r.mean_chi_exp, r.std_chi_exp]
        for r in study.rows
    ]
    return header, rows


def sweep_table(cases: List[SweepCase]):
    """One row per case: true values, replicate means and stds, error summaries."""
    k = cases[0].params.k
    if any(case.params.k != k for case in cases):
        raise UsageError(
            "CSV sweep output needs every case to have the same number of groups; use json",
            key="output_format",
        )
    pairs, indices = _pairs(k), _indices(k)
    header = (
        ["case_id"]
        + [f"J_{p}" for p in pairs] + [f"h_{i}" for i in indices]
        + [f"J_exp_{p}" for p in pairs] + [f"J_std_{p}" for p in pairs]
        + [f"h_exp_{i}" for i in indices] + [f"h_std_{i}" for i in indices]
        + ["j_distance", "h_distance", "max_pct_error", "max_pct_error_j",
           "max_pct_error_h", "max_abs_error_near_zero"]
    )
    rows = []
    for case in cases:
        std = case.result.std
        rows.append(
            [case.case_id]
            + _flat(case.params.coupling_array()) + _flat(case.params.field_array())
            + _flat(case.result.j_exp)
            + (_flat(std.j_exp) if std else [None] * len(pairs))
            + _flat(case.result.h_exp)
            + (_flat(std.h_exp) if std else [None] * k)
            + [case.j_distance, case.h_distance, case.max_pct_error, case.max_pct_error_j,
               case.max_pct_error_h, case.max_abs_error_near_zero]
        )
    return header, rows


TABLES: Dict[Command, Callable] = {
    Command.FORWARD: forward_table,
    Command.EXACT: distribution_table,
    Command.SAMPLE: sample_table,
    Command.INVERT: estimation_table,
    Command.STUDY_N: size_scaling_table,
    Command.STUDY_M: sample_scaling_table,
    Command.SWEEP_CW: sweep_table,
    Command.SWEEP_MS: sweep_table,
}


# JSON documents


def _dump(model: Any) -> Any:
    return model.model_dump(mode="json")


def json_document(command: Command, result: Any) -> Any:
    if command == Command.EXACT:
        dist, moments = result.distribution, result.moments
        return {
            "model": _dump(dist.model),
            "well": list(dist.well) if dist.well is not None else None,
            "log_partition": dist.log_partition,
            "mean": moments.mean.tolist(),
            "second": moments.second.tolist(),
            "finite_size_chi": moments.finite_size_chi.tolist(),
            "counts": dist.counts.tolist(),
            "probabilities": dist.probabilities.tolist(),
        }
    if command == Command.SAMPLE:
        return {
            "group_sizes": list(result.samples[0].group_sizes),
            "replicates": [
                {"seed": seed, "values": drawn.values.tolist()}
                for seed, drawn in zip(result.seeds, result.samples)
            ],
        }
    if command in (Command.SWEEP_CW, Command.SWEEP_MS):
        return {"cases": [_dump(case) for case in result]}
    return _dump(result)


def fit_summary(result: Any) -> Dict[str, Any]:
    """The power-law fits of a scaling study."""
    summary = {
        "magnetization_fit": _dump(result.magnetization_fit) if result.magnetization_fit else None,
        "susceptibility_fit": _dump(result.susceptibility_fit) if result.susceptibility_fit else None,
    }
    if isinstance(result, SizeScalingStudy):
        summary.update(
            m_limit=result.m_limit,
            chi_limit=result.chi_limit,
            m_direction=result.m_direction,
            chi_direction=result.chi_direction,
            degenerate=result.degenerate,
        )
    else:
        summary.update(
            magnetization_decay=result.magnetization_decay,
            susceptibility_decay=result.susceptibility_decay,
            m_n=result.m_n,
            chi_n=result.chi_n,
        )
    return summary


def emit(
    result: Any,
    config: RunConfig,
    wall_time_seconds: float,
    output_dir: Optional[Path] = None,
) -> List[Path]:
    """Write the result of ``config.command`` and its manifest.

    Returns:
        Paths written, result file first and manifest last

    Raises:
        OutputError: on any I/O failure, naming the path
    """
    path = resolve_output(config, output_dir)
    command = config.command
    written: List[Path] = []

    if config.output_format == OutputFormat.JSON:
        written.append(_write(path, render_json(json_document(command, result))))
    else:
        header, rows = TABLES[command](result)
        written.append(_write(path, render_csv(header, rows)))
        if command in (Command.STUDY_N, Command.STUDY_M):
            written.append(_write(companion(path, "fits.json"), render_json(fit_summary(result))))

    manifest = RunManifest.create(config)
    manifest.finalize(wall_time_seconds, written)
    written.append(manifest.save(companion(path, "manifest.json")))
    logger.info(f"Wrote {', '.join(str(p) for p in written)}")
    return written
