"""Command-line interface: one subcommand per computation or study."""

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
from rich.panel import Panel
from rich.table import Table

from spin_inverse import __version__
from spin_inverse.cli.runner import execute
from spin_inverse.errors import SpinInverseError, UsageError
from spin_inverse.models import (
    Command,
    EstimationResult,
    ForwardReport,
    ModelKind,
    OutputFormat,
    RunConfig,
    SampleScalingStudy,
    SizeScalingStudy,
)
from spin_inverse.utils.config_manager import ConfigManager
from spin_inverse.utils.logger import (
    console,
    create_progress,
    print_error,
    print_info,
    print_success,
    print_warning,
    set_verbosity,
    setup_logger,
)
from spin_inverse.utils.manifest import Stopwatch
from spin_inverse.utils.writers import OUTPUT_DIR_ENV, emit

logger = setup_logger(__name__)

CONDITION_WARNING = 1e8


# Flag value parsing


def _is_vector(text: Optional[str]) -> bool:
    return text is not None and ("," in text or ";" in text)


def _parse_list(text: str, cast: Callable[[str], Any], key: str) -> List[Any]:
    try:
        return [cast(item.strip()) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise UsageError(f"cannot parse '{text}': {e}", key=key) from e


def _parse_matrix(text: str, key: str) -> List[List[float]]:
    """'a,b;c,d' -> [[a, b], [c, d]]."""
    return [_parse_list(row, float, key) for row in text.split(";")]


def _parse_scalar(text: str, cast: Callable[[str], Any], key: str) -> Any:
    try:
        return cast(text.strip())
    except ValueError as e:
        raise UsageError(f"cannot parse '{text}': {e}", key=key) from e


def _model_overrides(
    model: Optional[str],
    file_model: Optional[str],
    n_text: Optional[str],
    j_text: Optional[str],
    h_text: Optional[str],
) -> Dict[str, Any]:
    """Map --N/--J/--h onto the scalar or vector config keys of the model in force."""
    if model is None and file_model is None and any(_is_vector(t) for t in (n_text, j_text, h_text)):
        model = ModelKind.MS.value
    resolved = model or file_model or ModelKind.CW.value

    overrides: Dict[str, Any] = {"model": model}
    if resolved == ModelKind.CW.value:
        if n_text is not None:
            overrides["n_spins"] = _parse_scalar(n_text, int, "n_spins")
        if j_text is not None:
            overrides["coupling"] = _parse_scalar(j_text, float, "coupling")
        if h_text is not None:
            overrides["field"] = _parse_scalar(h_text, float, "field")
    else:
        if n_text is not None:
            overrides["group_sizes"] = _parse_list(n_text, int, "group_sizes")
        if j_text is not None:
            overrides["coupling_matrix"] = _parse_matrix(j_text, "coupling_matrix")
        if h_text is not None:
            overrides["field_vector"] = _parse_list(h_text, float, "field_vector")
    return overrides


def _overrides(options: Dict[str, Any], file_config: Dict[str, Any]) -> Dict[str, Any]:
    overrides = _model_overrides(
        options["model"],
        file_config.get("model"),
        options["n_text"],
        options["j_text"],
        options["h_text"],
    )
    overrides.update(
        sample_count=options["sample_count"],
        replicates=options["replicates"],
        seed=options["seed"],
        sizes=_parse_list(options["sizes"], int, "sizes") if options["sizes"] else None,
        sample_counts=(
            _parse_list(options["sample_counts"], int, "sample_counts") if options["sample_counts"] else None
        ),
        couplings=_parse_list(options["couplings"], float, "couplings") if options["couplings"] else None,
        cases=options["cases"],
        well=options["well"],
        cell_budget=options["cell_budget"],
        workers=options["workers"],
        output=options["output"],
        output_format=options["output_format"],
    )
    return overrides


# Shared options


RUN_OPTIONS = [
    click.option("--model", type=click.Choice([k.value for k in ModelKind]), help="Model family"),
    click.option("--N", "n_text", help="Spin count, or comma-separated group sizes"),
    click.option("--J", "j_text", help="Coupling, or a matrix as 'a,b;c,d'"),
    click.option("--h", "h_text", help="Field, or comma-separated field vector"),
    click.option("--M", "sample_count", type=int, help="Draws per sample"),
    click.option("--R", "replicates", type=int, help="Independent replicates"),
    click.option("--seed", type=int, help="Base seed (default 20170101)"),
    click.option("--sizes", help="Comma-separated N values (study-n)"),
    click.option("--M-list", "sample_counts", help="Comma-separated M values (study-m)"),
    click.option("--J-list", "couplings", help="Comma-separated J values (sweep-cw)"),
    click.option("--cases", type=click.Path(exists=True, dir_okay=False), help="Case list file (sweep-ms)"),
    click.option("--well", type=int, help="Restrict to stable solution number WELL (0-based)"),
    click.option("--cell-budget", type=int, help="Largest magnetization grid to build"),
    click.option("--workers", type=int, help="Concurrent jobs"),
    click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Config file path"),
    click.option("--output", "-o", help="Result file (relative to the output directory)"),
    click.option(
        "--output-dir",
        type=click.Path(file_okay=False),
        envvar=OUTPUT_DIR_ENV,
        help=f"Output directory (env {OUTPUT_DIR_ENV})",
    ),
    click.option(
        "--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), help="Result format"
    ),
    click.option("--verbose", "-v", is_flag=True, help="Verbose logging"),
]


def run_options(func: Callable) -> Callable:
    for option in reversed(RUN_OPTIONS):
        func = option(func)
    return func


def handle_errors(func: Callable) -> Callable:
    """Report library errors and exit with their code.

    In parse-only mode errors propagate to the caller.
    """

    @functools.wraps(func)
    def wrapper(ctx: click.Context, *args: Any, **kwargs: Any) -> Any:
        if (ctx.obj or {}).get("parse_only"):
            return func(ctx, *args, **kwargs)
        try:
            return func(ctx, *args, **kwargs)
        except SpinInverseError as e:
            print_error(str(e))
            if kwargs.get("verbose"):
                console.print_exception()
            sys.exit(e.exit_code)
        except Exception as e:
            print_error(f"Unexpected error: {e}")
            if kwargs.get("verbose"):
                console.print_exception()
            sys.exit(1)

    return wrapper


def _run(ctx: click.Context, command: Command, options: Dict[str, Any]) -> Optional[RunConfig]:
    if options["verbose"]:
        set_verbosity(True)
    obj = ctx.obj or {}
    manager = ConfigManager(
        Path(options["config_path"]) if options["config_path"] else None,
        config_text=obj.get("config_text"),
    )
    config = manager.build_run_config(command.value, _overrides(options, manager.config))
    if obj.get("parse_only"):
        return config

    stopwatch = Stopwatch()
    with create_progress() as progress:
        task = progress.add_task(f"[cyan]{command.value}...", total=None)

        def on_progress(done: int, total: int) -> None:
            progress.update(task, completed=done, total=total)

        result = execute(config, on_progress)
        progress.update(task, description=f"[green]{command.value} done")

    output_dir = Path(options["output_dir"]) if options["output_dir"] else None
    written = emit(result, config, stopwatch.elapsed(), output_dir)
    _display_result(config, result)
    print_success(f"Results written to {written[0]} ({stopwatch.elapsed():.2f}s)")
    return None


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """
    Spin Inverse

    Exact finite-size equilibrium, mean-field limits and maximum-likelihood
    inference of couplings and fields for mean-field spin models.
    """
    pass


@main.command()
@run_options
@click.pass_context
@handle_errors
def forward(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Mean-field fixed points, stability and susceptibility."""
    return _run(ctx, Command.FORWARD, options)


@main.command()
@run_options
@click.pass_context
@handle_errors
def exact(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Exact finite-size distribution and moments."""
    return _run(ctx, Command.EXACT, options)


@main.command("sample")
@run_options
@click.pass_context
@handle_errors
def sample_command(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """R replicate samples of M magnetization draws."""
    return _run(ctx, Command.SAMPLE, options)


@main.command()
@run_options
@click.pass_context
@handle_errors
def invert(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Infer couplings and fields from R replicate M-samples."""
    return _run(ctx, Command.INVERT, options)


@main.command("study-n")
@run_options
@click.pass_context
@handle_errors
def study_n(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Finite-size scaling of m_N and chi_N (Curie-Weiss)."""
    return _run(ctx, Command.STUDY_N, options)


@main.command("study-m")
@run_options
@click.pass_context
@handle_errors
def study_m(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Estimator spread as a function of the sample size (Curie-Weiss)."""
    return _run(ctx, Command.STUDY_M, options)


@main.command("sweep-cw")
@run_options
@click.pass_context
@handle_errors
def sweep_cw(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Curie-Weiss parameter recovery over a grid of couplings."""
    return _run(ctx, Command.SWEEP_CW, options)


@main.command("sweep-ms")
@run_options
@click.pass_context
@handle_errors
def sweep_ms(ctx: click.Context, **options: Any) -> Optional[RunConfig]:
    """Multi-species parameter recovery over a case list (default: 20 canonical cases)."""
    return _run(ctx, Command.SWEEP_MS, options)


@main.command("init-config")
@click.argument("path", type=click.Path(dir_okay=False), default=".spin-inverse.json")
@click.option("--force", is_flag=True, help="Overwrite an existing file")
def init_config(path: str, force: bool) -> None:
    """Write an example configuration file to PATH."""
    target = Path(path)
    if target.exists() and not force:
        print_error(f"{target} already exists (use --force to overwrite)")
        sys.exit(UsageError.exit_code)
    ConfigManager.create_default_config(target)
    print_success(f"Created configuration file: {target}")
    print_info("Edit it, then run e.g. 'spin-inverse invert --config " + str(target) + "'")


def parse_config(argv: Optional[Sequence[str]] = None, config_text: Optional[str] = None) -> RunConfig:
    """Build the RunConfig an invocation would run, without running it.

    Args:
        argv: Arguments after the program name, subcommand first
        config_text: Flat JSON/YAML config document; flags in ``argv`` win

    Raises:
        UsageError: no command, unknown flag or key, bad value, missing field
    """
    args = list(argv or [])
    commands = ", ".join(c.value for c in Command)
    if not args:
        if config_text is None:
            raise UsageError(f"no command given; choose one of: {commands}", key="command")
        return ConfigManager(config_text=config_text).build_run_config()

    try:
        return main.main(
            args=args,
            prog_name="spin-inverse",
            standalone_mode=False,
            obj={"parse_only": True, "config_text": config_text},
        )
    except click.NoSuchOption as e:
        raise UsageError(e.format_message(), key=e.option_name.lstrip("-")) from e
    except click.UsageError as e:
        key = "command" if args[0] not in main.commands else None
        message = e.format_message()
        if key:
            message += f"; choose one of: {commands}"
        raise UsageError(message, key=key) from e
    except click.ClickException as e:
        raise UsageError(e.format_message()) from e


# Result display


def _display_result(config: RunConfig, result: Any) -> None:
    if isinstance(result, ForwardReport):
        _display_forward(result)
    elif isinstance(result, EstimationResult):
        _display_estimates(result)
    elif isinstance(result, SizeScalingStudy):
        _display_size_scaling(result)
    elif isinstance(result, SampleScalingStudy):
        _display_sample_scaling(result)
    elif isinstance(result, list):
        _display_sweep(result)


def _display_forward(report: ForwardReport) -> None:
    table = Table(title="Mean-field solutions")
    table.add_column("m", style="cyan")
    table.add_column("Stability")
    table.add_column("Radius", justify="right")
    table.add_column("chi")
    for solution, chi in zip(report.solutions, report.susceptibilities):
        status = "[green]stable[/green]" if solution.stable else (
            "[yellow]marginal[/yellow]" if solution.marginal else "[red]unstable[/red]"
        )
        table.add_row(
            ", ".join(f"{m:.6f}" for m in solution.magnetization),
            status,
            f"{solution.jacobian_radius:.6f}",
            "" if chi is None else "; ".join(", ".join(f"{v:.6f}" for v in row) for row in chi.chi),
        )
    console.print(table)


def _display_estimates(result: EstimationResult) -> None:
    def fmt(values: Any) -> str:
        return str([round(v, 4) if isinstance(v, float) else [round(x, 4) for x in v] for v in values])

    summary = f"""
[bold]Replicates:[/bold] {result.replicate_count}
[bold]m_exp:[/bold] {fmt(result.m_exp)}
[bold]J_exp:[/bold] {fmt(result.j_exp)}
[bold]h_exp:[/bold] {fmt(result.h_exp)}
"""
    if result.std is not None:
        summary += f"[bold]J std:[/bold] {fmt(result.std.j_exp)}\n"
        summary += f"[bold]h std:[/bold] {fmt(result.std.h_exp)}\n"
    console.print(Panel(summary, title="Estimates", border_style="green"))
    if result.max_condition > CONDITION_WARNING:
        print_warning(
            f"chi_exp is ill-conditioned (condition {result.max_condition:.3e}); "
            "estimates are unreliable"
        )


def _display_size_scaling(study: SizeScalingStudy) -> None:
    table = Table(title=f"Finite size, J={study.coupling}, h={study.field}")
    for column in ("N", "m_N", "chi_N", "|m_N - m|", "|chi_N - chi|"):
        table.add_column(column, justify="right")
    for row in study.rows:
        table.add_row(
            str(row.n_spins), f"{row.m_n:.8f}", f"{row.chi_n:.6f}",
            f"{row.abs_err_m:.3e}", f"{row.abs_err_chi:.3e}",
        )
    console.print(table)
    fits = (("magnetization", study.magnetization_fit), ("susceptibility", study.susceptibility_fit))
    for label, fit in fits:
        if fit is not None:
            print_info(f"{label}: {fit.amplitude:.4f} N^({fit.exponent:.4f}), R^2={fit.r_squared:.6f}")


def _display_sample_scaling(study: SampleScalingStudy) -> None:
    table = Table(title="Estimator spread")
    for column in ("M", "std(m_exp)", "std(chi_exp)"):
        table.add_column(column, justify="right")
    for row in study.rows:
        table.add_row(str(row.sample_count), f"{row.std_m_exp:.3e}", f"{row.std_chi_exp:.3e}")
    console.print(table)
    print_info(
        f"decay exponents: m_exp {study.magnetization_decay:.4f}, "
        f"chi_exp {study.susceptibility_decay:.4f}"
    )


def _display_sweep(cases: List[Any]) -> None:
    table = Table(title="Parameter recovery")
    table.add_column("Case", justify="right", style="cyan")
    table.add_column("|J_exp - J|", justify="right")
    table.add_column("|h_exp - h|", justify="right")
    table.add_column("max % error", justify="right")
    for case in cases:
        pct = "" if case.max_pct_error is None else f"{case.max_pct_error:.2f}"
        table.add_row(str(case.case_id), f"{case.j_distance:.4f}", f"{case.h_distance:.4f}", pct)
    console.print(table)


if __name__ == "__main__":
    main()
