"""Logging and console output.

Library modules log through children of the ``spin_inverse`` logger; one
RichHandler on that logger writes to stderr so result files and piped
stdout stay clean.
"""

import logging
from typing import Dict, Tuple

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

console = Console(stderr=True)

PACKAGE_LOGGER = "spin_inverse"

# kind -> (style, marker)
STATUS_STYLES: Dict[str, Tuple[str, str]] = {
    "success": ("green", "✓"),
    "error": ("red", "✗"),
    "warning": ("yellow", "⚠"),
    "info": ("blue", "ℹ"),
}


def _rich_handler() -> RichHandler:
    handler = RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        log_time_format="[%X]",
        rich_tracebacks=True,
        tracebacks_suppress=[click],
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    return handler


def _package_logger() -> logging.Logger:
    root = logging.getLogger(PACKAGE_LOGGER)
    if not root.handlers:
        root.addHandler(_rich_handler())
        root.setLevel(logging.INFO)
        root.propagate = False
    return root


def setup_logger(name: str) -> logging.Logger:
    """Logger for a module.

    Package modules share the package handler and level; any other name
    gets a handler of its own.

    Args:
        name: Usually ``__name__``

    Returns:
        Configured logger instance
    """
    root = _package_logger()
    if name == PACKAGE_LOGGER:
        return root
    logger = logging.getLogger(name)
    if not name.startswith(PACKAGE_LOGGER + ".") and not logger.handlers:
        logger.addHandler(_rich_handler())
        logger.setLevel(root.level)
        logger.propagate = False
    return logger


def set_verbosity(verbose: bool) -> None:
    """DEBUG for the whole package when verbose, INFO otherwise."""
    _package_logger().setLevel(logging.DEBUG if verbose else logging.INFO)


def create_progress() -> Progress:
    """Progress bar for job batches; the total may be unknown until jobs start."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=False,
    )


def print_status(kind: str, message: str) -> None:
    style, marker = STATUS_STYLES[kind]
    console.print(f"[{style}]{marker}[/{style}] {message}")


def print_success(message: str) -> None:
    print_status("success", message)


def print_error(message: str) -> None:
    print_status("error", message)


def print_warning(message: str) -> None:
    print_status("warning", message)


def print_info(message: str) -> None:
    print_status("info", message)
