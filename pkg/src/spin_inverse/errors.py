"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""

from pathlib import Path
from typing import Optional


class SpinInverseError(Exception):
    """Base class for all spin-inverse errors."""

    exit_code: int = 1


class ModelValidationError(SpinInverseError, ValueError):
    """A domain type invariant does not hold."""

    exit_code = 2


class UsageError(SpinInverseError):
    """Invalid command line or configuration document."""

    exit_code = 2

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class NumericalError(SpinInverseError):
    """A numerical procedure could not produce a trustworthy result."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An iterative solver exhausted its budget."""


class SingularityError(NumericalError):
    """A linear system is singular (critical point)."""


class DegenerateMagnetizationError(NumericalError):
    """A magnetization is on the boundary |m| >= 1."""


class DegenerateSusceptibilityError(NumericalError):
    """A susceptibility is non-positive or its matrix is singular."""


class DegenerateRestrictionError(NumericalError):
    """A well restriction selected no support cells."""


class FitDomainError(NumericalError):
    """A power-law fit was given unusable data."""


class ResourceError(SpinInverseError):
    """A computation would exceed a configured resource budget."""

    exit_code = 4


class OutputError(SpinInverseError):
    """Writing a result file failed."""

    exit_code = 4

    def __init__(self, path: Path, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
