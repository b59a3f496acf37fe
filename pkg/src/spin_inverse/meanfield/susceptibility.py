"""Thermodynamic susceptibility at a mean-field solution."""

from typing import List, Optional, Tuple

import numpy as np

from spin_inverse.errors import NumericalError, SingularityError
from spin_inverse.meanfield.solver import solve_model
from spin_inverse.models import (
    CwParams,
    ForwardReport,
    FractionVector,
    MeanFieldSolution,
    ModelParams,
    SusceptibilityMatrix,
)
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

CRITICAL_TOLERANCE = 1e-12
CONDITION_LIMIT = 1e12


def chi_cw(J: float, solution: MeanFieldSolution) -> SusceptibilityMatrix:
    """chi = (1 - m^2) / (1 - J (1 - m^2)).

    Raises:
        NumericalError: if the solution is not stable
        SingularityError: at criticality
    """
    if not solution.stable:
        raise NumericalError(f"susceptibility requires a stable solution, got {solution.magnetization}")
    m = solution.magnetization[0]
    p = 1.0 - m * m
    denominator = 1.0 - J * p
    if abs(denominator) < CRITICAL_TOLERANCE:
        raise SingularityError(f"critical point: 1 - J(1 - m^2) = {denominator:.3e}")
    return SusceptibilityMatrix(chi=((p / denominator,),))


def chi_ms(alpha: FractionVector, J: np.ndarray, solution: MeanFieldSolution) -> SusceptibilityMatrix:
    """Solve chi = P (I + J D_alpha chi), i.e. chi = (I - P J D_alpha)^-1 P.

    Raises:
        NumericalError: if the solution is not stable
        SingularityError: if I - P J D_alpha is singular
    """
    if not solution.stable:
        raise NumericalError(f"susceptibility requires a stable solution, got {solution.magnetization}")
    m = solution.vector
    P = np.diag(1.0 - m**2)
    system = np.eye(len(m)) - P @ np.asarray(J, dtype=float) @ alpha.diagonal()
    condition = np.linalg.cond(system)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularityError(f"critical point: I - P J D_alpha has condition {condition:.3e}")
    chi = np.linalg.solve(system, P)
    return SusceptibilityMatrix(chi=tuple(tuple(row) for row in chi.tolist()))


def chi_model(params: ModelParams, solution: MeanFieldSolution) -> SusceptibilityMatrix:
    if isinstance(params, CwParams):
        return chi_cw(params.coupling, solution)
    return chi_ms(params.fractions, params.coupling_array(), solution)


def forward_report(params: ModelParams) -> ForwardReport:
    """Every fixed point, with the susceptibility of the stable ones."""
    solutions = solve_model(params)
    susceptibilities: List[Optional[SusceptibilityMatrix]] = []
    for solution in solutions:
        susceptibilities.append(chi_model(params, solution) if solution.stable else None)
    logger.info(
        f"{len(solutions)} fixed point(s), {sum(s.stable for s in solutions)} stable"
    )
    return ForwardReport(params=params, solutions=solutions, susceptibilities=susceptibilities)


def limit_values(params: ModelParams) -> Tuple[MeanFieldSolution, SusceptibilityMatrix]:
    """The unique stable solution and its susceptibility.

    Raises:
        NumericalError: if the model does not have exactly one stable solution
    """
    stable = [s for s in solve_model(params) if s.stable]
    if len(stable) != 1:
        raise NumericalError(
            f"expected a unique stable solution, found {len(stable)}: "
            + ", ".join(str(s.magnetization) for s in stable)
        )
    return stable[0], chi_model(params, stable[0])
