"""Fixed points of the mean-field self-consistency equations.

The map is m -> tanh(A m + h) with A = J D_alpha (A = J for one group).
Stable fixed points are found by damped iteration from a multi-start set;
unstable ones by root finding, so the returned list is complete for the
seeds used.
"""

import cmath
import itertools
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy import optimize

from spin_inverse.errors import ConvergenceError
from spin_inverse.models import (
    CwParams,
    FractionVector,
    MeanFieldSolution,
    ModelParams,
    MsParams,
    validate,
)
from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

DAMPING = 0.5
UPDATE_TOLERANCE = 1e-14
ITERATION_BUDGET = 10**6
RESIDUAL_LIMIT = 1e-12
DEDUP_TOLERANCE = 1e-8
MARGINAL_BAND = 1e-9
SEED_VALUES = (-0.9, 0.0, 0.9)
SCAN_POINTS = 4001
# scipy refuses rtol below 4 eps
BRENTQ_RTOL = 4 * np.finfo(float).eps
BASIN_CAPTURE = 1e-6
BASIN_BUDGET = 20000
BASIN_TIE = 1e-12


def self_consistency_map(m: np.ndarray, A: np.ndarray, h: np.ndarray) -> np.ndarray:
    """One application of m -> tanh(A m + h)."""
    return np.tanh(A @ m + h)


def residual(m: np.ndarray, A: np.ndarray, h: np.ndarray) -> float:
    return float(np.max(np.abs(m - self_consistency_map(m, A, h))))


def map_jacobian(m: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Jacobian P A of the map at m, P = diag(1 - m^2)."""
    return np.diag(1.0 - m**2) @ A


def spectral_radius(M: np.ndarray) -> float:
    """Largest eigenvalue modulus.

    Closed form up to 2x2, direct eigensolve up to 4x4, power iteration
    beyond.
    """
    k = M.shape[0]
    if k == 1:
        return float(abs(M[0, 0]))
    if k == 2:
        half_trace = 0.5 * (M[0, 0] + M[1, 1])
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        root = cmath.sqrt(half_trace**2 - det)
        return float(max(abs(half_trace + root), abs(half_trace - root)))
    if k <= 4:
        return float(np.max(np.abs(np.linalg.eigvals(M))))
    return _power_iteration(M)


def _power_iteration(M: np.ndarray, iterations: int = 10000, tol: float = 1e-13) -> float:
    v = np.ones(M.shape[0]) / np.sqrt(M.shape[0])
    estimate = 0.0
    for _ in range(iterations):
        w = M @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - estimate) < tol * max(1.0, norm):
            return norm
        estimate = norm
    return estimate


def _damped_iteration(seed: np.ndarray, A: np.ndarray, h: np.ndarray) -> Optional[np.ndarray]:
    m = seed.astype(float)
    for _ in range(ITERATION_BUDGET):
        nxt = (1.0 - DAMPING) * m + DAMPING * self_consistency_map(m, A, h)
        if np.max(np.abs(nxt - m)) < UPDATE_TOLERANCE:
            return nxt
        m = nxt
    return None


def _newton_polish(m: np.ndarray, A: np.ndarray, h: np.ndarray, steps: int = 50) -> np.ndarray:
    """Newton steps on F(m) = m - tanh(A m + h) while they reduce the residual."""
    identity = np.eye(len(m))
    best, best_res = m, residual(m, A, h)
    for _ in range(steps):
        if best_res < 1e-16:
            break
        t = self_consistency_map(best, A, h)
        jac = identity - np.diag(1.0 - t**2) @ A
        try:
            candidate = best - np.linalg.solve(jac, best - t)
        except np.linalg.LinAlgError:
            break
        if np.any(np.abs(candidate) >= 1.0):
            break
        cand_res = residual(candidate, A, h)
        if cand_res >= best_res:
            break
        best, best_res = candidate, cand_res
    return best


def _scalar_roots(J: float, h: float) -> List[np.ndarray]:
    """All sign-change roots of tanh(J m + h) - m on [-1, 1]."""
    def f(m: float) -> float:
        return float(np.tanh(J * m + h) - m)

    grid = np.linspace(-1.0, 1.0, SCAN_POINTS)
    values = np.tanh(J * grid + h) - grid
    roots: List[np.ndarray] = []
    for i in range(len(grid) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(np.array([grid[i]]))
        elif a * b < 0.0:
            root = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=BRENTQ_RTOL)
            roots.append(np.array([root]))
    if values[-1] == 0.0:
        roots.append(np.array([grid[-1]]))
    return roots


def _vector_roots(A: np.ndarray, h: np.ndarray, seeds: Iterable[np.ndarray]) -> List[np.ndarray]:
    identity = np.eye(len(h))

    def F(m: np.ndarray) -> np.ndarray:
        return m - self_consistency_map(m, A, h)

    def dF(m: np.ndarray) -> np.ndarray:
        t = self_consistency_map(m, A, h)
        return identity - np.diag(1.0 - t**2) @ A

    roots = []
    for seed in seeds:
        sol = optimize.root(F, seed, jac=dF, method="hybr", options={"xtol": 1e-15})
        if sol.success and np.all(np.abs(sol.x) < 1.0):
            roots.append(sol.x)
    return roots


def _classify(m: np.ndarray, A: np.ndarray, h: np.ndarray) -> MeanFieldSolution:
    radius = spectral_radius(map_jacobian(m, A))
    marginal = abs(radius - 1.0) <= MARGINAL_BAND
    return MeanFieldSolution(
        magnetization=tuple(float(x) for x in m),
        residual=residual(m, A, h),
        stable=bool(radius < 1.0 and not marginal),
        marginal=bool(marginal),
        jacobian_radius=radius,
    )


def _collect(candidates: Sequence[np.ndarray], A: np.ndarray, h: np.ndarray) -> List[MeanFieldSolution]:
    accepted: List[np.ndarray] = []
    best_residual = np.inf
    for candidate in candidates:
        polished = _newton_polish(candidate, A, h)
        res = residual(polished, A, h)
        best_residual = min(best_residual, res)
        if res >= RESIDUAL_LIMIT:
            continue
        if any(np.max(np.abs(polished - kept)) < DEDUP_TOLERANCE for kept in accepted):
            continue
        accepted.append(polished)

    if not accepted:
        raise ConvergenceError(
            f"no fixed point reached residual {RESIDUAL_LIMIT:g} from {len(candidates)} "
            f"candidates (best residual {best_residual:.3e})"
        )

    accepted.sort(key=lambda v: tuple(v.tolist()))
    solutions = [_classify(m, A, h) for m in accepted]
    logger.debug(
        f"Mean-field solutions: "
        + ", ".join(f"{s.magnetization} ({'stable' if s.stable else 'unstable'})" for s in solutions)
    )
    return solutions


def _seeds(k: int) -> List[np.ndarray]:
    return [np.array(seed) for seed in itertools.product(SEED_VALUES, repeat=k)]


def _damped_candidates(A: np.ndarray, h: np.ndarray, seeds: Iterable[np.ndarray]) -> List[np.ndarray]:
    found = []
    for seed in seeds:
        fixed = _damped_iteration(seed, A, h)
        if fixed is None:
            logger.debug(f"Damped iteration from {seed.tolist()} did not converge")
        else:
            found.append(fixed)
    return found


def solve_cw(J: float, h: float) -> List[MeanFieldSolution]:
    """All fixed points of m = tanh(J m + h), ordered by magnetization.

    Raises:
        ConvergenceError: if no candidate reaches the residual limit
    """
    A = np.array([[float(J)]])
    field = np.array([float(h)])
    seeds = [np.array([x]) for x in (-1.0, -0.9, -0.5, 0.0, 0.5, 0.9, 1.0)]
    candidates = _damped_candidates(A, field, seeds) + _scalar_roots(float(J), float(h))
    return _collect(candidates, A, field)


def solve_ms(alpha: FractionVector, J: np.ndarray, h: np.ndarray) -> List[MeanFieldSolution]:
    """All fixed points of m_l = tanh(sum_s alpha_s J_ls m_s + h_l) reachable from the seeds.

    Seeds are the 3^k vectors with entries in {-0.9, 0, 0.9}.

    Raises:
        ConvergenceError: if no candidate reaches the residual limit
    """
    J = np.asarray(J, dtype=float)
    field = np.asarray(h, dtype=float)
    A = J @ alpha.diagonal()
    seeds = _seeds(len(field))
    candidates = _damped_candidates(A, field, seeds) + _vector_roots(A, field, seeds)
    return _collect(candidates, A, field)


def solve_model(params: ModelParams) -> List[MeanFieldSolution]:
    """Fixed points for either model family."""
    validate(params)
    if isinstance(params, CwParams):
        return solve_cw(params.coupling, params.field)
    return solve_ms(params.fractions, params.coupling_array(), params.field_array())


def stable_solutions(params: ModelParams) -> List[MeanFieldSolution]:
    return [s for s in solve_model(params) if s.stable]


def reduced_map_matrix(params: ModelParams) -> np.ndarray:
    """A = J D_alpha for the model."""
    if isinstance(params, CwParams):
        return params.coupling_array()
    return params.coupling_array() @ params.fractions.diagonal()


def basin_labels(
    points: np.ndarray,
    params: ModelParams,
    attractors: Sequence[MeanFieldSolution],
) -> np.ndarray:
    """Index of the attractor each point flows to under the damped map.

    Points that stop moving away from every attractor (for instance on the
    unstable fixed point m = 0 at h = 0) go to the nearest attractor; ties
    go to the lexicographically largest one, so m = 0 joins the positive
    well in the symmetric case.
    """
    if not attractors:
        raise ConvergenceError("no stable solution to assign basins to")
    A = reduced_map_matrix(params)
    h = params.field_array()
    targets = np.array([s.magnetization for s in attractors])

    x = np.array(points, dtype=float)
    for _ in range(BASIN_BUDGET):
        distance = np.max(np.abs(x[:, None, :] - targets[None, :, :]), axis=2)
        captured = distance.min(axis=1) < BASIN_CAPTURE
        nxt = (1.0 - DAMPING) * x + DAMPING * np.tanh(x @ A.T + h)
        stationary = np.max(np.abs(nxt - x), axis=1) < UPDATE_TOLERANCE
        if np.all(captured | stationary):
            break
        x = np.where(captured[:, None], x, nxt)
    else:
        logger.debug(f"Basin iteration stopped after {BASIN_BUDGET} steps")

    distance = np.max(np.abs(x[:, None, :] - targets[None, :, :]), axis=2)
    nearest = distance <= distance.min(axis=1, keepdims=True) + BASIN_TIE
    return len(attractors) - 1 - np.argmax(nearest[:, ::-1], axis=1)
