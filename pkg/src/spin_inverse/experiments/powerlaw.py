"""Power-law fits y = a x^b by least squares on log-log axes."""

import math
from typing import Sequence

import numpy as np
from scipy import stats

from spin_inverse.errors import FitDomainError
from spin_inverse.models import PowerLawFit

MIN_POINTS = 3


def powerlaw_fit(xs: Sequence[float], ys: Sequence[float]) -> PowerLawFit:
    """Ordinary least squares of ln y on ln x.

    R^2 is computed on the log scale; a fit with zero residual reports 1,
    including a constant y.

    Raises:
        FitDomainError: for fewer than 3 points, mismatched lengths,
            non-positive values or a single distinct x
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise FitDomainError(f"xs and ys differ in length ({x.size} vs {y.size})")
    if x.size < MIN_POINTS:
        raise FitDomainError(f"a power-law fit needs at least {MIN_POINTS} points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))) or np.any(x <= 0) or np.any(y <= 0):
        raise FitDomainError("power-law fit needs strictly positive, finite values")
    if np.all(x == x[0]):
        raise FitDomainError("power-law fit needs at least two distinct x values")

    log_x, log_y = np.log(x), np.log(y)
    result = stats.linregress(log_x, log_y)
    residuals = log_y - (result.intercept + result.slope * log_x)
    ss_res = math.fsum((residuals**2).tolist())
    ss_tot = math.fsum(((log_y - log_y.mean()) ** 2).tolist())
    if ss_tot == 0.0 or ss_res == 0.0:
        r_squared = 1.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))

    amplitude = math.exp(result.intercept)
    return PowerLawFit(
        amplitude=amplitude,
        exponent=float(result.slope),
        r_squared=r_squared,
        amplitude_stderr=amplitude * float(result.intercept_stderr),
        exponent_stderr=float(result.stderr),
        points=int(x.size),
    )
