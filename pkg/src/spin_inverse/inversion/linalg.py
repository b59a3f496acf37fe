"""Small dense matrix inversion."""

from typing import NamedTuple

import numpy as np

from spin_inverse.errors import SingularityError

PIVOT_TOLERANCE = 1e-12


class Inverse(NamedTuple):
    matrix: np.ndarray
    condition: float


def gauss_jordan_inverse(matrix: np.ndarray, tolerance: float = PIVOT_TOLERANCE) -> Inverse:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    The matrix counts as singular when a pivot falls below ``tolerance``
    times the largest absolute row sum of the input.

    Returns:
        The inverse and the infinity-norm condition number ||A|| ||A^-1||

    Raises:
        SingularityError: on a vanishing pivot
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")

    scale = float(np.max(np.sum(np.abs(a), axis=1))) if n else 0.0
    threshold = tolerance * scale
    augmented = np.hstack([a, np.eye(n)])

    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(augmented[col:, col])))
        pivot = augmented[pivot_row, col]
        if scale == 0.0 or abs(pivot) < threshold:
            raise SingularityError(
                f"matrix is singular: pivot {abs(pivot):.3e} in column {col} "
                f"below {threshold:.3e}"
            )
        if pivot_row != col:
            augmented[[col, pivot_row]] = augmented[[pivot_row, col]]
        augmented[col] /= augmented[col, col]
        for row in range(n):
            if row != col:
                augmented[row] -= augmented[row, col] * augmented[col]

    inverse = augmented[:, n:]
    condition = scale * float(np.max(np.sum(np.abs(inverse), axis=1)))
    return Inverse(matrix=inverse, condition=condition)
