"""Direct solves with the symmetric grid operators."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import NumericalFailure

__all__ = ["spd_solver"]


def spd_solver(matrix: sp.spmatrix):
    """Factor a symmetric positive definite sparse matrix once; return ``solve``.

    A minimum-degree ordering on ``A + A^T`` with diagonal pivoting keeps the
    fill-in close to that of a Cholesky factor.  ``solve`` accepts a vector or
    an ``(n, k)`` block.
    """
    try:
        lu = splu(
            sp.csc_matrix(matrix),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as exc:
        raise NumericalFailure(f"sparse factorization failed: {exc}") from None

    def solve(b: np.ndarray) -> np.ndarray:
        x = lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure("sparse solve produced non-finite values")
        return x

    return solve
