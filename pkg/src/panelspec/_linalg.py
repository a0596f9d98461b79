"""Internal least-squares solver with an explicit rank policy.

All estimators route through :func:`lstsq_qr`, which factors the design
by column-pivoted QR and refuses to solve near-singular systems instead
of silently regularizing them. Explicit matrix inversion is avoided;
the Gram inverse is assembled from the triangular factor.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import qr, solve_triangular

from .exceptions import RankDeficientDesignError

# Relative pivot threshold: |R[j, j]| below RCOND times the largest pivot
# marks the design as rank deficient.
RCOND = 1e-10


def lstsq_qr(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``min ||x b - y||`` and return ``(b, (x'x)^-1)``.

    Parameters
    ----------
    x : ndarray, shape (n, k)
        Design matrix with n >= k.
    y : ndarray, shape (n,)
        Response vector.

    Returns
    -------
    beta : ndarray, shape (k,)
    gram_inv : ndarray, shape (k, k)
        Symmetric inverse of ``x.T @ x``.

    Raises
    ------
    RankDeficientDesignError
        The pivoted R diagonal decays below ``RCOND`` relative to its
        largest entry, or the design has more columns than rows.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = x.shape
    if n < k:
        raise RankDeficientDesignError(
            f"design has {n} rows but {k} columns"
        )
    q, r, piv = qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0 or diag.min() < RCOND * diag.max():
        raise RankDeficientDesignError(
            "design matrix is rank deficient (collinear or constant "
            f"columns): pivoted diagonal {diag}"
        )
    r_inv = solve_triangular(r, np.eye(k), lower=False)
    beta = np.empty(k)
    beta[piv] = r_inv @ (q.T @ y)
    gram_inv = np.empty((k, k))
    gram_inv[np.ix_(piv, piv)] = r_inv @ r_inv.T
    # Exact symmetry keeps downstream eigendecompositions honest.
    gram_inv = 0.5 * (gram_inv + gram_inv.T)
    return beta, gram_inv
