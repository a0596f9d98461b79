"""Specification tests contrasting panel estimators.

The classical test contrasts the within and GLS estimates: under
exogenous unit effects both are consistent and their difference is
centered at zero with covariance equal to the difference of the two
covariances. The weighted variant replaces the within estimate with the
weighted-likelihood fit, which keeps its power when outliers distort
the classical contrast. Both statistics are asymptotically chi-square
with K degrees of freedom under the null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .estimators import (
    FIXED_EFFECTS,
    RANDOM_EFFECTS,
    WEIGHTED_FIXED_EFFECTS,
    EstimateResult,
)
from .exceptions import (
    DimensionMismatchError,
    MethodMismatchError,
    NegativeArgumentError,
    ZeroTotalVariationError,
)

__all__ = [
    "HAUSMAN",
    "WEIGHTED_HAUSMAN",
    "TestResult",
    "chi_square_sf",
    "hausman_test",
    "weighted_hausman_test",
    "fit_statistics",
]

HAUSMAN = "hausman"
WEIGHTED_HAUSMAN = "weighted_hausman"

# Eigenvalues of the covariance difference below this fraction of the
# largest one are clamped up before inverting.
_EIG_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class TestResult:
    """Outcome of a specification test.

    Attributes
    ----------
    kind : str
        ``HAUSMAN`` or ``WEIGHTED_HAUSMAN``.
    statistic : float
        Quadratic-form statistic; nonnegative.
    df : int
        Degrees of freedom, equal to the number of regressors.
    p_value : float
        Upper-tail chi-square probability of ``statistic``.
    q : ndarray, shape (K,)
        Contrast vector between the two coefficient estimates.
    m_matrix : ndarray, shape (K, K)
        Covariance difference actually inverted, after any repair.
    repaired : bool
        True when any eigenvalue had to be clamped to keep the
        difference positive definite.
    """

    kind: str
    statistic: float
    df: int
    p_value: float
    q: np.ndarray = field(repr=False)
    m_matrix: np.ndarray = field(repr=False)
    repaired: bool


def chi_square_sf(x: float, df: int) -> float:
    """Chi-square survival function ``P(X > x)`` with ``df`` degrees.

    Computed through the regularized upper incomplete gamma function.
    For ``df = 2`` this is exactly ``exp(-x/2)``.

    Raises
    ------
    NegativeArgumentError
        ``x < 0`` or not finite.
    ValueError
        ``df`` is not a positive integer.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise NegativeArgumentError(
            f"statistic must be finite and nonnegative, got {x}"
        )
    if int(df) != df or df < 1:
        raise ValueError(f"df must be a positive integer, got {df}")
    return float(gammaincc(df / 2.0, x / 2.0))


def _contrast(
    kind: str,
    robust: EstimateResult,
    re_result: EstimateResult,
) -> TestResult:
    q = np.asarray(robust.beta, dtype=float) - np.asarray(
        re_result.beta, dtype=float
    )
    k = q.size
    m = np.asarray(robust.cov_beta, dtype=float) - np.asarray(
        re_result.cov_beta, dtype=float
    )
    m = 0.5 * (m + m.T)
    eigvals, eigvecs = np.linalg.eigh(m)
    top = float(eigvals.max())
    floor = _EIG_FLOOR_REL * (top if top > 0.0 else 1.0)
    repaired = bool(np.any(eigvals < floor))
    clamped = np.maximum(eigvals, floor)
    z = eigvecs.T @ q
    statistic = float(np.sum(z * z / clamped))
    m_used = eigvecs @ np.diag(clamped) @ eigvecs.T
    m_used = 0.5 * (m_used + m_used.T)
    return TestResult(
        kind=kind,
        statistic=statistic,
        df=k,
        p_value=chi_square_sf(statistic, k),
        q=q,
        m_matrix=m_used,
        repaired=repaired,
    )


def hausman_test(
    fe_result: EstimateResult, re_result: EstimateResult
) -> TestResult:
    """Contrast the within and GLS estimates.

    The statistic is ``q' M^-1 q`` with ``q`` the coefficient
    difference and ``M`` the difference of the two covariance
    matrices. ``M`` is symmetrized and its eigenvalues clamped to a
    small positive floor before inversion; the ``repaired`` flag
    records whether clamping occurred.

    Raises
    ------
    MethodMismatchError
        The first argument is not a fixed-effects fit or the second is
        not a random-effects fit.
    DimensionMismatchError
        The coefficient vectors have different lengths.
    """
    if fe_result.method != FIXED_EFFECTS:
        raise MethodMismatchError(
            f"expected a {FIXED_EFFECTS} fit, got {fe_result.method}"
        )
    _check_re(re_result, fe_result)
    return _contrast(HAUSMAN, fe_result, re_result)


def weighted_hausman_test(
    wfe_result: EstimateResult, re_result: EstimateResult
) -> TestResult:
    """Contrast the weighted fixed-effects and GLS estimates.

    Same construction as :func:`hausman_test` with the weighted fit in
    place of the within fit. With weights identically one the two
    statistics coincide.

    Raises
    ------
    MethodMismatchError, DimensionMismatchError
        As for :func:`hausman_test`.
    """
    if wfe_result.method != WEIGHTED_FIXED_EFFECTS:
        raise MethodMismatchError(
            f"expected a {WEIGHTED_FIXED_EFFECTS} fit, got {wfe_result.method}"
        )
    _check_re(re_result, wfe_result)
    return _contrast(WEIGHTED_HAUSMAN, wfe_result, re_result)


def _check_re(re_result: EstimateResult, other: EstimateResult) -> None:
    if re_result.method != RANDOM_EFFECTS:
        raise MethodMismatchError(
            f"expected a {RANDOM_EFFECTS} fit, got {re_result.method}"
        )
    if len(re_result.beta) != len(other.beta):
        raise DimensionMismatchError(
            f"coefficient lengths differ: {len(other.beta)} vs "
            f"{len(re_result.beta)}"
        )


def fit_statistics(result: EstimateResult) -> tuple[float, float]:
    """Residual sum of squares and R^2 of a fit, on its own scale.

    Recomputes the RSS from the stored residuals and sets it against
    the total variation of the transformed response recorded by the
    fit.

    Raises
    ------
    ZeroTotalVariationError
        The recorded total variation is not positive.
    """
    resid = np.asarray(result.residuals, dtype=float)
    rss = float(np.sum(resid * resid))
    if not (result.tss > 0.0):
        raise ZeroTotalVariationError(
            "total variation must be positive to form R^2"
        )
    return rss, 1.0 - rss / result.tss
