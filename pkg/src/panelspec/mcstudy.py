"""Monte Carlo size and power studies for the specification tests.

Provides the two data-generating processes (exogenous and correlated
unit effects), the two vertical-outlier contamination schemes, and a
driver that runs both specification tests over many replications and
tabulates rejection rates on a grid of nominal levels.

Reproducibility contract: every replication draws from its own
substream derived from ``(master seed, replication index)``, normal
variates are produced by the inverse CDF from 53-bit uniforms, and
results are aggregated in replication order. Outputs are therefore
byte-identical for a given seed regardless of the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .data import PanelDataset
from .estimators import (
    fit_fixed_effects,
    fit_random_effects,
)
from .exceptions import PanelSpecError, TooManyOutliersError
from .inference import (
    HAUSMAN,
    WEIGHTED_HAUSMAN,
    hausman_test,
    weighted_hausman_test,
)
from .wle import WleConfig, fit_weighted_fixed_effects

__all__ = [
    "NULL",
    "ALTERNATIVE",
    "NO_CONTAMINATION",
    "RANDOM_VERTICAL",
    "CONCENTRATED_VERTICAL",
    "THREADS_ENV_VAR",
    "DgpConfig",
    "ContaminationConfig",
    "StudyResult",
    "standard_normal",
    "substream",
    "generate_null",
    "generate_alternative",
    "generate",
    "contaminate_random",
    "contaminate_concentrated",
    "apply_contamination",
    "run_study",
    "study_to_json",
    "study_to_csv",
]

NULL = "null"
ALTERNATIVE = "alternative"

NO_CONTAMINATION = "none"
RANDOM_VERTICAL = "random"
CONCENTRATED_VERTICAL = "concentrated"

# Worker-count override: 0 or unset means auto, k >= 1 means exactly k.
THREADS_ENV_VAR = "PANELSPEC_THREADS"

_DEFAULT_BOUNDS = {
    RANDOM_VERTICAL: (10.0, 35.0),
    CONCENTRATED_VERTICAL: (17.0, 18.0),
}


@dataclass(frozen=True)
class DgpConfig:
    """Design of one data-generating process.

    Attributes
    ----------
    n_units, n_periods : int
        Panel dimensions N and T.
    beta : tuple of float
        Slope vector; its length fixes the number of regressors.
    hypothesis : str
        ``NULL`` draws unit effects independent of the regressors;
        ``ALTERNATIVE`` makes each unit effect the time average of
        ``x @ tau`` plus noise, so the effects are correlated with the
        regressors and the specification tests should reject.
    tau : tuple of float
        Correlation loadings under the alternative; same length as
        ``beta``. All zeros reproduces the null draw for draw.
    seed : int
        Master seed; replication ``r`` uses the substream
        ``(seed, r)``.
    """

    n_units: int
    n_periods: int
    beta: tuple[float, ...] = (1.0, -1.5)
    hypothesis: str = NULL
    tau: tuple[float, ...] = (1.0, 1.0)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "tau", tuple(float(v) for v in self.tau))
        if self.n_units < 2 or self.n_periods < 2:
            raise ValueError(
                f"need N >= 2 and T >= 2, got N={self.n_units}, "
                f"T={self.n_periods}"
            )
        if not self.beta:
            raise ValueError("beta must be nonempty")
        if self.hypothesis not in (NULL, ALTERNATIVE):
            raise ValueError(f"unknown hypothesis {self.hypothesis!r}")
        if self.hypothesis == ALTERNATIVE and len(self.tau) != len(self.beta):
            raise ValueError(
                f"tau has length {len(self.tau)}, expected {len(self.beta)}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass(frozen=True)
class ContaminationConfig:
    """Vertical-outlier scheme applied after generation.

    Attributes
    ----------
    scheme : str
        ``NO_CONTAMINATION``, ``RANDOM_VERTICAL`` (replace m response
        cells chosen uniformly over the panel), or
        ``CONCENTRATED_VERTICAL`` (replace blocks of ceil(T/2)
        consecutive responses in randomly chosen units until exactly m
        cells are replaced; the last unit may get a shorter block).
    n_outliers : int
        Exact number of replaced cells m.
    low, high : float, optional
        Replacement values are drawn uniformly from [low, high).
        Defaults: (10, 35) for the random scheme, (17, 18) for the
        concentrated one.
    """

    scheme: str = NO_CONTAMINATION
    n_outliers: int = 0
    low: Optional[float] = None
    high: Optional[float] = None

    def __post_init__(self) -> None:
        if self.scheme not in (
            NO_CONTAMINATION,
            RANDOM_VERTICAL,
            CONCENTRATED_VERTICAL,
        ):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.n_outliers < 0:
            raise ValueError(
                f"n_outliers must be nonnegative, got {self.n_outliers}"
            )
        if self.scheme == NO_CONTAMINATION and self.n_outliers != 0:
            raise ValueError("scheme 'none' cannot place outliers")
        if (self.low is None) != (self.high is None):
            raise ValueError("low and high must be given together")
        if self.low is not None and not (self.low < self.high):
            raise ValueError(
                f"need low < high, got [{self.low}, {self.high})"
            )

    def bounds(self) -> tuple[float, float]:
        """Replacement-value bounds, falling back to scheme defaults."""
        if self.low is not None:
            return float(self.low), float(self.high)
        if self.scheme in _DEFAULT_BOUNDS:
            return _DEFAULT_BOUNDS[self.scheme]
        raise ValueError("no replacement bounds for scheme 'none'")


def substream(seed: int, replication: int) -> np.random.Generator:
    """Independent generator for one replication of one study."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((seed, replication)))
    )


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals by inverse CDF from 53-bit uniforms.

    The uniform is ``(2k + 1) / 2^54`` for a 53-bit integer ``k``, so
    it lies strictly inside (0, 1) and the quantile function never
    sees 0 or 1. Unlike rejection samplers, consumption from the
    stream is one draw per variate on every platform.
    """
    k = rng.integers(0, 1 << 53, size=size, dtype=np.int64)
    u = (2.0 * k + 1.0) * (2.0 ** -54)
    return ndtri(u)


def _uniform(
    rng: np.random.Generator, low: float, high: float, size
) -> np.ndarray:
    return low + (high - low) * rng.random(size)


def _labels(n: int, t: int) -> tuple[tuple[str, ...], tuple[int, ...]]:
    return tuple(f"u{i + 1:04d}" for i in range(n)), tuple(range(1, t + 1))


def generate_null(
    cfg: DgpConfig, rng: Optional[np.random.Generator] = None
) -> PanelDataset:
    """Panel with unit effects independent of the regressors.

    Draws, in order: regressors X (N, T, K), unit effects alpha (N,),
    idiosyncratic errors eps (N, T), all standard normal, and sets
    ``y = X @ beta + alpha + eps``.
    """
    rng = rng if rng is not None else substream(cfg.seed, 0)
    n, t, k = cfg.n_units, cfg.n_periods, len(cfg.beta)
    x = standard_normal(rng, (n, t, k))
    alpha = standard_normal(rng, n)
    eps = standard_normal(rng, (n, t))
    y = x @ np.array(cfg.beta) + alpha[:, np.newaxis] + eps
    units, times = _labels(n, t)
    return PanelDataset(units, times, y, x)


def generate_alternative(
    cfg: DgpConfig, rng: Optional[np.random.Generator] = None
) -> PanelDataset:
    """Panel whose unit effects are correlated with the regressors.

    Identical draw order to :func:`generate_null` (X, unit shocks,
    eps), but the unit effect is ``mean_t(x_it' tau) + eta_i``. With
    ``tau = 0`` the output is bit-identical to the null draw.
    """
    if len(cfg.tau) != len(cfg.beta):
        raise ValueError(
            f"tau has length {len(cfg.tau)}, expected {len(cfg.beta)}"
        )
    rng = rng if rng is not None else substream(cfg.seed, 0)
    n, t, k = cfg.n_units, cfg.n_periods, len(cfg.beta)
    x = standard_normal(rng, (n, t, k))
    eta = standard_normal(rng, n)
    eps = standard_normal(rng, (n, t))
    alpha = (x @ np.array(cfg.tau)).mean(axis=1) + eta
    y = x @ np.array(cfg.beta) + alpha[:, np.newaxis] + eps
    units, times = _labels(n, t)
    return PanelDataset(units, times, y, x)


def generate(
    cfg: DgpConfig, rng: Optional[np.random.Generator] = None
) -> PanelDataset:
    """Dispatch on ``cfg.hypothesis``."""
    if cfg.hypothesis == ALTERNATIVE:
        return generate_alternative(cfg, rng)
    return generate_null(cfg, rng)


def contaminate_random(
    dataset: PanelDataset,
    cfg: ContaminationConfig,
    rng: np.random.Generator,
) -> PanelDataset:
    """Replace ``m`` distinct response cells, chosen uniformly.

    Cell positions are drawn first (a permutation prefix over the
    N*T cells in unit-major order), then the replacement values.
    ``m = 0`` returns the dataset unchanged without consuming draws.

    Raises
    ------
    TooManyOutliersError
        ``m`` exceeds the number of cells.
    """
    if cfg.scheme != RANDOM_VERTICAL:
        raise ValueError(f"expected scheme {RANDOM_VERTICAL!r}, got {cfg.scheme!r}")
    n, t = dataset.y.shape
    m = cfg.n_outliers
    if m > n * t:
        raise TooManyOutliersError(
            f"cannot place {m} outliers in {n * t} cells"
        )
    if m == 0:
        return dataset
    low, high = cfg.bounds()
    cells = rng.permutation(n * t)[:m]
    y = dataset.y.copy()
    y.reshape(-1)[cells] = _uniform(rng, low, high, m)
    return PanelDataset(dataset.unit_ids, dataset.time_ids, y, dataset.x)


def contaminate_concentrated(
    dataset: PanelDataset,
    cfg: ContaminationConfig,
    rng: np.random.Generator,
) -> PanelDataset:
    """Replace blocks of consecutive responses within chosen units.

    The block length is ``b = ceil(T / 2)``, so every contaminated
    unit has at least half its responses replaced, except possibly one
    remainder unit that takes ``m mod b`` cells so that exactly ``m``
    cells change. Draw order: unit selection (permutation prefix),
    then per unit its block start, then its replacement values.

    Raises
    ------
    TooManyOutliersError
        ``m`` exceeds ``N * b``, the scheme's capacity.
    """
    if cfg.scheme != CONCENTRATED_VERTICAL:
        raise ValueError(
            f"expected scheme {CONCENTRATED_VERTICAL!r}, got {cfg.scheme!r}"
        )
    n, t = dataset.y.shape
    m = cfg.n_outliers
    b = (t + 1) // 2
    if m > n * b:
        raise TooManyOutliersError(
            f"cannot place {m} outliers in blocks of {b} over {n} units"
        )
    if m == 0:
        return dataset
    low, high = cfg.bounds()
    full, rem = divmod(m, b)
    chosen = rng.permutation(n)[: full + (1 if rem else 0)]
    y = dataset.y.copy()
    for j, unit in enumerate(chosen):
        length = b if j < full else rem
        start = int(rng.integers(0, t - length + 1))
        y[unit, start : start + length] = _uniform(rng, low, high, length)
    return PanelDataset(dataset.unit_ids, dataset.time_ids, y, dataset.x)


def apply_contamination(
    dataset: PanelDataset,
    cfg: Optional[ContaminationConfig],
    rng: np.random.Generator,
) -> PanelDataset:
    """Dispatch on ``cfg.scheme``; None or 'none' is a no-op."""
    if cfg is None or cfg.scheme == NO_CONTAMINATION:
        return dataset
    if cfg.scheme == RANDOM_VERTICAL:
        return contaminate_random(dataset, cfg, rng)
    return contaminate_concentrated(dataset, cfg, rng)


@dataclass(frozen=True)
class StudyResult:
    """Tabulated outcome of one Monte Carlo study.

    Attributes
    ----------
    gamma_grid : tuple of float
        Nominal levels the rejection rates are evaluated at.
    rejection_rates : dict
        Per test kind, a tuple parallel to ``gamma_grid`` with the
        fraction of successful replications whose p-value is at or
        below the level.
    statistics : dict
        Per test kind, the realized statistics of the successful
        replications, in replication order.
    s_replications : int
        Number of replications requested.
    failures : int
        Replications aborted by estimation errors; excluded from the
        rates' denominators.
    df : int
        Degrees of freedom of both tests (number of regressors).
    """

    gamma_grid: tuple[float, ...]
    rejection_rates: dict[str, tuple[float, ...]]
    statistics: dict[str, np.ndarray] = field(repr=False)
    s_replications: int
    failures: int
    df: int


def _resolve_threads(n_threads: Optional[int]) -> int:
    if n_threads is None:
        raw = os.environ.get(THREADS_ENV_VAR, "").strip()
        if not raw:
            return 1
        n_threads = int(raw)
        if n_threads == 0:
            return os.cpu_count() or 1
    if n_threads < 1:
        raise ValueError(f"thread count must be >= 1, got {n_threads}")
    return n_threads


def _check_capacity(
    dgp: DgpConfig, contamination: Optional[ContaminationConfig]
) -> None:
    """Reject impossible outlier counts before any replication runs."""
    if contamination is None or contamination.scheme == NO_CONTAMINATION:
        return
    n, t, m = dgp.n_units, dgp.n_periods, contamination.n_outliers
    if contamination.scheme == RANDOM_VERTICAL and m > n * t:
        raise TooManyOutliersError(
            f"cannot place {m} outliers in {n * t} cells"
        )
    b = (t + 1) // 2
    if contamination.scheme == CONCENTRATED_VERTICAL and m > n * b:
        raise TooManyOutliersError(
            f"cannot place {m} outliers in blocks of {b} over {n} units"
        )


def _replicate(
    dgp: DgpConfig,
    contamination: Optional[ContaminationConfig],
    wle_config: Optional[WleConfig],
    r: int,
):
    rng = substream(dgp.seed, r)
    try:
        ds = generate(dgp, rng)
        ds = apply_contamination(ds, contamination, rng)
        fe = fit_fixed_effects(ds)
        re = fit_random_effects(ds)
        wfe = fit_weighted_fixed_effects(ds, wle_config)
        h = hausman_test(fe, re)
        wh = weighted_hausman_test(wfe, re)
        return (h.statistic, h.p_value, wh.statistic, wh.p_value)
    except PanelSpecError:
        return None


def run_study(
    dgp: DgpConfig,
    contamination: Optional[ContaminationConfig] = None,
    *,
    s: int = 1000,
    gamma_grid: Sequence[float] = (0.05,),
    wle_config: Optional[WleConfig] = None,
    n_threads: Optional[int] = None,
) -> StudyResult:
    """Run both specification tests over ``s`` replications.

    Each replication generates a panel from ``dgp``'s substream
    ``(seed, r)``, applies the contamination, fits the within, GLS,
    and weighted estimators, and evaluates both tests. Replications
    that abort with a package error count as failures and are excluded
    from the rejection rates.

    Parameters
    ----------
    n_threads : int, optional
        Worker threads. None reads the PANELSPEC_THREADS environment
        variable (0 or unset = auto/serial). Results are identical for
        any value.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    gammas = tuple(float(g) for g in gamma_grid)
    if not gammas or any(not (0.0 < g < 1.0) for g in gammas):
        raise ValueError(f"levels must lie in (0, 1), got {gammas}")
    _check_capacity(dgp, contamination)
    workers = _resolve_threads(n_threads)

    if workers == 1:
        raw = [_replicate(dgp, contamination, wle_config, r) for r in range(s)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            raw = list(
                pool.map(
                    lambda r: _replicate(dgp, contamination, wle_config, r),
                    range(s),
                )
            )

    kept = [row for row in raw if row is not None]
    failures = s - len(kept)
    h_stats = np.array([row[0] for row in kept])
    h_pvals = np.array([row[1] for row in kept])
    w_stats = np.array([row[2] for row in kept])
    w_pvals = np.array([row[3] for row in kept])

    def rates(pvals: np.ndarray) -> tuple[float, ...]:
        if pvals.size == 0:
            return tuple(math.nan for _ in gammas)
        return tuple(float(np.mean(pvals <= g)) for g in gammas)

    return StudyResult(
        gamma_grid=gammas,
        rejection_rates={HAUSMAN: rates(h_pvals), WEIGHTED_HAUSMAN: rates(w_pvals)},
        statistics={HAUSMAN: h_stats, WEIGHTED_HAUSMAN: w_stats},
        s_replications=s,
        failures=failures,
        df=len(dgp.beta),
    )


def study_to_json(result: StudyResult) -> str:
    """Deterministic JSON rendering of a study."""
    doc = {
        "s_replications": result.s_replications,
        "failures": result.failures,
        "df": result.df,
        "gamma_grid": list(result.gamma_grid),
        "tests": {
            kind: {
                "rejection_rates": list(result.rejection_rates[kind]),
                "statistics": [float(v) for v in result.statistics[kind]],
            }
            for kind in sorted(result.statistics)
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def study_to_csv(result: StudyResult) -> str:
    """Flat CSV: one row per (test, gamma), fixed column order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["test", "gamma", "rejection_rate", "s", "failures"])
    for kind in sorted(result.rejection_rates):
        for gamma, rate in zip(result.gamma_grid, result.rejection_rates[kind]):
            writer.writerow(
                [kind, repr(gamma), repr(rate),
                 result.s_replications, result.failures]
            )
    return buf.getvalue()
