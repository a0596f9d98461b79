"""Balanced panel containers and long-format CSV ingestion.

A panel holds a response ``y`` of shape (N, T) and regressors ``x`` of
shape (N, T, K) for N cross-sectional units observed over T periods.
Arrays are stored read-only; transformations and estimators never mutate
a dataset in place.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .exceptions import (
    DuplicateCellError,
    InterceptColumnError,
    MissingCellError,
    NonNumericValueError,
    SchemaError,
    TooFewUnitsOrPeriodsError,
)

__all__ = [
    "ColumnSchema",
    "PanelDataset",
    "load_long_csv",
    "to_stacked",
    "from_stacked",
]


@dataclass(frozen=True)
class ColumnSchema:
    """Column names binding a long-format CSV to panel roles.

    Parameters
    ----------
    unit_col, time_col, y_col : str
        Names of the unit identifier, time identifier, and response
        columns.
    x_cols : sequence of str
        Names of the regressor columns, in the order the regressors
        should appear in the dataset. Must be nonempty.
    """

    unit_col: str
    time_col: str
    y_col: str
    x_cols: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_cols", tuple(self.x_cols))
        names = [self.unit_col, self.time_col, self.y_col, *self.x_cols]
        if not self.x_cols:
            raise SchemaError("at least one regressor column is required")
        if any(not isinstance(n, str) or not n for n in names):
            raise SchemaError("column names must be nonempty strings")
        if len(set(names)) != len(names):
            raise SchemaError(f"column names must be distinct, got {names}")


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PanelDataset:
    """A balanced panel of N units over T periods with K regressors.

    Parameters
    ----------
    unit_ids : sequence of hashable
        N distinct unit labels, in storage order.
    time_ids : sequence of hashable
        T distinct period labels, in storage order.
    y : ndarray, shape (N, T)
        Response values; ``y[i, t]`` belongs to unit ``unit_ids[i]`` at
        period ``time_ids[t]``.
    x : ndarray, shape (N, T, K)
        Regressor values, same cell layout, K >= 1 regressors.

    Notes
    -----
    Construction validates balance-by-shape, finiteness, minimum sizes
    (N >= 2, T >= 2, K >= 1 and N(T-1) > K so the within estimator is
    identified), and rejects globally constant regressor columns, which
    the demeaning transformations would annihilate.

    The stored arrays are defensive copies with the write flag cleared.
    """

    unit_ids: tuple[Hashable, ...]
    time_ids: tuple[Hashable, ...]
    y: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "unit_ids", tuple(self.unit_ids))
        object.__setattr__(self, "time_ids", tuple(self.time_ids))
        if len(set(self.unit_ids)) != len(self.unit_ids):
            raise DuplicateCellError("unit labels contain duplicates")
        if len(set(self.time_ids)) != len(self.time_ids):
            raise DuplicateCellError("time labels contain duplicates")

        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        n, t = len(self.unit_ids), len(self.time_ids)
        if y.shape != (n, t):
            raise MissingCellError(
                f"y has shape {y.shape}, expected ({n}, {t}) for a balanced panel"
            )
        if x.ndim != 3 or x.shape[:2] != (n, t):
            raise MissingCellError(
                f"x has shape {x.shape}, expected ({n}, {t}, K)"
            )
        k = x.shape[2]
        if n < 2 or t < 2 or k < 1 or n * (t - 1) <= k:
            raise TooFewUnitsOrPeriodsError(
                f"need N >= 2, T >= 2, K >= 1 and N(T-1) > K; "
                f"got N={n}, T={t}, K={k}"
            )
        if not np.all(np.isfinite(y)):
            i, t_ = np.argwhere(~np.isfinite(y))[0]
            raise NonNumericValueError(
                f"non-finite response at unit {self.unit_ids[i]!r}, "
                f"time {self.time_ids[t_]!r}"
            )
        if not np.all(np.isfinite(x)):
            i, t_, j = np.argwhere(~np.isfinite(x))[0]
            raise NonNumericValueError(
                f"non-finite regressor {j} at unit {self.unit_ids[i]!r}, "
                f"time {self.time_ids[t_]!r}"
            )
        flat = x.reshape(n * t, k)
        constant = np.all(flat == flat[0], axis=0)
        if np.any(constant):
            j = int(np.argmax(constant))
            raise InterceptColumnError(
                f"regressor column {j} is constant across all cells; "
                "intercepts are absorbed by the transformations and must "
                "not be supplied as regressors"
            )
        object.__setattr__(self, "y", _as_readonly(y))
        object.__setattr__(self, "x", _as_readonly(x))

    @property
    def n_units(self) -> int:
        """Number of cross-sectional units N."""
        return len(self.unit_ids)

    @property
    def n_periods(self) -> int:
        """Number of time periods T."""
        return len(self.time_ids)

    @property
    def n_regressors(self) -> int:
        """Number of regressors K."""
        return int(self.x.shape[2])


def load_long_csv(path, schema: ColumnSchema) -> PanelDataset:
    """Read a long-format CSV (one row per unit-period) into a panel.

    Parameters
    ----------
    path : str or path-like
        CSV file with a header row.
    schema : ColumnSchema
        Which columns hold the unit id, time id, response, and
        regressors.

    Returns
    -------
    PanelDataset
        Units ordered by first appearance in the file; periods ordered
        naturally (numerically when every time label parses as a
        number, lexicographically otherwise).

    Raises
    ------
    SchemaError
        A schema column is missing from the header.
    NonNumericValueError
        A response or regressor cell does not parse as a number.
    DuplicateCellError
        The same (unit, time) pair occurs on two rows.
    MissingCellError
        Some unit lacks a row for some period (unbalanced panel).
    TooFewUnitsOrPeriodsError
        The resulting panel violates the minimum-size bounds.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        wanted = [schema.unit_col, schema.time_col, schema.y_col, *schema.x_cols]
        missing = [c for c in wanted if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: columns {missing} not found in header {header}"
            )
        idx = {c: header.index(c) for c in wanted}

        cells: dict[tuple[str, str], tuple[float, list[float]]] = {}
        units: list[str] = []
        seen_units: set[str] = set()
        times: set[str] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            unit = row[idx[schema.unit_col]].strip()
            time = row[idx[schema.time_col]].strip()
            key = (unit, time)
            if key in cells:
                raise DuplicateCellError(
                    f"{path}:{lineno}: duplicate cell for unit {unit!r}, "
                    f"time {time!r}"
                )
            vals = []
            for col in (schema.y_col, *schema.x_cols):
                raw = row[idx[col]].strip()
                try:
                    v = float(raw)
                except ValueError:
                    raise NonNumericValueError(
                        f"{path}:{lineno}: column {col!r} value {raw!r} "
                        "is not numeric"
                    ) from None
                if not np.isfinite(v):
                    raise NonNumericValueError(
                        f"{path}:{lineno}: column {col!r} value {raw!r} "
                        "is not finite"
                    )
                vals.append(v)
            cells[key] = (vals[0], vals[1:])
            if unit not in seen_units:
                seen_units.add(unit)
                units.append(unit)
            times.add(time)

    time_list = sorted(times, key=_natural_key)
    for unit in units:
        for time in time_list:
            if (unit, time) not in cells:
                raise MissingCellError(
                    f"{path}: unbalanced panel, no row for unit {unit!r} "
                    f"at time {time!r}"
                )

    n, t, k = len(units), len(time_list), len(schema.x_cols)
    if n < 2 or t < 2 or n * (t - 1) <= k:
        raise TooFewUnitsOrPeriodsError(
            f"{path}: need N >= 2, T >= 2 and N(T-1) > K; "
            f"got N={n}, T={t}, K={k}"
        )
    y = np.empty((n, t))
    x = np.empty((n, t, k))
    for i, unit in enumerate(units):
        for j, time in enumerate(time_list):
            y[i, j], x[i, j] = cells[(unit, time)]
    return PanelDataset(tuple(units), tuple(time_list), y, x)


def _natural_key(label: str):
    """Sort key: numeric value when the label parses, else the string.

    A mixed set of numeric and non-numeric labels falls back to pure
    lexicographic order via the leading discriminator.
    """
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


def to_stacked(dataset: PanelDataset) -> tuple[np.ndarray, np.ndarray]:
    """Return unit-major stacked views ``(y, x)``.

    Row ``i * T + t`` of the output corresponds to unit ``i``, period
    ``t`` of the panel. The arrays are read-only views of the dataset's
    storage.
    """
    n, t, k = dataset.x.shape
    return dataset.y.reshape(n * t), dataset.x.reshape(n * t, k)


def from_stacked(
    y: np.ndarray,
    x: np.ndarray,
    unit_ids: Sequence[Hashable],
    time_ids: Sequence[Hashable],
) -> PanelDataset:
    """Rebuild a panel from unit-major stacked arrays.

    Inverse of :func:`to_stacked`: ``from_stacked(*to_stacked(ds),
    ds.unit_ids, ds.time_ids)`` reproduces ``ds`` exactly.
    """
    n, t = len(unit_ids), len(time_ids)
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != (n * t,):
        raise MissingCellError(
            f"stacked y has shape {y.shape}, expected ({n * t},)"
        )
    if x.ndim != 2 or x.shape[0] != n * t:
        raise MissingCellError(
            f"stacked x has shape {x.shape}, expected ({n * t}, K)"
        )
    return PanelDataset(
        tuple(unit_ids),
        tuple(time_ids),
        y.reshape(n, t),
        x.reshape(n, t, x.shape[1]),
    )
