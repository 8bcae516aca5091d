"""Loss / expense dataset ingestion, summaries, margins, and synthetic data.

CSV is the only ingestion format; columns are selected by name through an
explicit mapping so that files with arbitrary schemas can be absorbed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DataError, ParameterError
from .sampling import SeededStream, sample_mixture


@dataclass
class ClaimsDataset:
    """Paired loss / expense observations with optional right-censoring of the loss."""

    x: np.ndarray
    y: np.ndarray
    delta: Optional[np.ndarray] = None
    limit: Optional[np.ndarray] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.y.shape != self.x.shape:
            raise DataError("x and y must be equal-length vectors")
        if np.any(~np.isfinite(self.x)) or np.any(~np.isfinite(self.y)):
            raise DataError("non-finite values in dataset")
        if np.any(self.x <= 0.0) or np.any(self.y <= 0.0):
            raise DataError("losses and expenses must be positive")
        if self.delta is not None:
            self.delta = np.asarray(self.delta, dtype=np.int8)
            if self.delta.shape != self.x.shape or not np.all((self.delta == 0) | (self.delta == 1)):
                raise DataError("delta must be a 0/1 vector matching the data length")
            if self.limit is not None:
                self.limit = np.asarray(self.limit, dtype=float)
                bad = (self.delta == 0) & (self.x != self.limit)
                if np.any(bad):
                    raise DataError("censored rows must sit exactly at their policy limit")
            elif np.any(self.delta == 0):
                raise DataError("censored rows need a policy limit column")

    @property
    def n(self):
        return len(self.x)


def load_csv(path, mapping):
    """Load a claims dataset from CSV.

    Parameters
    ----------
    path : str
    mapping : dict
        Keys ``loss`` and ``alae`` name the mandatory columns; optional keys
        ``censor`` (1 = uncensored, 0 = censored) and ``limit``.

    Rows violating the dataset invariants raise ``DataError`` naming the row.
    """
    for key in ("loss", "alae"):
        if key not in mapping:
            raise DataError(f"column mapping must name the {key!r} column")
    xs, ys, deltas, limits = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError("CSV file has no header row")
        for key, col in mapping.items():
            if col is not None and col not in reader.fieldnames:
                raise DataError(f"missing column {col!r} for {key!r}")
        for lineno, row in enumerate(reader, start=2):
            def cell(key, required=True):
                col = mapping.get(key)
                if col is None:
                    return None
                raw = row.get(col, "")
                if raw is None or raw.strip() == "":
                    if required:
                        raise DataError(f"row {lineno}: empty {key!r} cell")
                    return None
                try:
                    return float(raw)
                except ValueError:
                    raise DataError(f"row {lineno}: non-numeric {key!r} cell {raw!r}") from None

            x = cell("loss")
            y = cell("alae")
            if x <= 0 or y <= 0:
                raise DataError(f"row {lineno}: non-positive loss or alae")
            xs.append(x)
            ys.append(y)
            if "censor" in mapping and mapping["censor"] is not None:
                d = cell("censor")
                if d not in (0.0, 1.0):
                    raise DataError(f"row {lineno}: censor flag must be 0 or 1")
                deltas.append(int(d))
                limits.append(cell("limit", required=False) if "limit" in mapping else None)
    if not xs:
        raise DataError("empty dataset")
    delta = np.asarray(deltas) if deltas else None
    limit = None
    if delta is not None and any(v is not None for v in limits):
        limit = np.asarray([v if v is not None else np.nan for v in limits])
    return ClaimsDataset(x=np.asarray(xs), y=np.asarray(ys), delta=delta, limit=limit)


def save_csv(ds, path):
    """Write a dataset back out; inverse of :func:`load_csv` with the default mapping."""
    cols = ["loss", "alae"]
    if ds.delta is not None:
        cols.append("censor")
        if ds.limit is not None:
            cols.append("limit")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for i in range(ds.n):
            row = [repr(float(ds.x[i])), repr(float(ds.y[i]))]
            if ds.delta is not None:
                row.append(str(int(ds.delta[i])))
                if ds.limit is not None:
                    row.append(repr(float(ds.limit[i])))
            writer.writerow(row)


def summarize(ds):
    """Per-column count, min, quartiles (linear interpolation), max, mean, sample std."""
    if ds.n == 0:
        raise DataError("empty dataset")
    out = {}
    for name, col in (("loss", ds.x), ("alae", ds.y)):
        out[name] = {
            "count": int(len(col)),
            "min": float(np.min(col)),
            "q1": float(np.quantile(col, 0.25)),
            "q2": float(np.quantile(col, 0.50)),
            "q3": float(np.quantile(col, 0.75)),
            "max": float(np.max(col)),
            "mean": float(np.mean(col)),
            "std": float(np.std(col, ddof=1)) if len(col) > 1 else 0.0,
        }
    return out


# --------------------------------------------------------------------------
# Margins
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoMargin:
    """Pareto-I law: F(x) = 1 - (scale / x)^shape for x >= scale."""

    scale: float
    shape: float

    def __post_init__(self):
        if self.scale <= 0 or self.shape <= 0:
            raise ParameterError("Pareto scale and shape must be positive")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.scale, 0.0, 1.0 - (self.scale / np.maximum(x, self.scale)) ** self.shape)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return self.scale * (1.0 - u) ** (-1.0 / self.shape)

    def mean(self):
        if self.shape <= 1.0:
            return float("inf")
        return self.scale * self.shape / (self.shape - 1.0)

    def __call__(self, u):
        return self.quantile(u)


@dataclass(frozen=True)
class EmpiricalMargin:
    """Empirical df of a sample; the quantile is the left-continuous generalized inverse."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.sort(np.asarray(self.values, dtype=float)))
        if len(self.values) == 0:
            raise DataError("empirical margin needs a nonempty sample")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.values, x, side="right") / len(self.values)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        n = len(self.values)
        idx = np.clip(np.ceil(u * n).astype(int) - 1, 0, n - 1)
        return self.values[idx]

    def __call__(self, u):
        return self.quantile(u)


# --------------------------------------------------------------------------
# Synthesis
# --------------------------------------------------------------------------

def synthesize(mc, margin_x, margin_y, n, seed, censor_quantile=None):
    """Generate a reproducible synthetic dataset from a copula model.

    Parameters
    ----------
    mc : MixtureCopula or BaseCopula
        Copula coupling the pair.
    margin_x, margin_y : callables
        Quantile evaluators for the two coordinates.
    n : int
        Sample size (>= 1).
    seed : int
    censor_quantile : float, optional
        If given, right-censor the loss column at its empirical quantile and
        attach censor flags / limits.
    """
    if n < 1:
        raise DataError("n must be >= 1")
    stream = SeededStream(int(seed))
    if hasattr(mc, "mixing"):
        u = sample_mixture(mc, n, stream)
    else:
        u = mc.sample(n, stream.rng())
    x = np.asarray(margin_x(u[:, 0]), dtype=float)
    y = np.asarray(margin_y(u[:, 1]), dtype=float)
    if censor_quantile is None:
        return ClaimsDataset(x=x, y=y)
    if not 0.0 < censor_quantile < 1.0:
        raise ParameterError("censor_quantile must lie in (0, 1)")
    cap = float(np.quantile(x, censor_quantile))
    delta = (x <= cap).astype(np.int8)
    limit = np.full(n, cap)
    return ClaimsDataset(x=np.minimum(x, cap), y=y, delta=delta, limit=limit)
