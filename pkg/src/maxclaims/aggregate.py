"""Collective-model Monte Carlo studies: largest-claim influence and reinsurance premiums.

Both studies simulate claim-count / claim-size scenarios replication by
replication from caller-owned seeded streams, so a fixed (seed, B) pair gives
a bit-identical report regardless of how callers schedule the work.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import AllocationError, InsufficientDataError, ParameterError

_BLOCK = 2**22


@dataclass(frozen=True)
class PoissonCount:
    """Plain Poisson claim count (zero is allowed, unlike the mixing laws)."""

    mean: float

    def __post_init__(self):
        if self.mean < 0:
            raise ParameterError("Poisson mean must be nonnegative")

    def sample(self, n, rng):
        return rng.poisson(self.mean, size=n)


def risk_measures(sample, p=0.99):
    """Mean, sample std, VaR and TVaR of a simulated loss sample.

    VaR is the order statistic of rank ceil(p * B); TVaR averages that order
    statistic and everything above it.
    """
    arr = np.sort(np.asarray(sample, dtype=float))
    b = len(arr)
    if b < 1 or b < 1.0 / (1.0 - p):
        raise InsufficientDataError("sample too small for the requested confidence level")
    k = int(np.ceil(p * b))
    var_p = float(arr[k - 1])
    return {
        "mean": float(np.mean(arr)),
        "std": float(np.std(arr, ddof=1)) if b > 1 else 0.0,
        "var": var_p,
        "tvar": float(np.mean(arr[k - 1:])),
    }


# --------------------------------------------------------------------------
# Largest-claim influence
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RiskRow:
    measure: str
    s_n: float
    s_n_star: float
    influence: float
    influence_pct: float
    i_x: float
    i_y: float


@dataclass(frozen=True)
class RiskMeasureTable:
    """Influence of the two largest claims on the aggregate loss, per risk measure."""

    rows: tuple
    b: int
    seed: int
    p: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["measure", "s_n", "s_n_star", "influence",
                             "influence_pct", "i_x", "i_y"])
            for r in self.rows:
                writer.writerow([r.measure, repr(r.s_n), repr(r.s_n_star), repr(r.influence),
                                 repr(r.influence_pct), repr(r.i_x), repr(r.i_y)])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")

    def pretty(self, unit=1e6):
        lines = [f"{'measure':<10}{'S_N':>10}{'S_N*':>10}{'I*':>8}{'I* %':>8}{'I(X)':>8}{'I(Y)':>8}"]
        for r in self.rows:
            lines.append(f"{r.measure:<10}{r.s_n / unit:>10.2f}{r.s_n_star / unit:>10.2f}"
                         f"{r.influence / unit:>8.2f}{r.influence_pct:>8.2f}"
                         f"{r.i_x / unit:>8.2f}{r.i_y / unit:>8.2f}")
        lines.append(f"(amounts in {unit:g} units; VaR/TVaR at order statistic ceil(pB); "
                     f"B={self.b}, seed={self.seed})")
        return "\n".join(lines)


def _simulate_claim_scenarios(base, margins, counts, rng, want_max=False):
    """Per-replication totals (and componentwise maxima) of coupled claim pairs."""
    b = len(counts)
    qx, qy = margins
    sum_x = np.zeros(b)
    sum_y = np.zeros(b)
    max_x = np.zeros(b) if want_max else None
    max_y = np.zeros(b) if want_max else None
    bounds = np.cumsum(counts)
    start = 0
    while start < b:
        prev = bounds[start - 1] if start else 0
        stop = int(np.searchsorted(bounds, prev + _BLOCK, side="right"))
        stop = min(max(stop, start + 1), b)
        cnt = counts[start:stop]
        total = int(cnt.sum())
        if total:
            u = base.sample(total, rng)
            x = np.asarray(qx(u[:, 0]), dtype=float)
            y = np.asarray(qy(u[:, 1]), dtype=float)
            rep = np.repeat(np.arange(stop - start), cnt)
            sum_x[start:stop] = np.bincount(rep, weights=x, minlength=stop - start)
            sum_y[start:stop] = np.bincount(rep, weights=y, minlength=stop - start)
            if want_max:
                offsets = np.zeros(len(cnt), dtype=np.int64)
                np.cumsum(cnt[:-1], out=offsets[1:])
                nonzero = cnt > 0
                if np.all(nonzero):
                    max_x[start:stop] = np.maximum.reduceat(x, offsets)
                    max_y[start:stop] = np.maximum.reduceat(y, offsets)
                else:
                    mx = np.zeros(stop - start)
                    my = np.zeros(stop - start)
                    mx[nonzero] = np.maximum.reduceat(x, offsets[nonzero])
                    my[nonzero] = np.maximum.reduceat(y, offsets[nonzero])
                    max_x[start:stop] = mx
                    max_y[start:stop] = my
        start = stop
    return sum_x, sum_y, max_x, max_y


def largest_claim_influence(mc, margins, count_law, b, stream, p=0.99):
    """Simulate the aggregate loss with and without the largest claims.

    Parameters
    ----------
    mc : MixtureCopula
        Supplies the base copula coupling individual claim pairs.
    margins : pair of quantile evaluators
        Claim-size laws for the two portfolios.
    count_law : object with ``sample(n, rng)``
        Claim-count law (counts >= 1).
    b : int
        Number of replications (>= 100).
    stream : SeededStream
    p : float
        Confidence level for the VaR / TVaR rows.
    """
    if b < 100:
        raise InsufficientDataError("need at least 100 replications")
    rng = stream.rng()
    counts = count_law.sample(b, rng)
    if np.any(counts < 1):
        raise ParameterError("influence study needs counts >= 1")
    sum_x, sum_y, max_x, max_y = _simulate_claim_scenarios(
        mc.base, margins, counts, rng, want_max=True)
    s_n = sum_x + sum_y
    m_n = max_x + max_y
    s_star = s_n - m_n

    var_m = np.var(m_n, ddof=1)
    if var_m <= 0.0:
        raise AllocationError("largest-claim sum is degenerate; allocation undefined")
    cov_x = np.cov(max_x, m_n, ddof=1)[0, 1]
    cov_y = np.cov(max_y, m_n, ddof=1)[0, 1]
    w_x = cov_x / (cov_x + cov_y)

    rho_full = risk_measures(s_n, p)
    rho_star = risk_measures(s_star, p)
    tag = str(int(round(100 * p)))
    rows = []
    for key, label in (("mean", "mean"), ("std", "std"),
                       ("var", f"var{tag}"), ("tvar", f"tvar{tag}")):
        infl = rho_full[key] - rho_star[key]
        i_x = w_x * infl
        rows.append(RiskRow(
            measure=label,
            s_n=rho_full[key],
            s_n_star=rho_star[key],
            influence=infl,
            influence_pct=100.0 * infl / rho_full[key] if rho_full[key] != 0.0 else 0.0,
            i_x=i_x,
            i_y=infl - i_x,
        ))
    return RiskMeasureTable(rows=tuple(rows), b=b, seed=stream.seed, p=p)


# --------------------------------------------------------------------------
# Reinsurance premiums
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PremiumGrid:
    """Monte Carlo premium estimates over a grid of retentions or deductibles."""

    treaty: str
    levels: tuple
    estimates: tuple
    std_errors: tuple
    b: int
    seed: int
    direct: Optional[tuple] = None

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["treaty", "level", "estimate", "std_error", "direct"])
            for i, level in enumerate(self.levels):
                writer.writerow([self.treaty, repr(float(level)), repr(self.estimates[i]),
                                 repr(self.std_errors[i]),
                                 "" if self.direct is None else repr(self.direct[i])])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")


def _count_mean(count_law):
    m = getattr(count_law, "mean")
    return float(m()) if callable(m) else float(m)


def _premium_study(model, margins, count_law, levels, b, stream, per_claim_payoff):
    """Per-replication payoff sums.  ``per_claim_payoff=None`` accumulates plain
    claim totals instead (aggregate treaties apply their deductible afterwards)."""
    if b < 2:
        raise InsufficientDataError("need at least 2 replications")
    levels = tuple(float(v) for v in levels)
    if not levels:
        raise ParameterError("need at least one level")
    rng = stream.rng()
    counts = count_law.sample(b, rng)
    qx, qy = margins
    n_rows = len(levels) if per_claim_payoff is not None else 1
    per_rep = np.zeros((n_rows, b))
    pooled_sum = np.zeros(len(levels))
    pooled_n = 0
    bounds = np.cumsum(counts)
    start = 0
    while start < b:
        prev = bounds[start - 1] if start else 0
        stop = int(np.searchsorted(bounds, prev + _BLOCK, side="right"))
        stop = min(max(stop, start + 1), b)
        cnt = counts[start:stop]
        total = int(cnt.sum())
        if total:
            u = model.sample(total, rng)
            x = np.asarray(qx(u[:, 0]), dtype=float)
            y = np.asarray(qy(u[:, 1]), dtype=float)
            rep = np.repeat(np.arange(stop - start), cnt)
            if per_claim_payoff is None:
                per_rep[0, start:stop] = np.bincount(rep, weights=x + y, minlength=stop - start)
            else:
                for j, level in enumerate(levels):
                    vals = per_claim_payoff(x, y, level)
                    per_rep[j, start:stop] = np.bincount(rep, weights=vals, minlength=stop - start)
                    pooled_sum[j] += float(np.sum(vals))
            pooled_n += total
        start = stop
    return levels, per_rep, pooled_sum, pooled_n


def _per_claim_excess(x, y, r):
    pay = x - r + (x - r) / x * y
    return np.where(x > r, pay, 0.0)


def excess_of_loss_premium(model, margins, count_law, retentions, b, stream):
    """Excess-of-loss premium: the reinsurer pays the loss above the retention
    plus the proportional share of the expense, summed over claims.

    ``model`` couples the pairs (any object with ``sample(n, rng)``); margins
    are quantile evaluators (typically empirical).  Besides the replication
    mean, the grid carries the two-stage estimate E[K] * mean(per-claim payoff)
    over the pooled claims, valid when the count is independent of the sizes.
    """
    if np.any(np.asarray(retentions, dtype=float) <= 0):
        raise ParameterError("retentions must be positive")
    levels, per_rep, pooled_sum, pooled_n = _premium_study(
        model, margins, count_law, retentions, b, stream, _per_claim_excess)
    est = tuple(float(np.mean(row)) for row in per_rep)
    se = tuple(float(np.std(row, ddof=1) / np.sqrt(b)) for row in per_rep)
    mean_k = _count_mean(count_law)
    direct = tuple(float(mean_k * s / pooled_n) if pooled_n else 0.0 for s in pooled_sum)
    return PremiumGrid(treaty="excess-of-loss", levels=levels, estimates=est,
                       std_errors=se, b=b, seed=stream.seed, direct=direct)


def stop_loss_premium(model, margins, count_law, deductibles, b, stream):
    """Stop-loss premium E[(sum of claims - d)+] over a deductible grid."""
    if np.any(np.asarray(deductibles, dtype=float) < 0):
        raise ParameterError("deductibles must be nonnegative")
    levels, per_rep, _, _ = _premium_study(
        model, margins, count_law, deductibles, b, stream, None)
    totals = per_rep[0]
    est = []
    se = []
    for d in levels:
        pay = np.maximum(totals - d, 0.0)
        est.append(float(np.mean(pay)))
        se.append(float(np.std(pay, ddof=1) / np.sqrt(b)))
    return PremiumGrid(treaty="stop-loss", levels=levels, estimates=tuple(est),
                       std_errors=tuple(se), b=b, seed=stream.seed)
