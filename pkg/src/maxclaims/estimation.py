"""Pseudo-maximum-likelihood fitting of the mixture copula parameters.

Margins are replaced by rescaled empirical ranks (Kaplan-Meier ranks for a
right-censored loss column), and the copula parameters maximize the pseudo
log-likelihood by Nelder-Mead on transformed unconstrained coordinates with a
fixed set of multi-starts.  Fitting uses no randomness: same observations and
options give a bit-identical result.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize, stats
from scipy.special import expit, logit

from .copulas import make_copula
from .errors import DataError, InsufficientDataError, OptimizationError
from .mixing import make_mixing
from .mixture import MixtureCopula

_PENALTY = 1e10


@dataclass(frozen=True)
class PseudoObservations:
    """Rank-based pseudo observations, strictly inside (0, 1)."""

    u1: np.ndarray
    u2: np.ndarray
    delta: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.u1)
        if n < 10:
            raise InsufficientDataError("need at least 10 observations")
        if len(self.u2) != n or (self.delta is not None and len(self.delta) != n):
            raise DataError("pseudo-observation vectors must have equal length")
        for u in (self.u1, self.u2):
            if np.any(u <= 0.0) or np.any(u >= 1.0):
                raise DataError("pseudo observations must lie strictly inside (0, 1)")

    @property
    def n(self):
        return len(self.u1)


def _validated_xy(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or len(x) != len(y):
        raise DataError("x and y must be equal-length vectors")
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise DataError("NaN in input data")
    return x, y


def pseudo_observations(x, y):
    """Average-rank pseudo observations u = rank / (n + 1)."""
    x, y = _validated_xy(x, y)
    n = len(x)
    u1 = stats.rankdata(x, method="average") / (n + 1.0)
    u2 = stats.rankdata(y, method="average") / (n + 1.0)
    return PseudoObservations(u1=u1, u2=u2)


def km_cdf_at_points(x, delta):
    """Kaplan-Meier CDF estimate evaluated at each observation.

    ``delta[i] = 0`` marks a right-censored value.  The estimate is the
    right-continuous product-limit CDF, so censored points inherit the value
    at the last uncensored time not exceeding them.
    """
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta)
    n = len(x)
    order = np.lexsort((1 - delta, x))  # uncensored first among ties
    surv = np.empty(n)
    s = 1.0
    at_risk = n
    i = 0
    xs = x[order]
    ds = delta[order]
    while i < n:
        j = i
        t = xs[i]
        d_events = 0
        while j < n and xs[j] == t:
            if ds[j] == 1:
                d_events += 1
            j += 1
        if d_events:
            s *= 1.0 - d_events / at_risk
        surv[i:j] = s
        at_risk -= j - i
        i = j
    out = np.empty(n)
    out[order] = 1.0 - surv
    return out


def km_pseudo_observations(x, y, delta):
    """Pseudo observations with a Kaplan-Meier margin for the censored loss column.

    With no censoring (and tie-free data) this reduces to
    :func:`pseudo_observations`.
    """
    x, y = _validated_xy(x, y)
    delta = np.asarray(delta)
    if not np.all((delta == 0) | (delta == 1)):
        raise DataError("delta must contain only 0 / 1 flags")
    if np.all(delta == 0):
        raise InsufficientDataError("all observations censored")
    n = len(x)
    u1 = n / (n + 1.0) * km_cdf_at_points(x, delta)
    u1 = np.clip(u1, 1.0 / (2.0 * (n + 1.0)), None)  # fully censored prefixes sit at 0
    u2 = stats.rankdata(y, method="average") / (n + 1.0)
    return PseudoObservations(u1=u1, u2=u2, delta=delta.astype(np.int8))


# --------------------------------------------------------------------------
# Parameter transforms
# --------------------------------------------------------------------------

class _ParamSpace:
    """Bijection between natural parameters and unconstrained coordinates."""

    def __init__(self, family, mixing):
        self.family = family
        self.mixing = mixing
        self.names = ([] if mixing is None else ["theta"]) + ["alpha"]
        if family == "student":
            self.names.append("m")

    @property
    def dim(self):
        return len(self.names)

    def natural(self, t):
        t = np.asarray(t, dtype=float)
        out = {}
        i = 0
        if self.mixing is not None:
            if self.mixing == "shifted-geometric":
                out["theta"] = 1e-4 + (0.9999 - 1e-4) * expit(t[i])
            else:
                out["theta"] = 1e-4 + np.exp(np.clip(t[i], -60.0, np.log(200.0)))
            i += 1
        if self.family in ("gumbel", "joe"):
            out["alpha"] = 1.0 + 1e-4 + np.exp(np.clip(t[i], -60.0, np.log(49.0)))
        elif self.family == "frank":
            out["alpha"] = np.exp(np.clip(t[i], np.log(1e-2), np.log(50.0)))
        elif self.family == "clayton":
            out["alpha"] = 1e-4 + np.exp(np.clip(t[i], -60.0, np.log(50.0)))
        elif self.family == "student":
            out["alpha"] = 0.999 * (2.0 * expit(t[i]) - 1.0)
        else:
            raise DataError(f"family {self.family!r} has no fittable parameter")
        i += 1
        if self.family == "student":
            out["m"] = 0.5 + np.exp(np.clip(t[i], -60.0, np.log(199.5)))
        return out

    def transformed(self, **natural):
        t = []
        if self.mixing is not None:
            th = natural["theta"]
            if self.mixing == "shifted-geometric":
                t.append(logit((th - 1e-4) / (0.9999 - 1e-4)))
            else:
                t.append(np.log(max(th - 1e-4, 1e-12)))
        al = natural["alpha"]
        if self.family in ("gumbel", "joe"):
            t.append(np.log(max(al - 1.0 - 1e-4, 1e-12)))
        elif self.family in ("frank", "clayton"):
            t.append(np.log(max(al, 1e-12)))
        elif self.family == "student":
            t.append(logit((al / 0.999 + 1.0) / 2.0))
        if self.family == "student":
            t.append(np.log(max(natural["m"] - 0.5, 1e-12)))
        return np.asarray(t, dtype=float)


_DEFAULT_START = {
    "theta": {"shifted-geometric": 0.5, "shifted-poisson": 0.75, "truncated-poisson": 1.0},
    "alpha": {"gumbel": 2.0, "joe": 2.0, "frank": 4.0, "clayton": 1.0, "student": 0.3},
    "m": 8.0,
}


def _start_points(space, n_starts):
    base = {}
    if space.mixing is not None:
        base["theta"] = _DEFAULT_START["theta"][space.mixing]
    base["alpha"] = _DEFAULT_START["alpha"][space.family]
    if space.family == "student":
        base["m"] = _DEFAULT_START["m"]
    t0 = space.transformed(**base)
    sampler = stats.qmc.Halton(d=space.dim, scramble=False, seed=0)
    offsets = 3.0 * (sampler.random(n_starts) - 0.5)
    offsets[0] = 0.0
    return [t0 + off for off in offsets]


# --------------------------------------------------------------------------
# Objectives and fitting
# --------------------------------------------------------------------------

def _build_model(family, mixing, params):
    if family == "student":
        base = make_copula("student", alpha=params["alpha"], m=params["m"])
    else:
        base = make_copula(family, alpha=params["alpha"])
    if mixing is None:
        return base, None
    mc = MixtureCopula(base, make_mixing(mixing, params["theta"]))
    return base, mc


def _loglik_value(family, mixing, params, obs, censored):
    base, mc = _build_model(family, mixing, params)
    u1, u2 = obs.u1, obs.u2
    if mc is None:
        dens = base._log_pdf(u1, u2)
    else:
        dens = mc._loglik(u1, u2)
    if censored:
        part = mc.partial_u2(u1, u2) if mc is not None else base.partial_v2(u1, u2)
        tail = np.log1p(-np.clip(part, 0.0, 1.0 - 1e-14))
        delta = obs.delta
        total = np.sum(np.where(delta == 1, dens, tail))
    else:
        total = np.sum(dens)
    return total


def _fit(obs, family, mixing, censored, starts=5, max_iter=2000, xatol=1e-8, fatol=1e-12):
    family = family.lower()
    mixing = None if mixing in (None, "none") else mixing.lower().replace("_", "-")
    space = _ParamSpace(family, mixing)

    def objective(t):
        try:
            params = space.natural(t)
            val = _loglik_value(family, mixing, params, obs, censored)
        except Exception:
            return _PENALTY * (1.0 + float(np.sum(np.abs(t))))
        if not np.isfinite(val):
            return _PENALTY * (1.0 + float(np.sum(np.abs(t))))
        return -val

    best = None
    total_iters = 0
    any_success = False
    for t0 in _start_points(space, starts):
        res = optimize.minimize(objective, t0, method="Nelder-Mead",
                                options={"xatol": xatol, "fatol": fatol,
                                         "maxiter": max_iter, "maxfev": 4 * max_iter})
        total_iters += int(res.nit)
        any_success = any_success or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    params = space.natural(best.x)
    loglik = -float(best.fun)
    k = space.dim
    result = FitResult(
        family=family,
        mixing=mixing or "none",
        theta=float(params["theta"]) if mixing is not None else None,
        alpha=float(params["alpha"]),
        m=float(params["m"]) if family == "student" else None,
        loglik=loglik,
        aic=2.0 * k - 2.0 * loglik,
        converged=any_success and loglik > -_PENALTY / 2,
        iterations=total_iters,
    )
    if not result.converged:
        raise OptimizationError("no optimizer start converged", best=result)
    return result


@dataclass(frozen=True)
class FitResult:
    """One fitted copula model with its pseudo log-likelihood and AIC."""

    family: str
    mixing: str
    theta: Optional[float]
    alpha: float
    m: Optional[float]
    loglik: float
    aic: float
    converged: bool
    iterations: int


def pml_fit(obs, family, mixing, **options):
    """Fit (theta, alpha[, m]) by maximizing the pseudo log-likelihood.

    Parameters
    ----------
    obs : PseudoObservations
        Uncensored pseudo observations (``delta`` absent or all ones).
    family : str
        Base copula family.
    mixing : str or None
        Count-law model, or ``None`` / ``"none"`` for the plain base copula.
    options : dict
        ``starts`` (default 5), ``max_iter`` (2000), ``xatol``, ``fatol``.
    """
    if obs.delta is not None and np.any(obs.delta == 0):
        raise DataError("observations carry censoring flags; use censored_pml_fit")
    return _fit(obs, family, mixing, censored=False, **options)


def censored_pml_fit(obs, family, mixing, **options):
    """Censored pseudo likelihood: density term for events, 1 - dC/du2 for censored losses."""
    if obs.delta is None:
        raise DataError("censored fit needs censoring flags")
    return _fit(obs, family, mixing, censored=True, **options)


def model_grid_fit(obs, families, mixings, threads=1, **options):
    """Fit every (family, count-law) cell plus each pure base family; sort by AIC.

    Failed cells are kept in the output with ``converged=False`` and infinite
    AIC rather than aborting the grid.
    """
    families = list(families)
    mixing_list = [None] + [m for m in mixings if m not in (None, "none")]
    if not families or not mixing_list:
        raise DataError("empty model grid")
    cells = [(f, m) for f in families for m in mixing_list]
    censored = obs.delta is not None and bool(np.any(obs.delta == 0))

    def run(cell):
        fam, mix = cell
        try:
            if censored:
                return censored_pml_fit(obs, fam, mix, **options)
            return pml_fit(obs, fam, mix, **options)
        except OptimizationError as exc:
            return exc.best
        except Exception:
            return FitResult(family=fam, mixing=mix or "none", theta=None,
                             alpha=float("nan"), m=None, loglik=float("-inf"),
                             aic=float("inf"), converged=False, iterations=0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(cell) for cell in cells]
    return sorted(results, key=lambda r: (r.aic, r.family, r.mixing))


def fit_results_to_csv(path, results):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "mixing", "theta", "alpha", "m", "loglik", "aic", "converged"])
        for r in results:
            writer.writerow([
                r.family, r.mixing,
                "" if r.theta is None else repr(r.theta),
                repr(r.alpha),
                "" if r.m is None else repr(r.m),
                repr(r.loglik), repr(r.aic), str(r.converged).lower(),
            ])


def fit_results_to_json(path, results):
    with open(path, "w") as fh:
        json.dump([asdict(r) for r in results], fh, indent=2)
        fh.write("\n")
