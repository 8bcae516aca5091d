"""Claim-count laws on {1, 2, ...} and their Laplace-transform machinery.

Three laws are provided: shifted geometric (``theta`` in (0,1)), shifted
Poisson (``theta`` > 0) and zero-truncated Poisson (``theta`` > 0).  Besides
the Laplace transform ``L(t) = E[exp(-t N)]`` and its inverse, each law knows
the substituted forms ``laplace_of_v`` / derivatives at ``t = -ln v`` which is
how the mixture copula consumes them, and the transform
``v_transform(u) = exp(-L^{-1}(u))``.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from .errors import ConvergenceError, ParameterError


def _asfloat(x):
    return np.asarray(x, dtype=float)


def _scalarize(out, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(out)
    return out


def _check_t(t):
    a = _asfloat(t)
    if np.any(a < 0.0):
        raise ValueError("t must be nonnegative")
    return a


def _check_u(u, allow_zero=False):
    a = _asfloat(u)
    lo_bad = np.any(a < 0.0) if allow_zero else np.any(a <= 0.0)
    if lo_bad or np.any(a > 1.0):
        raise ValueError("u must lie in (0, 1]")
    return a


class MixingLaw:
    """Shared surface; subclasses implement the *_of_v kernels on arrays."""

    model = "base"

    def __init__(self, theta):
        self.theta = float(theta)
        self._validate()

    def _validate(self):
        raise NotImplementedError

    # kernels in v = exp(-t) coordinates -------------------------------------
    def laplace_of_v(self, v):
        raise NotImplementedError

    def laplace_d1_of_v(self, v):
        """L'(t) evaluated at t = -ln v."""
        raise NotImplementedError

    def laplace_d2_of_v(self, v):
        """L''(t) evaluated at t = -ln v."""
        raise NotImplementedError

    def log_neg_d1_of_v(self, v):
        """ln(-L'(t)) at t = -ln v; overflow-safe for extreme theta."""
        return np.log(-self.laplace_d1_of_v(v))

    def v_transform(self, u):
        """v = exp(-L^{-1}(u)) for u in (0, 1]."""
        raise NotImplementedError

    def dv_du(self, v):
        """Derivative of v_transform expressed in v, i.e. 1 / (du/dv)."""
        return -v / self.laplace_d1_of_v(v)

    # public t / u surface ----------------------------------------------------
    def laplace(self, t):
        t = _check_t(t)
        return _scalarize(self.laplace_of_v(np.exp(-t)), t)

    def laplace_d1(self, t):
        t = _check_t(t)
        return _scalarize(self.laplace_d1_of_v(np.exp(-t)), t)

    def laplace_d2(self, t):
        t = _check_t(t)
        return _scalarize(self.laplace_d2_of_v(np.exp(-t)), t)

    def laplace_inverse(self, u):
        u = _check_u(u)
        v = self.v_transform(u)
        return _scalarize(-np.log(v), u)

    def mean(self):
        raise NotImplementedError

    def pmf(self, k):
        raise NotImplementedError

    def sample(self, n, rng):
        raise NotImplementedError

    def sample_count(self, rng):
        return int(self.sample(1, rng)[0])

    def __repr__(self):
        return f"{type(self).__name__}(theta={self.theta:g})"


class ShiftedGeometric(MixingLaw):
    """P(N = k) = theta (1-theta)^(k-1), k >= 1."""

    model = "shifted-geometric"

    def _validate(self):
        if not (0.0 < self.theta < 1.0):
            raise ParameterError("shifted geometric requires theta in (0, 1)")

    def laplace_of_v(self, v):
        th = self.theta
        return th * v / (1.0 - (1.0 - th) * v)

    def laplace_d1_of_v(self, v):
        th = self.theta
        return -th * v / (1.0 - (1.0 - th) * v) ** 2

    def laplace_d2_of_v(self, v):
        th = self.theta
        q = 1.0 - th
        return th * v * (1.0 + q * v) / (1.0 - q * v) ** 3

    def log_neg_d1_of_v(self, v):
        th = self.theta
        return np.log(th) + np.log(v) - 2.0 * np.log1p(-(1.0 - th) * v)

    def v_transform(self, u):
        u = _check_u(u, allow_zero=True)
        th = self.theta
        return _scalarize(u / (th + (1.0 - th) * u), u)

    def mean(self):
        return 1.0 / self.theta

    def pmf(self, k):
        k = np.asarray(k)
        out = np.where(k >= 1, self.theta * (1.0 - self.theta) ** (np.maximum(k, 1) - 1), 0.0)
        return _scalarize(out, k)

    def sample(self, n, rng):
        return rng.geometric(self.theta, size=n)


class ShiftedPoisson(MixingLaw):
    """N = 1 + K with K Poisson(theta)."""

    model = "shifted-poisson"

    def _validate(self):
        if self.theta < 0.0 or not np.isfinite(self.theta):
            raise ParameterError("shifted Poisson requires theta >= 0")

    def laplace_of_v(self, v):
        return v * np.exp(self.theta * (v - 1.0))

    def laplace_d1_of_v(self, v):
        th = self.theta
        return -v * np.exp(th * (v - 1.0)) * (1.0 + th * v)

    def laplace_d2_of_v(self, v):
        th = self.theta
        return v * np.exp(th * (v - 1.0)) * (1.0 + 3.0 * th * v + th * th * v * v)

    def log_neg_d1_of_v(self, v):
        th = self.theta
        return np.log(v) + th * (v - 1.0) + np.log1p(th * v)

    def v_transform(self, u):
        # Solve ln v + theta (v - 1) = ln u; the map is increasing and concave,
        # so Newton from v0 = u converges monotonically from below.
        u_in = _check_u(u, allow_zero=True)
        th = self.theta
        if th == 0.0:
            return _scalarize(u_in.copy(), u)
        u_arr = np.atleast_1d(u_in)
        v = np.where(u_arr > 0.0, u_arr, 1.0)  # placeholder at zeros
        pos = u_arr > 0.0
        lnu = np.log(np.where(pos, u_arr, 1.0))
        for _ in range(100):
            f = np.log(v) + th * (v - 1.0) - lnu
            step = f / (1.0 / v + th)
            v = v - step
            if np.all(np.abs(step) <= 1e-15 + 1e-15 * v):
                break
        else:
            raise ConvergenceError("shifted-Poisson v_transform did not converge")
        v = np.where(pos, v, 0.0)
        return _scalarize(v if np.ndim(u) else v[0], u)

    def mean(self):
        return 1.0 + self.theta

    def pmf(self, k):
        k = np.asarray(k)
        out = np.where(k >= 1, stats.poisson.pmf(np.maximum(k, 1) - 1, self.theta), 0.0)
        return _scalarize(out, k)

    def sample(self, n, rng):
        return 1 + rng.poisson(self.theta, size=n)


class TruncatedPoisson(MixingLaw):
    """Poisson(theta) conditioned on N >= 1."""

    model = "truncated-poisson"

    def _validate(self):
        if self.theta <= 0.0 or not np.isfinite(self.theta):
            raise ParameterError("truncated Poisson requires theta > 0")

    def laplace_of_v(self, v):
        th = self.theta
        # (e^{theta(v-1)} - e^{-theta}) / (1 - e^{-theta}), stable for large theta
        return (np.exp(th * (v - 1.0)) - np.exp(-th)) / (-np.expm1(-th))

    def laplace_d1_of_v(self, v):
        th = self.theta
        return -th * v * np.exp(th * (v - 1.0)) / (-np.expm1(-th))

    def laplace_d2_of_v(self, v):
        th = self.theta
        return th * v * (1.0 + th * v) * np.exp(th * (v - 1.0)) / (-np.expm1(-th))

    def log_neg_d1_of_v(self, v):
        th = self.theta
        return np.log(th) + np.log(v) + th * (v - 1.0) - np.log1p(-np.exp(-th))

    def v_transform(self, u):
        u_in = _check_u(u, allow_zero=True)
        th = self.theta
        u_arr = np.atleast_1d(u_in)
        out = np.zeros_like(u_arr)
        pos = u_arr > 0.0
        # v = ln(1 + u (e^theta - 1)) / theta, assembled in log space
        ln_em = th + np.log1p(-np.exp(-th))  # ln(e^theta - 1)
        out[pos] = np.logaddexp(np.log(u_arr[pos]) + ln_em, 0.0) / th
        return _scalarize(out if np.ndim(u) else out[0], u)

    def mean(self):
        return self.theta / (-np.expm1(-self.theta))

    def pmf(self, k):
        k = np.asarray(k)
        logp = stats.poisson.logpmf(np.maximum(k, 1), self.theta) - np.log(-np.expm1(-self.theta))
        out = np.where(k >= 1, np.exp(logp), 0.0)
        return _scalarize(out, k)

    def sample(self, n, rng):
        th = self.theta
        if th <= 30.0:
            # inverse-CDF walk over a truncated support (tail below 1e-15)
            kmax = int(th + 40.0 * np.sqrt(th) + 40.0)
            ks = np.arange(1, kmax + 1)
            cum = np.cumsum(self.pmf(ks))
            cum[-1] = 1.0
            return 1 + np.searchsorted(cum, rng.random(n), side="right").astype(np.int64)
        # rejection of zeros; P(0) = e^-theta is negligible at this scale
        out = rng.poisson(th, size=n)
        while True:
            zero = out == 0
            if not np.any(zero):
                return out
            out[zero] = rng.poisson(th, size=int(zero.sum()))


MODELS = {
    "shifted-geometric": ShiftedGeometric,
    "shifted-poisson": ShiftedPoisson,
    "truncated-poisson": TruncatedPoisson,
}

_ALIASES = {
    "a": "shifted-geometric",
    "geometric": "shifted-geometric",
    "b": "shifted-poisson",
    "c": "truncated-poisson",
}


def make_mixing(model, theta):
    """Build a mixing law from a model name (``shifted-geometric`` / ``a``, ...)."""
    key = model.lower().replace("_", "-")
    key = _ALIASES.get(key, key)
    if key not in MODELS:
        raise ParameterError(f"unknown mixing model {model!r}")
    return MODELS[key](theta)


def mixing_for_mean(model, mean):
    """Return the law of the given family whose expected count equals ``mean``."""
    if mean < 1.0:
        raise ParameterError("claim counts are >= 1, so the mean must be >= 1")
    key = _ALIASES.get(model.lower().replace("_", "-"), model.lower().replace("_", "-"))
    if key == "shifted-geometric":
        return ShiftedGeometric(1.0 / mean)
    if key == "shifted-poisson":
        return ShiftedPoisson(mean - 1.0)
    if key == "truncated-poisson":
        # Solve theta / (1 - e^-theta) = mean by Newton; theta ~ mean for large means.
        th = max(mean - 1.0, 1e-6)
        for _ in range(100):
            denom = -np.expm1(-th)
            f = th / denom - mean
            fp = (denom - th * np.exp(-th)) / denom**2
            step = f / fp
            th -= step
            if abs(step) < 1e-13 * max(th, 1.0):
                return TruncatedPoisson(th)
        raise ConvergenceError("could not match truncated-Poisson mean")
    raise ParameterError(f"unknown mixing model {model!r}")
