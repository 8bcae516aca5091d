"""Bivariate base copula families: CDF, density, conditional CDF and its inverse, sampling.

Every family exposes the same surface on scalars or numpy arrays:

* ``cdf(v1, v2)`` and, for the exchangeable Archimedean families, ``cdf_d(u)``
* ``pdf`` / ``log_pdf``
* ``partial_v1`` / ``partial_v2`` (conditional CDFs) and their log versions
* ``conditional_inverse(v1, p)`` solving ``partial_v1(v1, v2) = p`` for ``v2``
* ``sample(n, rng)`` via the conditional-distribution method

Density and partial-derivative evaluation clamps interior arguments into
``[CLAMP, 1 - CLAMP]`` (CLAMP = 1e-15); exact 0/1 inputs raise ``BoundaryError``
because several densities diverge there.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, stdtr, stdtrit

from .errors import BoundaryError, ConvergenceError, ParameterError, UnsupportedError

CLAMP = 1e-15

# Nodes for the Student copula CDF quadrature (cubic endpoint substitution).
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _asfloat(x):
    a = np.asarray(x, dtype=float)
    if np.any(np.isnan(a)):
        raise ValueError("NaN input")
    return a


def _scalarize(out, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return float(out)
    return out


def _check_unit(x, name, open_interval=False):
    a = _asfloat(x)
    if open_interval:
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise BoundaryError(f"{name} must lie strictly inside (0, 1)")
    else:
        if np.any(a < 0.0) or np.any(a > 1.0):
            raise ValueError(f"{name} must lie in [0, 1]")
    return a


def _clamp_interior(x, name):
    """Reject exact boundary points, then clamp the rest away from 0/1."""
    a = _check_unit(x, name, open_interval=True)
    return np.clip(a, CLAMP, 1.0 - CLAMP)


def student_t_cdf(x, m):
    """CDF of a Student t variable with ``m > 0`` degrees of freedom."""
    if m <= 0:
        raise ParameterError("degrees of freedom must be positive")
    return _scalarize(stdtr(m, _asfloat(x)), x)


def student_t_quantile(p, m):
    """Inverse of :func:`student_t_cdf` on ``p in (0, 1)``."""
    if m <= 0:
        raise ParameterError("degrees of freedom must be positive")
    p = _check_unit(p, "p", open_interval=True)
    return _scalarize(stdtrit(m, p), p)


class BaseCopula:
    """Common machinery; subclasses provide the family-specific kernels on arrays."""

    name = "base"
    params: tuple = ()

    # -- family kernels (arrays in, arrays out, inputs already clamped) -----
    def _cdf(self, v1, v2):
        raise NotImplementedError

    def _log_pdf(self, v1, v2):
        raise NotImplementedError

    def _log_partial_v1(self, v1, v2):
        raise NotImplementedError

    def _conditional_inverse(self, v1, p):
        raise NotImplementedError

    # -- public surface ------------------------------------------------------
    def cdf(self, v1, v2):
        a = _check_unit(v1, "v1")
        b = _check_unit(v2, "v2")
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape)
        pos = (a > 0.0) & (b > 0.0)
        if np.any(pos):
            out[pos] = self._cdf(a[pos], b[pos])
        return _scalarize(out, v1, v2)

    def pdf(self, v1, v2):
        return _scalarize(np.exp(self.log_pdf(v1, v2)), v1, v2)

    def log_pdf(self, v1, v2):
        a = _clamp_interior(v1, "v1")
        b = _clamp_interior(v2, "v2")
        return _scalarize(self._log_pdf(a, b), v1, v2)

    def partial_v1(self, v1, v2):
        """Conditional CDF of V2 given V1 = v1, i.e. dQ/dv1."""
        a = _clamp_interior(v1, "v1")
        b = _check_unit(v2, "v2")
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape)
        out[b >= 1.0] = 1.0
        mid = (b > 0.0) & (b < 1.0)
        if np.any(mid):
            out[mid] = np.exp(self._log_partial_v1(a[mid], np.clip(b[mid], CLAMP, None)))
        return _scalarize(out, v1, v2)

    def partial_v2(self, v1, v2):
        return self.partial_v1(v2, v1)

    def log_partial_v1(self, v1, v2):
        a = _clamp_interior(v1, "v1")
        b = _clamp_interior(v2, "v2")
        return _scalarize(self._log_partial_v1(a, b), v1, v2)

    def log_partial_v2(self, v1, v2):
        return self.log_partial_v1(v2, v1)

    def conditional_inverse(self, v1, p):
        a = _clamp_interior(v1, "v1")
        q = _clamp_interior(p, "p")
        a, q = np.broadcast_arrays(a, q)
        return _scalarize(self._conditional_inverse(a, q), v1, p)

    def sample(self, n, rng):
        """Draw ``n`` pairs by uniform V1 and inversion of the conditional CDF."""
        v1 = rng.random(n)
        p = rng.random(n)
        v1 = np.clip(v1, CLAMP, 1.0 - CLAMP)
        p = np.clip(p, CLAMP, 1.0 - CLAMP)
        return np.column_stack([v1, self._conditional_inverse(v1, p)])

    def sample_pair(self, rng):
        v1, v2 = self.sample(1, rng)[0]
        return float(v1), float(v2)

    def cdf_d(self, u):
        raise UnsupportedError(f"{self.name} copula has no d-variate CDF here")

    def __repr__(self):
        inner = ", ".join(f"{p:g}" for p in self.params)
        return f"{type(self).__name__}({inner})"


class IndependenceCopula(BaseCopula):
    """Product copula: Q(v1, v2) = v1 v2."""

    name = "independence"

    def _cdf(self, v1, v2):
        return v1 * v2

    def _log_pdf(self, v1, v2):
        return np.zeros(np.broadcast(v1, v2).shape)

    def _log_partial_v1(self, v1, v2):
        return np.log(v2) + 0.0 * v1

    def _conditional_inverse(self, v1, p):
        return p + 0.0 * v1

    def cdf_d(self, u):
        u = _check_unit(u, "u")
        return _scalarize(np.prod(u, axis=-1), u[..., 0] if u.ndim > 1 else 0.0)


class GumbelCopula(BaseCopula):
    """Gumbel copula, exp(-((-ln v1)^a + (-ln v2)^a)^(1/a)) with a >= 1."""

    name = "gumbel"

    def __init__(self, alpha):
        if not np.isfinite(alpha) or alpha < 1.0:
            raise ParameterError("gumbel requires alpha >= 1")
        self.alpha = float(alpha)
        self.params = (self.alpha,)

    def _pieces(self, v1, v2):
        a = self.alpha
        lx = np.log(-np.log(v1))
        ly = np.log(-np.log(v2))
        ln_s = np.logaddexp(a * lx, a * ly)       # ln((-ln v1)^a + (-ln v2)^a)
        big_a = np.exp(ln_s / a)                  # the l_a norm of (-ln v1, -ln v2)
        return lx, ly, ln_s, big_a

    def _cdf(self, v1, v2):
        _, _, _, big_a = self._pieces(v1, v2)
        return np.exp(-big_a)

    def _log_partial_v1(self, v1, v2):
        a = self.alpha
        lx, _, ln_s, big_a = self._pieces(v1, v2)
        return -np.log(v1) + (a - 1.0) * lx + (1.0 / a - 1.0) * ln_s - big_a

    def _log_pdf(self, v1, v2):
        a = self.alpha
        lx, ly, ln_s, big_a = self._pieces(v1, v2)
        tail = (2.0 / a - 2.0) * ln_s + np.log1p((a - 1.0) * np.exp(-ln_s / a))
        return -big_a + (a - 1.0) * (lx + ly) - np.log(v1) - np.log(v2) + tail

    def _conditional_inverse(self, v1, p):
        # Solve (1-a) ln z - z = ln(p v1 x^(1-a)) for z >= x, x = -ln v1.
        # g is decreasing and convex, so Newton from z0 = x climbs monotonically.
        a = self.alpha
        x = -np.log(v1)
        lnw = np.log(p) - x + (1.0 - a) * np.log(x)
        z = x.copy()
        for _ in range(80):
            g = (1.0 - a) * np.log(z) - z - lnw
            step = g / ((1.0 - a) / z - 1.0)
            z = z - step
            if np.all(np.abs(step) <= 1e-14 * np.maximum(z, 1.0)):
                break
        else:
            raise ConvergenceError("gumbel conditional inverse did not converge")
        # y = (z^a - x^a)^(1/a) without cancellation when z ~ x
        y = x * np.expm1(a * np.log(z / x)) ** (1.0 / a)
        return np.exp(-y)

    def cdf_d(self, u):
        a = self.alpha
        u = _check_unit(u, "u")
        if np.any(u <= 0.0):
            return _scalarize(np.zeros(np.asarray(u).shape[:-1]), u[..., 0] if u.ndim > 1 else 0.0)
        ln_s = np.log(np.sum((-np.log(u)) ** a, axis=-1))
        out = np.exp(-np.exp(ln_s / a))
        return _scalarize(out, u[..., 0] if u.ndim > 1 else 0.0)


class FrankCopula(BaseCopula):
    """Frank copula with parameter a != 0 (|a| < 1e-6 rejected as numerically unstable)."""

    name = "frank"

    def __init__(self, alpha):
        if not np.isfinite(alpha) or abs(alpha) < 1e-6:
            raise ParameterError("frank requires |alpha| >= 1e-6")
        self.alpha = float(alpha)
        self.params = (self.alpha,)

    def _cdf(self, v1, v2):
        a = self.alpha
        d = np.expm1(-a)
        return -np.log1p(np.expm1(-a * v1) * np.expm1(-a * v2) / d) / a

    def _log_partial_v1(self, v1, v2):
        a = self.alpha
        d = np.expm1(-a)
        e1 = np.expm1(-a * v1)
        e2 = np.expm1(-a * v2)
        return -a * v1 + np.log(e2 / (d + e1 * e2))

    def _log_pdf(self, v1, v2):
        a = self.alpha
        d = np.expm1(-a)
        e1 = np.expm1(-a * v1)
        e2 = np.expm1(-a * v2)
        # a * (1 - e^{-a}) = -a * d is positive for either sign of a
        return np.log(-a * d) - a * (v1 + v2) - 2.0 * np.log(np.abs(d + e1 * e2))

    def _conditional_inverse(self, v1, p):
        a = self.alpha
        d = np.expm1(-a)
        e1 = np.expm1(-a * v1)
        return -np.log1p(p * d / (1.0 + e1 * (1.0 - p))) / a


class JoeCopula(BaseCopula):
    """Joe copula, 1 - ((1-v1)^a + (1-v2)^a - (1-v1)^a (1-v2)^a)^(1/a) with a >= 1."""

    name = "joe"

    def __init__(self, alpha):
        if not np.isfinite(alpha) or alpha < 1.0:
            raise ParameterError("joe requires alpha >= 1")
        self.alpha = float(alpha)
        self.params = (self.alpha,)

    def _pieces(self, v1, v2):
        a = self.alpha
        lxb = np.log1p(-v1)                        # ln(1 - v1)
        lyb = np.log1p(-v2)
        one_m_pa = -np.expm1(a * lxb)              # 1 - (1-v1)^a, stable near v1 = 0
        one_m_pb = -np.expm1(a * lyb)
        ln_t = np.log1p(-one_m_pa * one_m_pb)      # ln T, T = pa + pb - pa*pb
        return lxb, lyb, one_m_pa, one_m_pb, ln_t

    def _cdf(self, v1, v2):
        _, _, _, _, ln_t = self._pieces(v1, v2)
        return -np.expm1(ln_t / self.alpha)

    def _log_partial_v1(self, v1, v2):
        a = self.alpha
        lxb, _, _, one_m_pb, ln_t = self._pieces(v1, v2)
        return (a - 1.0) * lxb + np.log(one_m_pb) + (1.0 / a - 1.0) * ln_t

    def _log_pdf(self, v1, v2):
        a = self.alpha
        lxb, lyb, _, _, ln_t = self._pieces(v1, v2)
        t = np.exp(ln_t)
        return (a - 1.0) * (lxb + lyb) + (1.0 / a - 2.0) * ln_t + np.log(a - 1.0 + t)

    def _conditional_inverse(self, v1, p):
        # Bisection in b = (1-v2)^a: h(b) falls from 1 at b=0 to 0 at b=1.
        a = self.alpha
        lxb = np.log1p(-v1)
        pa = np.exp(a * lxb)
        lnp = np.log(p)
        lo = np.zeros_like(v1)
        hi = np.ones_like(v1)
        target = lnp - (a - 1.0) * lxb
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            val = np.log1p(-mid) + (1.0 / a - 1.0) * np.log(pa + mid * (1.0 - pa))
            high_side = val > target
            lo = np.where(high_side, mid, lo)
            hi = np.where(high_side, hi, mid)
        b = 0.5 * (lo + hi)
        return -np.expm1(np.log(b) / a)


class ClaytonCopula(BaseCopula):
    """Clayton copula, (v1^-a + v2^-a - 1)^(-1/a) with a > 0."""

    name = "clayton"

    def __init__(self, alpha):
        if not np.isfinite(alpha) or alpha <= 0.0:
            raise ParameterError("clayton requires alpha > 0")
        self.alpha = float(alpha)
        self.params = (self.alpha,)

    def _ln_s(self, v1, v2):
        a = self.alpha
        ln_sum = np.logaddexp(-a * np.log(v1), -a * np.log(v2))
        return ln_sum + np.log1p(-np.exp(-ln_sum))  # ln(v1^-a + v2^-a - 1)

    def _cdf(self, v1, v2):
        return np.exp(-self._ln_s(v1, v2) / self.alpha)

    def _log_partial_v1(self, v1, v2):
        a = self.alpha
        return -(a + 1.0) * np.log(v1) - (1.0 / a + 1.0) * self._ln_s(v1, v2)

    def _log_pdf(self, v1, v2):
        a = self.alpha
        return (np.log1p(a) - (a + 1.0) * (np.log(v1) + np.log(v2))
                - (1.0 / a + 2.0) * self._ln_s(v1, v2))

    def _conditional_inverse(self, v1, p):
        a = self.alpha
        em = np.expm1(-a / (a + 1.0) * np.log(p))  # p^(-a/(a+1)) - 1 >= 0
        ln_arg = np.logaddexp(-a * np.log(v1) + np.log(em), 0.0)
        return np.exp(-ln_arg / a)

    def cdf_d(self, u):
        a = self.alpha
        u = _check_unit(u, "u")
        if np.any(u <= 0.0):
            return _scalarize(np.zeros(np.asarray(u).shape[:-1]), u[..., 0] if u.ndim > 1 else 0.0)
        s = np.sum(np.asarray(u) ** (-a), axis=-1) - (np.asarray(u).shape[-1] - 1)
        out = s ** (-1.0 / a)
        return _scalarize(out, u[..., 0] if u.ndim > 1 else 0.0)


class StudentCopula(BaseCopula):
    """Bivariate Student t copula with correlation a in (-1, 1) and m > 0 degrees of freedom."""

    name = "student"

    def __init__(self, alpha, m):
        if not np.isfinite(alpha) or not (-1.0 < alpha < 1.0):
            raise ParameterError("student requires correlation alpha in (-1, 1)")
        if not np.isfinite(m) or m <= 0.0:
            raise ParameterError("student requires m > 0 degrees of freedom")
        self.alpha = float(alpha)
        self.m = float(m)
        self.params = (self.alpha, self.m)

    def _h(self, w, v2):
        """Conditional CDF P(V2 <= v2 | V1 = w) via the t_{m+1} closed form."""
        rho, m = self.alpha, self.m
        z1 = stdtrit(m, w)
        z2 = stdtrit(m, v2)
        s = np.sqrt((m + z1 * z1) * (1.0 - rho * rho) / (m + 1.0))
        return stdtr(m + 1.0, (z2 - rho * z1) / s)

    def _cdf(self, v1, v2):
        # Integrate the conditional CDF over the smaller coordinate; the cubic
        # substitution w = a u^3 absorbs the slowly varying endpoint at w = 0.
        v1 = np.atleast_1d(v1)
        v2 = np.atleast_1d(v2)
        a = np.minimum(v1, v2)
        b = np.maximum(v1, v2)
        u = 0.5 * (_GL_X + 1.0)
        w = a[:, None] * u[None, :] ** 3
        jac = 1.5 * a[:, None] * u[None, :] ** 2
        vals = self._h(np.clip(w, CLAMP, 1.0 - CLAMP), b[:, None])
        out = np.sum(_GL_W[None, :] * jac * vals, axis=1)
        return np.minimum(out, a)

    def _log_partial_v1(self, v1, v2):
        return np.log(np.clip(self._h(v1, v2), 1e-300, None))

    def _log_pdf(self, v1, v2):
        rho, m = self.alpha, self.m
        z1 = stdtrit(m, v1)
        z2 = stdtrit(m, v2)
        omr = 1.0 - rho * rho
        qf = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / omr
        log_joint = (gammaln(0.5 * (m + 2.0)) - gammaln(0.5 * m) - np.log(m * np.pi)
                     - 0.5 * np.log(omr) - 0.5 * (m + 2.0) * np.log1p(qf / m))

        def log_marg(z):
            return (gammaln(0.5 * (m + 1.0)) - gammaln(0.5 * m)
                    - 0.5 * np.log(m * np.pi) - 0.5 * (m + 1.0) * np.log1p(z * z / m))

        return log_joint - log_marg(z1) - log_marg(z2)

    def _conditional_inverse(self, v1, p):
        rho, m = self.alpha, self.m
        z1 = stdtrit(m, v1)
        s = np.sqrt((m + z1 * z1) * (1.0 - rho * rho) / (m + 1.0))
        z2 = rho * z1 + s * stdtrit(m + 1.0, p)
        return np.clip(stdtr(m, z2), CLAMP, 1.0 - CLAMP)


FAMILIES = {
    "independence": IndependenceCopula,
    "gumbel": GumbelCopula,
    "frank": FrankCopula,
    "joe": JoeCopula,
    "clayton": ClaytonCopula,
    "student": StudentCopula,
}


def make_copula(family, alpha=None, m=None):
    """Build a copula by family name.

    Parameters
    ----------
    family : str
        One of ``independence, gumbel, frank, joe, clayton, student``.
    alpha : float, optional
        Dependence parameter (correlation for ``student``).
    m : float, optional
        Degrees of freedom, ``student`` only.
    """
    key = family.lower()
    if key not in FAMILIES:
        raise ParameterError(f"unknown copula family {family!r}")
    if key == "independence":
        return IndependenceCopula()
    if key == "student":
        if alpha is None or m is None:
            raise ParameterError("student copula needs alpha and m")
        return StudentCopula(alpha, m)
    if alpha is None:
        raise ParameterError(f"{family} copula needs alpha")
    return FAMILIES[key](alpha)
