"""The induced copula of componentwise claim maxima.

Given a base copula ``Q`` for the individual claim pairs and a claim-count law
``N >= 1`` with Laplace transform ``L``, the copula of the componentwise maxima
is ``C(u1, u2) = L(-ln Q(v1, v2))`` with ``v_i = exp(-L^{-1}(u_i))``.

Two density code paths are kept on purpose: the generic Laplace assembly
(:meth:`MixtureCopula.pdf_generic`) and the per-count-law closed forms in
log scale (:meth:`MixtureCopula.log_pdf`); each one is the correctness oracle
for the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .copulas import CLAMP, BaseCopula, _check_unit, _clamp_interior, _scalarize
from .errors import BoundaryError, UnsupportedError
from .mixing import MixingLaw


@dataclass(frozen=True)
class MixtureCopula:
    """Pair of a base copula and a claim-count mixing law."""

    base: BaseCopula
    mixing: MixingLaw

    # ------------------------------------------------------------------ CDF
    def cdf(self, u1, u2):
        a = _check_unit(u1, "u1")
        b = _check_unit(u2, "u2")
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape)
        pos = (a > 0.0) & (b > 0.0)
        if np.any(pos):
            v1 = self.mixing.v_transform(a[pos])
            v2 = self.mixing.v_transform(b[pos])
            q = self.base.cdf(v1, v2)
            val = np.where(q > 0.0, self.mixing.laplace_of_v(np.maximum(q, CLAMP)), 0.0)
            out[pos] = val
        return _scalarize(out, u1, u2)

    def cdf_multivariate(self, u):
        """Exchangeable d-variate CDF (gumbel, clayton or independence base only)."""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] < 2:
            raise UnsupportedError("need dimension >= 2")
        v = self.mixing.v_transform(np.clip(u, 0.0, 1.0))
        q = self.base.cdf_d(v)
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.where(q_arr > 0.0, self.mixing.laplace_of_v(np.maximum(q_arr, CLAMP)), 0.0)
        return _scalarize(out if np.ndim(q) else out[0], q)

    def mixture_df(self, margins, x, y):
        """Joint df of the claim maxima under marginal dfs ``margins = (G1, G2)``."""
        g1, g2 = margins
        return self._laplace_q(np.asarray(g1(x), dtype=float), np.asarray(g2(y), dtype=float), x, y)

    def _laplace_q(self, a, b, sx, sy):
        a = np.clip(a, 0.0, 1.0)
        b = np.clip(b, 0.0, 1.0)
        q = self.base.cdf(a, b)
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.where(q_arr > 0.0, self.mixing.laplace_of_v(np.maximum(q_arr, CLAMP)), 0.0)
        return _scalarize(out if np.ndim(q) else out[0], sx, sy)

    # -------------------------------------------------------------- density
    def log_pdf(self, u1, u2):
        """Log density via the count-law-specific closed form (log-scale throughout)."""
        a = _clamp_interior(u1, "u1")
        b = _clamp_interior(u2, "u2")
        a, b = np.broadcast_arrays(a, b)
        out = self._loglik(a, b)
        if np.any(~np.isfinite(np.atleast_1d(out))):
            raise BoundaryError("mixture density underflowed at an extreme corner")
        return _scalarize(out, u1, u2)

    def loglik_terms(self, u1, u2):
        return self.log_pdf(u1, u2)

    def pdf(self, u1, u2):
        return _scalarize(np.exp(self.log_pdf(u1, u2)), u1, u2)

    def _loglik(self, u1, u2):
        """Closed-form log density on clamped arrays; non-finite values pass through."""
        mix = self.mixing
        th = mix.theta
        v1 = mix.v_transform(u1)
        v2 = mix.v_transform(u2)
        v1 = np.clip(v1, CLAMP, 1.0 - CLAMP)
        v2 = np.clip(v2, CLAMP, 1.0 - CLAMP)
        q = self.base.cdf(v1, v2)
        log_q_dens = self.base._log_pdf(v1, v2)
        log_p1 = self.base._log_partial_v1(v1, v2)
        log_p2 = self.base._log_partial_v1(v2, v1)

        model = mix.model
        with np.errstate(divide="ignore"):
            if model == "shifted-geometric":
                omt = 1.0 - th
                log_w = np.logaddexp(np.log1p(-omt * q) + log_q_dens,
                                     np.log(2.0 * omt) + log_p1 + log_p2)
                return (2.0 * np.log1p(-omt * v1) + 2.0 * np.log1p(-omt * v2)
                        - np.log(th) - 3.0 * np.log1p(-omt * q) + log_w)
            if model == "shifted-poisson":
                log_w = np.logaddexp(np.log1p(th * q) + log_q_dens,
                                     np.log(th) + np.log(2.0 + th * q) + log_p1 + log_p2)
                return (th * (q + 1.0 - v1 - v2)
                        - np.log1p(th * v1) - np.log1p(th * v2) + log_w)
            if model == "truncated-poisson":
                log_w = np.logaddexp(np.log(th) + log_p1 + log_p2, log_q_dens)
                return (np.log1p(-np.exp(-th)) - np.log(th)
                        + th * (1.0 - v1 - v2 + q) + log_w)
        raise UnsupportedError(f"no closed-form density for mixing model {model!r}")

    def pdf_generic(self, u1, u2):
        """Density by direct assembly of Laplace-transform derivatives (oracle path)."""
        a = _clamp_interior(u1, "u1")
        b = _clamp_interior(u2, "u2")
        a, b = np.broadcast_arrays(a, b)
        mix = self.mixing
        v1 = np.clip(mix.v_transform(a), CLAMP, 1.0 - CLAMP)
        v2 = np.clip(mix.v_transform(b), CLAMP, 1.0 - CLAMP)
        q = self.base.cdf(v1, v2)
        if np.any(np.atleast_1d(q) <= 0.0):
            raise BoundaryError("base CDF underflowed; generic density undefined")
        d1 = mix.laplace_d1_of_v(q)
        d2 = mix.laplace_d2_of_v(q)
        dq1 = np.exp(self.base._log_partial_v1(v1, v2))
        dq2 = np.exp(self.base._log_partial_v1(v2, v1))
        q_dens = np.exp(self.base._log_pdf(v1, v2))
        jac = mix.dv_du(v1) * mix.dv_du(v2)
        core = (d1 + d2) * dq1 * dq2 - d1 * q * q_dens
        return _scalarize(jac / q**2 * core, u1, u2)

    # ------------------------------------------------------ partial and misc
    def partial_u1(self, u1, u2):
        """dC/du1, the conditional CDF of U2 given U1 = u1."""
        a = _clamp_interior(u1, "u1")
        b = _check_unit(u2, "u2")
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape)
        out[b >= 1.0] = 1.0
        mid = (b > 0.0) & (b < 1.0)
        if np.any(mid):
            out[mid] = self._partial_u1(a[mid], b[mid])
        return _scalarize(out, u1, u2)

    def partial_u2(self, u1, u2):
        return self.partial_u1(u2, u1)

    def _partial_u1(self, u1, u2):
        mix = self.mixing
        v1 = np.clip(mix.v_transform(u1), CLAMP, 1.0 - CLAMP)
        v2 = np.clip(mix.v_transform(u2), CLAMP, 1.0 - CLAMP)
        q = np.maximum(self.base.cdf(v1, v2), 1e-300)
        # dC/du1 = (L'(-ln Q) / L'(-ln v1)) * (v1 / Q) * dQ/dv1
        log_ratio = (mix.log_neg_d1_of_v(q) - mix.log_neg_d1_of_v(v1)
                     + np.log(v1) - np.log(q) + self.base._log_partial_v1(v1, v2))
        return np.clip(np.exp(log_ratio), 0.0, 1.0)

    def sample(self, n, rng, max_block=2**23):
        """Draw ``n`` pairs: count, base pairs, componentwise maxima, Laplace transform."""
        from .sampling import mixture_draws

        return mixture_draws(self, n, rng, max_block=max_block)

    def __repr__(self):
        return f"MixtureCopula({self.base!r}, {self.mixing!r})"


def compound_df(mc, margins, x, y, p_zero):
    """Df of the maxima when the raw count may be zero with probability ``p_zero``."""
    if not 0.0 <= p_zero < 1.0:
        raise ValueError("p_zero must lie in [0, 1)")
    return p_zero + (1.0 - p_zero) * mc.mixture_df(margins, x, y)
