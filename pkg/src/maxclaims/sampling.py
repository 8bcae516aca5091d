"""Exact simulation from the claim-maxima copula.

One output pair is produced by drawing a count ``lam``, drawing ``lam`` pairs
from the base copula, taking componentwise maxima ``(M1, M2)`` and returning
``(L(-ln M1), L(-ln M2))``.  The maxima are accumulated block by block so the
``lam`` intermediate pairs are never stored for large counts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeededStream:
    """Reproducible RNG stream: distinct indices give independent substreams."""

    seed: int
    index: int = 0

    def rng(self):
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.index,)))

    def child(self, index):
        return SeededStream(self.seed, index)


def mixture_draws(mc, n, rng, max_block=2**23):
    """Core sampler on a raw generator; see :func:`sample_mixture`."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = mc.mixing.sample(n, rng)
    m1 = np.empty(n)
    m2 = np.empty(n)
    # split replications into blocks whose total pair budget stays bounded
    bounds = np.cumsum(lam)
    start = 0
    while start < n:
        prev = bounds[start - 1] if start else 0
        stop = int(np.searchsorted(bounds, prev + max_block, side="right"))
        stop = min(max(stop, start + 1), n)
        counts = lam[start:stop]
        total = int(counts.sum())
        v1 = rng.random(total)
        p = rng.random(total)
        np.clip(v1, 1e-15, 1.0 - 1e-15, out=v1)
        np.clip(p, 1e-15, 1.0 - 1e-15, out=p)
        v2 = mc.base._conditional_inverse(v1, p)
        offsets = np.zeros(len(counts), dtype=np.int64)
        np.cumsum(counts[:-1], out=offsets[1:])
        m1[start:stop] = np.maximum.reduceat(v1, offsets)
        m2[start:stop] = np.maximum.reduceat(v2, offsets)
        start = stop
    u1 = mc.mixing.laplace_of_v(m1)
    u2 = mc.mixing.laplace_of_v(m2)
    return np.column_stack([u1, u2])


def sample_mixture(mc, n, stream):
    """Draw ``n`` pairs from the mixture copula on the given seeded stream.

    Parameters
    ----------
    mc : MixtureCopula
    n : int
        Number of pairs.
    stream : SeededStream
        Owns the randomness; same (seed, index, n) reproduces the output.

    Returns
    -------
    ndarray of shape (n, 2) with Uniform(0, 1) margins and joint law C.
    """
    return mixture_draws(mc, n, stream.rng())


def sample_claims(model, margins, n, stream):
    """Couple ``n`` claim pairs through a copula model and marginal quantile functions.

    ``model`` is anything with ``sample(n, rng)`` returning unit-square pairs
    (a base copula or a mixture copula); ``margins`` is a pair of quantile
    evaluators applied columnwise (inverse method).
    """
    u = model.sample(n, stream.rng())
    qx, qy = margins
    return np.column_stack([qx(u[:, 0]), qy(u[:, 1])])


def write_samples_csv(path, pairs, header=("u1", "u2")):
    """Dump sampled pairs to CSV with a header row."""
    pairs = np.asarray(pairs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in pairs:
            writer.writerow([repr(float(x)) for x in row])
