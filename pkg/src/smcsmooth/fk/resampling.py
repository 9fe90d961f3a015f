"""Discrete sampling and resampling schemes."""

from __future__ import annotations

import numpy as np

from .._backend import kernels
from ..errors import NumericError

HILBERT_BITS = 16
MAX_HILBERT_DIM = 8


def check_simplex(weights, atol=1e-9):
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-d array")
    if not np.all(np.isfinite(w)) or (w < 0).any():
        raise ValueError("weights must be finite and non-negative")
    if abs(w.sum() - 1.0) > atol:
        raise ValueError(f"weights sum to {w.sum()!r}, not 1")
    return w


class DiscreteSampler:
    """Alias-method sampler for a fixed probability vector.

    Setup is O(N) and each draw costs O(1).
    """

    def __init__(self, weights):
        w = check_simplex(weights)
        self.weights = w
        self.n = w.size
        self.prob, self.alias = kernels.alias_setup(w / w.sum())

    def draw(self, size, rng):
        k = rng.integers(0, self.n, size=size)
        u = rng.random(size=size)
        return np.where(u < self.prob[k], k, self.alias[k])


def inverse_cdf_draw(weights, u):
    """Reference sampler: invert the cumulative weights at uniforms ``u``."""
    cdf = np.cumsum(weights)
    idx = np.searchsorted(cdf, np.asarray(u) * cdf[-1], side="right")
    return np.minimum(idx, len(weights) - 1)


def multinomial_resample(weights, rng, n=None):
    w = check_simplex(weights)
    n = w.size if n is None else n
    return DiscreteSampler(w).draw(n, rng)


def systematic_resample(weights, rng, n=None):
    w = check_simplex(weights)
    n = w.size if n is None else n
    u = (rng.random() + np.arange(n)) / n
    return inverse_cdf_draw(w, u)


def hilbert_sort(points, bits=HILBERT_BITS):
    """Permutation ordering ``points`` along a Hilbert curve.

    Coordinates are min-max scaled onto a ``2**bits`` grid per axis. Ties
    keep their original order, so the result is deterministic.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if np.isnan(pts).any():
        raise NumericError("NaN coordinates passed to hilbert_sort")
    n, d = pts.shape
    if d == 1:
        return np.argsort(pts[:, 0], kind="stable")
    if d > MAX_HILBERT_DIM:
        raise ValueError(f"hilbert_sort supports dim <= {MAX_HILBERT_DIM}, got {d}")
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0] = 1.0
    top = float(2**bits - 1)
    grid = np.rint((pts - lo) / span * top)
    grid = np.ascontiguousarray(np.clip(grid, 0, top).astype(np.uint64))
    keys = kernels.hilbert_keys(grid, bits)
    return np.lexsort([keys[:, w] for w in range(keys.shape[1] - 1, -1, -1)])


def adjacent_resample(states, weights, rng, order=None):
    """Adjacent resampler.

    Draws offspring counts systematically, then lists them by walking the
    Hilbert order so that consecutive output pairs tend to be close in
    state space. Returns ancestor indices of length ``N``.
    """
    w = check_simplex(weights)
    n = w.size
    counts = np.bincount(systematic_resample(w, rng), minlength=n)
    s = hilbert_sort(states) if order is None else np.asarray(order)
    f = np.ascontiguousarray(counts[s], dtype=np.int64)
    tie_u = np.ascontiguousarray(rng.random(n))
    pos = kernels.adjacent_traverse(f, tie_u)
    return s[pos]


RESAMPLERS = {
    "multinomial": lambda cloud, rng: multinomial_resample(cloud.weights, rng),
    "systematic": lambda cloud, rng: systematic_resample(cloud.weights, rng),
    "adjacent": lambda cloud, rng: adjacent_resample(cloud.states, cloud.weights, rng),
}


def resample(cloud, rng, scheme="multinomial"):
    try:
        fn = RESAMPLERS[scheme]
    except KeyError:
        raise ValueError(f"unknown resampling scheme {scheme!r}") from None
    return fn(cloud, rng)
