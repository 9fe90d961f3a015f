"""Backward kernel container and cost instrumentation."""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class CostCounter:
    """Counts transition-density evaluations and records rejection trials per draw.

    Thread-safe; never reset implicitly.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.evaluations = 0
        self.trials = Counter()
        self.fallbacks = 0
        self.draws = 0

    def add(self, n):
        n = int(n)
        if n < 0:
            raise ValueError("cost increments must be non-negative")
        with self._lock:
            self.evaluations += n

    def record_trials(self, trials, fallbacks=0):
        vals, counts = np.unique(np.asarray(trials, dtype=np.int64), return_counts=True)
        with self._lock:
            for v, c in zip(vals.tolist(), counts.tolist()):
                self.trials[v] += c
            self.draws += int(np.size(trials))
            self.fallbacks += int(fallbacks)

    def trial_histogram(self):
        return dict(sorted(self.trials.items()))

    def mean_trials(self):
        if not self.draws:
            return float("nan")
        return sum(k * v for k, v in self.trials.items()) / self.draws


def _draw_from_rows(cum, u):
    """Inverse-CDF draw per row of a cumulative-probability matrix."""
    col = np.sum(u[:, None] * cum[:, -1:] >= cum, axis=1)
    return np.minimum(col, cum.shape[1] - 1)


@dataclass
class BackwardKernel:
    """Backward kernel ``B_t`` from particles at ``t`` to indices at ``t - 1``.

    Exactly one representation is populated:

    * ``dense`` of shape ``(N_t, N_{t-1})``;
    * ``indices``/``probs`` of shape ``(N_t, K)`` (sparse rows, atoms may repeat);
    * ``sampler(rows, rng)``, an implicit sampler for kernels whose rows are
      never materialised.
    """

    t: int
    n_prev: int
    dense: np.ndarray | None = None
    indices: np.ndarray | None = None
    probs: np.ndarray | None = None
    sampler: Callable | None = None
    kind: str = ""
    info: dict = field(default_factory=dict)

    @property
    def is_dense(self):
        return self.dense is not None

    @property
    def is_sparse(self):
        return self.indices is not None

    @property
    def n_rows(self):
        if self.dense is not None:
            return self.dense.shape[0]
        if self.indices is not None:
            return self.indices.shape[0]
        return int(self.info.get("n_rows", -1))

    def row(self, i):
        """Row ``i`` as a dense probability vector of length ``n_prev``."""
        if self.dense is not None:
            return self.dense[i].copy()
        if self.indices is not None:
            out = np.zeros(self.n_prev)
            np.add.at(out, self.indices[i], self.probs[i])
            return out
        raise ValueError(f"{self.kind or 'implicit'} kernel rows are not materialised")

    def to_dense(self):
        return np.stack([self.row(i) for i in range(self.n_rows)])

    def support_size(self, i):
        if self.dense is not None:
            return int(np.count_nonzero(self.dense[i]))
        if self.indices is not None:
            return int(np.unique(self.indices[i][self.probs[i] > 0]).size)
        raise ValueError("implicit kernel has no materialised support")

    def sample(self, rows, rng):
        """Draw one index at ``t - 1`` for each entry of ``rows``."""
        rows = np.asarray(rows, dtype=np.int64)
        if self.sampler is not None:
            return np.asarray(self.sampler(rows, rng), dtype=np.int64)
        if self.indices is not None:
            if self.indices.shape[1] == 1:
                return self.indices[rows, 0]
            cum = np.cumsum(self.probs[rows], axis=1)
            col = _draw_from_rows(cum, rng.random(rows.size))
            return self.indices[rows, col]
        cum = np.cumsum(self.dense[rows], axis=1)
        return _draw_from_rows(cum, rng.random(rows.size))


def point_mass_kernel(t, n_prev, targets, kind="gt", info=None):
    idx = np.asarray(targets, dtype=np.int64)[:, None]
    return BackwardKernel(t, n_prev, indices=idx, probs=np.ones_like(idx, dtype=float), kind=kind, info=info or {})
