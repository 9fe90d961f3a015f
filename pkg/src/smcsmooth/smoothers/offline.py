"""Offline backward sampling of whole trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import StorageBudgetError
from ..fk.resampling import DiscreteSampler

DEFAULT_MAX_STORAGE = 10**8


@dataclass
class TrajectoryDraws:
    """``n_traj`` backward-sampled paths.

    ``indices[n, t]`` is the particle index of path ``n`` at time ``t`` and
    ``states[n, t]`` the matching state. ``cost_by_t[t]`` holds the density
    evaluations spent drawing the time-``t - 1`` indices (entry 0 is 0).
    """

    indices: np.ndarray
    states: np.ndarray
    cost_by_t: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n_traj(self):
        return self.indices.shape[0]


def check_storage(T, N, dim, max_storage=DEFAULT_MAX_STORAGE):
    size = (T + 1) * N * dim
    if max_storage is not None and size > max_storage:
        raise StorageBudgetError(
            f"offline smoothing would store {size} floats (T+1={T + 1}, N={N}, dim={dim}), above the cap {max_storage}"
        )


def offline_smoother(clouds, kernels, n_traj, rng, counter=None):
    """Draw ``I_T ~ M(W_T)``, then ``I_{t-1} ~ B_t(I_t, ·)`` for ``t = T..1``.

    ``kernels[t]`` must be the kernel for time ``t`` (``kernels[0]`` is ignored).
    """
    T = len(clouds) - 1
    if len(kernels) != T + 1:
        raise ValueError("need one kernel per time step (index 0 unused)")
    idx = np.empty((n_traj, T + 1), dtype=np.int64)
    idx[:, T] = DiscreteSampler(clouds[T].weights).draw(n_traj, rng)
    cost = np.zeros(T + 1, dtype=np.int64)
    for t in range(T, 0, -1):
        before = counter.evaluations if counter is not None else 0
        idx[:, t - 1] = kernels[t].sample(idx[:, t], rng)
        if counter is not None:
            cost[t] = counter.evaluations - before
    states = np.stack([clouds[t].states[idx[:, t]] for t in range(T + 1)], axis=1)
    return TrajectoryDraws(idx, states, cost)


def fixed_marginal_estimate(trajectories, s, phi):
    """``(1 / n_traj) sum_n phi(X_s^{I_s^n})``."""
    vals = np.asarray(phi(trajectories.states[:, s, :]), dtype=float).reshape(-1)
    return math.fsum(vals.tolist()) / vals.size


def path_additive_values(trajectories, fn):
    """``phi_t`` along each path for every ``t``: array of shape ``(n_traj, T + 1)``."""
    X = trajectories.states
    T = X.shape[1] - 1
    terms = np.empty((X.shape[0], T + 1))
    terms[:, 0] = fn.psi0(X[:, 0, :])
    for t in range(1, T + 1):
        terms[:, t] = fn.psi(t, X[:, t - 1, :], X[:, t, :])
    return np.cumsum(terms, axis=1)
