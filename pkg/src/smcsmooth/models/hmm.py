"""Finite-state hidden Markov model with exact forward-backward recursions.

Used as an enumeration oracle for smoothing expectations.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..fk.model import FeynmanKacModel


class DiscreteHMM(FeynmanKacModel):
    """States are integers ``0..K-1`` stored as floats in an ``(n, 1)`` array.

    ``P[i, j]`` is the transition probability, ``log_g[t, k]`` the log
    potential of state ``k`` at time ``t``.
    """

    def __init__(self, init, P, log_g):
        self.init = np.asarray(init, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.log_g = np.asarray(log_g, dtype=float)
        self.K = self.init.size
        self.T = self.log_g.shape[0] - 1
        self.dim = 1
        with np.errstate(divide="ignore"):
            self._logP = np.log(self.P)

    def _idx(self, x):
        return np.asarray(x)[..., 0].astype(np.int64)

    def sample_initial(self, n, rng):
        return rng.choice(self.K, size=n, p=self.init).astype(float)[:, None]

    def sample_transition(self, t, x_prev, rng):
        cdf = np.cumsum(self.P[self._idx(x_prev)], axis=1)
        u = rng.random(x_prev.shape[0])
        k = (u[:, None] >= cdf).sum(axis=1)
        return np.minimum(k, self.K - 1).astype(float)[:, None]

    def log_potential(self, t, x):
        return self.log_g[t, self._idx(x)]

    def log_transition_density(self, t, x_prev, x_new):
        return self._logP[self._idx(x_prev), self._idx(x_new)]

    def log_density_bound(self, t):
        return float(self._logP.max())

    def smoothing_marginals(self):
        """Exact ``P(X_t = k | all data)`` and pairwise marginals via forward-backward."""
        T, K = self.T, self.K
        with np.errstate(divide="ignore"):
            la = np.empty((T + 1, K))
            la[0] = np.log(self.init) + self.log_g[0]
            for t in range(1, T + 1):
                la[t] = logsumexp(la[t - 1][:, None] + self._logP, axis=0) + self.log_g[t]
            lb = np.zeros((T + 1, K))
            for t in range(T - 1, -1, -1):
                lb[t] = logsumexp(self._logP + (self.log_g[t + 1] + lb[t + 1])[None, :], axis=1)
        lz = logsumexp(la[T])
        marg = np.exp(la + lb - lz)
        pair = np.empty((T, K, K))
        for t in range(1, T + 1):
            lp = la[t - 1][:, None] + self._logP + (self.log_g[t] + lb[t])[None, :] - lz
            pair[t - 1] = np.exp(lp)
        return marg, pair, float(lz)

    def additive_expectation(self, psi0, psi):
        """Exact ``E[psi0(X_0) + sum_t psi(X_{t-1}, X_t)]`` given the data, for tabulated functions."""
        marg, pair, _ = self.smoothing_marginals()
        states = np.arange(self.K, dtype=float)[:, None]
        total = float(np.dot(marg[0], psi0(states)))
        grid_prev = np.repeat(states, self.K, axis=0)
        grid_new = np.tile(states, (self.K, 1))
        for t in range(1, self.T + 1):
            vals = np.asarray(psi(t, grid_prev, grid_new), dtype=float).reshape(self.K, self.K)
            total += float(np.sum(pair[t - 1] * vals))
        return total
