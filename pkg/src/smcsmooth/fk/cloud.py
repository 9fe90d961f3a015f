"""Weighted particle clouds."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..errors import DegenerateWeightsError, NumericError


@dataclass
class ParticleCloud:
    """Particles at one time step.

    Attributes
    ----------
    t : int
        Time index.
    states : ndarray, shape (N, dim)
    log_weights : ndarray, shape (N,)
        Normalised log weights.
    weights : ndarray, shape (N,)
        ``exp(log_weights)``, summing to one.
    ancestors : ndarray of int or None
        Index into the previous cloud for each particle (``None`` at ``t = 0``).
    log_increment : float
        Log of the mean unnormalised weight, the likelihood increment.
    """

    t: int
    states: np.ndarray
    log_weights: np.ndarray
    weights: np.ndarray
    ancestors: np.ndarray | None = None
    log_increment: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.states.shape[0]

    @property
    def dim(self):
        return self.states.shape[1]

    def ess(self):
        return ess(self.weights)


def ess(weights):
    """Effective sample size ``1 / sum(W**2)`` of normalised weights."""
    w = np.asarray(weights, dtype=float)
    return float(1.0 / np.dot(w, w))


def make_cloud(t, states, log_w, ancestors=None, info=None):
    """Normalise unnormalised log weights into a :class:`ParticleCloud`.

    Raises
    ------
    NumericError
        If states or weights contain NaN, or a weight is ``+inf``.
    DegenerateWeightsError
        If every weight is zero.
    """
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    log_w = np.asarray(log_w, dtype=float)
    if np.isnan(states).any():
        raise NumericError(f"NaN particle state at t={t}")
    if np.isnan(log_w).any() or np.isposinf(log_w).any():
        raise NumericError(f"non-finite log weight at t={t}")
    if not np.isfinite(log_w).any():
        raise DegenerateWeightsError(f"all potentials are zero at t={t}")
    lse = logsumexp(log_w)
    log_W = log_w - lse
    W = np.exp(log_W)
    W /= W.sum()
    return ParticleCloud(
        t=t,
        states=states,
        log_weights=log_W,
        weights=W,
        ancestors=None if ancestors is None else np.asarray(ancestors, dtype=np.int64),
        log_increment=float(lse - np.log(len(log_w))),
        info={} if info is None else info,
    )
