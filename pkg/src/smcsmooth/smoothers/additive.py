"""Additive functions and the online smoothing recursion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class AdditiveFunction:
    """``phi_t(x_{0:t}) = psi0(x_0) + sum_{s=1}^t psi(s, x_{s-1}, x_s)``.

    ``psi0(x)`` maps ``(..., dim)`` to ``(...)``; ``psi(t, x_prev, x_new)``
    broadcasts over leading axes in the same way.
    """

    psi0: Callable
    psi: Callable

    def psi_at(self, t, x_prev, x_new):
        if t == 0:
            return self.psi0(x_new)
        return self.psi(t, x_prev, x_new)


def first_coordinate_sum(offset=0.0):
    """``phi_t = sum_{s<=t} (x_s[0] - offset)``."""
    return AdditiveFunction(
        psi0=lambda x: x[..., 0] - offset,
        psi=lambda t, xp, x: x[..., 0] - offset,
    )


def zero_function():
    return AdditiveFunction(psi0=lambda x: np.zeros(x.shape[:-1]), psi=lambda t, xp, x: np.zeros(np.broadcast_shapes(xp.shape, x.shape)[:-1]))


def initial_statistics(cloud0, fn):
    return np.asarray(fn.psi0(cloud0.states), dtype=float).reshape(cloud0.N)


def online_update(S_prev, kernel, fn, cloud_prev, cloud_t):
    """``S_t[i] = sum_j B[i, j] (S_{t-1}[j] + psi_t(X_{t-1}^j, X_t^i))``."""
    S_prev = np.asarray(S_prev, dtype=float)
    if S_prev.shape != (cloud_prev.N,):
        raise ValueError(f"S_prev has shape {S_prev.shape}, expected ({cloud_prev.N},)")
    if kernel.n_prev != cloud_prev.N:
        raise ValueError("kernel width does not match the previous cloud")
    t = cloud_t.t
    Xp, Xt = cloud_prev.states, cloud_t.states
    if kernel.dense is not None:
        B = kernel.dense
        if B.shape != (cloud_t.N, cloud_prev.N):
            raise ValueError("dense kernel shape does not match the clouds")
        psi = np.broadcast_to(fn.psi(t, Xp[None, :, :], Xt[:, None, :]), B.shape)
        return B @ S_prev + np.sum(B * psi, axis=1)
    if kernel.indices is None:
        raise ValueError("online_update needs materialised or sparse kernel rows")
    idx, p = kernel.indices, kernel.probs
    if idx.shape[0] != cloud_t.N:
        raise ValueError("sparse kernel rows do not match the current cloud")
    psi = np.broadcast_to(fn.psi(t, Xp[idx], Xt[:, None, :]), idx.shape)
    return np.sum(p * (S_prev[idx] + psi), axis=1)


def additive_estimate(cloud, S):
    """``sum_n W^n S[n]`` with compensated summation."""
    return math.fsum((cloud.weights * np.asarray(S, dtype=float)).tolist())


def genealogy_estimate(clouds, fn):
    """Genealogy-tracking estimate by explicit path accumulation.

    Traces each terminal particle's ancestry back to time 0 and sums the
    additive terms along the path.
    """
    T = len(clouds) - 1
    N = clouds[-1].N
    lineage = np.arange(N)
    total = np.zeros(N)
    for t in range(T, 0, -1):
        a = clouds[t].ancestors[lineage]
        total += np.asarray(fn.psi(t, clouds[t - 1].states[a], clouds[t].states[lineage]), dtype=float).reshape(N)
        lineage = a
    total += np.asarray(fn.psi0(clouds[0].states[lineage]), dtype=float).reshape(N)
    return math.fsum((clouds[-1].weights * total).tolist())
