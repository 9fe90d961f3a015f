"""Coupled Euler discretisations of SDEs."""

from __future__ import annotations

import numpy as np

from ..errors import NumericError
from .gaussian import COUPLERS, CoupledPair


def _resolve(coupler):
    if callable(coupler):
        return coupler
    try:
        return COUPLERS[coupler]
    except KeyError:
        raise ValueError(f"unknown coupler {coupler!r}") from None


def euler_transition(drift, diffusion, x0, n_steps, rng, post=None):
    """Uncoupled Euler chain over unit time with step ``1 / n_steps``, batched over rows of ``x0``."""
    x = np.array(x0, dtype=float, ndmin=2)
    delta = 1.0 / n_steps
    sq = np.sqrt(delta)
    for k in range(n_steps):
        w = rng.standard_normal(x.shape)
        x = x + delta * drift(x) + sq * np.einsum("nij,nj->ni", diffusion(x), w)
        if post is not None:
            x = post(x)
        if not np.all(np.isfinite(x)):
            raise NumericError(f"non-finite Euler state at sub-step {k + 1}/{n_steps}")
    return x


def coupled_euler_step(drift, diffusion, xa, xb, delta, coupler, rng, post=None):
    """One coupled Euler step. Rows that are already equal share their noise and stay equal."""
    cpl = _resolve(coupler)
    sq = np.sqrt(delta)
    same = np.all(xa == xb, axis=1)
    ba, bb = drift(xa), drift(xb)
    sa, sb = diffusion(xa), diffusion(xb)
    for name, arr in (("drift", ba), ("drift", bb), ("diffusion", sa), ("diffusion", sb)):
        if not np.all(np.isfinite(arr)):
            raise NumericError(f"non-finite {name} value in coupled Euler step")
    res = cpl(xa + delta * ba, xb + delta * bb, sq * sa, sq * sb, rng)
    na = np.atleast_2d(res[0])
    nb = np.atleast_2d(res[1]).copy()
    nb[same] = na[same]
    if post is not None:
        na, nb = post(na), post(nb)
    return na, nb


def coupled_euler_transition(drift, diffusion, x0a, x0b, n_steps, coupler="mlr", rng=None, post=None):
    """Run two Euler chains over unit time with a per-step Gaussian coupler.

    Parameters
    ----------
    drift : callable
        ``drift(x)`` maps ``(n, d)`` states to ``(n, d)`` drifts.
    diffusion : callable
        ``diffusion(x)`` maps ``(n, d)`` states to ``(n, d, d)`` matrices.
    x0a, x0b : array_like, shape (n, d) or (d,)
    n_steps : int
        Number of sub-steps, ``delta = 1 / n_steps``.
    coupler : {"mlr", "lr", "common"} or callable
    post : callable, optional
        Applied to both chains after each sub-step (e.g. a positivity floor).

    Returns
    -------
    CoupledPair
        ``met`` is bitwise equality at the endpoint.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    single = np.ndim(x0a) == 1
    xa = np.array(x0a, dtype=float, ndmin=2)
    xb = np.array(x0b, dtype=float, ndmin=2)
    delta = 1.0 / n_steps
    for k in range(n_steps):
        xa, xb = coupled_euler_step(drift, diffusion, xa, xb, delta, coupler, rng, post)
        if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(xb))):
            raise NumericError(f"non-finite coupled Euler state at sub-step {k + 1}/{n_steps}")
    met = np.all(xa == xb, axis=1)
    if single:
        return CoupledPair(xa[0], xb[0], bool(met[0]))
    return CoupledPair(xa, xb, met)


def meeting_times(drift, diffusion, x0a, x0b, delta, t_max, coupler="mlr", rng=None, n_paths=None):
    """First time two coupled Euler chains with step ``delta`` coincide.

    Returns ``inf`` for paths that have not met by ``t_max``.
    """
    xa = np.array(x0a, dtype=float, ndmin=2)
    xb = np.array(x0b, dtype=float, ndmin=2)
    if n_paths is not None:
        xa = np.repeat(xa, n_paths, axis=0) if xa.shape[0] == 1 else xa
        xb = np.repeat(xb, n_paths, axis=0) if xb.shape[0] == 1 else xb
    times = np.full(xa.shape[0], np.inf)
    active = np.ones(xa.shape[0], dtype=bool)
    n_total = int(round(t_max / delta))
    for k in range(1, n_total + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        na, nb = coupled_euler_step(drift, diffusion, xa[idx], xb[idx], delta, coupler, rng)
        xa[idx], xb[idx] = na, nb
        met = np.all(na == nb, axis=1)
        times[idx[met]] = k * delta
        active[idx[met]] = False
    return times
