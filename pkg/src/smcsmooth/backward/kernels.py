"""GT, PaRIS and MCMC backward kernels."""

from __future__ import annotations

import numpy as np

from ..fk.resampling import DiscreteSampler
from .ffbs import draw_ffbs
from .kernel import BackwardKernel, point_mass_kernel


def gt_kernel(cloud_t, n_prev=None):
    """Genealogy tracking: row ``i`` is the point mass at ``A_t^i``. No density evaluations."""
    if cloud_t.ancestors is None:
        raise ValueError("cloud has no ancestors (t = 0?)")
    n_prev = cloud_t.N if n_prev is None else n_prev
    return point_mass_kernel(cloud_t.t, n_prev, cloud_t.ancestors, kind="gt")


def paris_kernel(cloud_prev, cloud_t, model, n_tilde=2, method="hybrid", counter=None, rng=None, sampler=None, K=None):
    """Row ``n`` is the empirical measure of ``n_tilde`` i.i.d. FFBS draws for particle ``n``."""
    if n_tilde < 1:
        raise ValueError("n_tilde must be >= 1")
    if sampler is None and method != "direct":
        sampler = DiscreteSampler(cloud_prev.weights)
    targets = np.repeat(cloud_t.states, n_tilde, axis=0)
    idx = draw_ffbs(cloud_prev, targets, model, rng, method, counter, sampler, K, cloud_t.t)
    idx = idx.reshape(cloud_t.N, n_tilde)
    probs = np.full(idx.shape, 1.0 / n_tilde)
    return BackwardKernel(cloud_t.t, cloud_prev.N, indices=idx, probs=probs, kind="paris")


def imh_chain(cloud_prev, x_new, start, model, n_steps, rng, counter=None, sampler=None, t=None):
    """Independent Metropolis-Hastings chains targeting the FFBS rows of ``x_new``.

    Proposals come from ``M(W_{t-1})``; the density at the current state is
    cached, so each step costs exactly one new evaluation per chain. The
    starting value is assumed known from the forward pass and is not
    counted.

    Returns
    -------
    ndarray, shape (m, n_steps + 1)
        Visited states, starting with ``start``.
    """
    t = cloud_prev.t + 1 if t is None else t
    x_new = np.atleast_2d(x_new)
    cur = np.asarray(start, dtype=np.int64).copy()
    m = cur.size
    if sampler is None:
        sampler = DiscreteSampler(cloud_prev.weights)
    states = cloud_prev.states
    logm_cur = model.log_transition_density(t, states[cur], x_new)
    path = np.empty((m, n_steps + 1), dtype=np.int64)
    path[:, 0] = cur
    for k in range(n_steps):
        prop = sampler.draw(m, rng)
        logm_prop = model.log_transition_density(t, states[prop], x_new)
        if counter is not None:
            counter.add(m)
        with np.errstate(invalid="ignore"):
            log_ratio = logm_prop - logm_cur
        log_ratio = np.where(np.isneginf(logm_cur), np.inf, log_ratio)
        accept = np.log(rng.random(m)) <= log_ratio
        cur = np.where(accept, prop, cur)
        logm_cur = np.where(accept, logm_prop, logm_cur)
        path[:, k + 1] = cur
    return path


def imh_backward_sample(cloud_prev, x_t, a_t, model, n_steps, counter=None, rng=None, sampler=None, t=None):
    """End point of an ``n_steps`` IMH chain started at ``a_t``."""
    return int(imh_chain(cloud_prev, x_t, [a_t], model, n_steps, rng, counter, sampler, t)[0, -1])


def imh_transition_matrix(weights, m_values):
    """Exact IMH transition matrix on ``{0..N-1}`` for proposal ``weights`` and target ``∝ weights * m_values``."""
    w = np.asarray(weights, dtype=float)
    mv = np.asarray(m_values, dtype=float)
    n = w.size
    P = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if j != i:
                P[i, j] = w[j] * min(1.0, mv[j] / mv[i])
        P[i, i] = 1.0 - P[i].sum()
    return P


def imhp_kernel(cloud_prev, cloud_t, model, n_tilde=2, counter=None, rng=None, sampler=None):
    """Row ``i`` is the empirical measure of an IMH chain of length ``n_tilde`` started at ``A_t^i``."""
    if n_tilde < 1:
        raise ValueError("n_tilde must be >= 1")
    path = imh_chain(cloud_prev, cloud_t.states, cloud_t.ancestors, model, n_tilde - 1, rng, counter, sampler, cloud_t.t)
    probs = np.full(path.shape, 1.0 / n_tilde)
    return BackwardKernel(cloud_t.t, cloud_prev.N, indices=path, probs=probs, kind="imhp")


def imh_kernel(cloud_prev, cloud_t, model, n_steps=1, counter=None):
    """Offline IMH kernel: each draw runs a fresh chain from ``A_t^i`` and returns its end point."""
    sampler = DiscreteSampler(cloud_prev.weights)

    def draw(rows, rng):
        path = imh_chain(
            cloud_prev, cloud_t.states[rows], cloud_t.ancestors[rows], model, n_steps, rng, counter, sampler, cloud_t.t
        )
        return path[:, -1]

    return BackwardKernel(cloud_t.t, cloud_prev.N, sampler=draw, kind="imh", info={"n_rows": cloud_t.N})
