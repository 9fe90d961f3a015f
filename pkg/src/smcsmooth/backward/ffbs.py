"""FFBS backward rows and the direct, pure-rejection and hybrid samplers."""

from __future__ import annotations

import numpy as np

from .._backend import kernels
from ..errors import BoundViolationError, DegenerateKernelError, UnsupportedOperationError
from ..fk.resampling import DiscreteSampler, inverse_cdf_draw
from .kernel import BackwardKernel, _draw_from_rows

BOUND_TOL = 1e-9
_FIRST_BLOCK = 4
_MAX_BLOCK = 4096


def _t_of(cloud_prev, t):
    return cloud_prev.t + 1 if t is None else t


def ffbs_matrix(cloud_prev, x_new, model, counter=None, t=None):
    """FFBS rows for each state in ``x_new`` (shape ``(m, dim)``), returned as ``(m, N)``.

    Costs ``m * N`` density evaluations.
    """
    t = _t_of(cloud_prev, t)
    x_new = np.atleast_2d(x_new)
    logm = model.log_transition_density(t, cloud_prev.states[None, :, :], x_new[:, None, :])
    logm = np.broadcast_to(logm, (x_new.shape[0], cloud_prev.N))
    if counter is not None:
        counter.add(logm.size)
    logr = cloud_prev.log_weights[None, :] + logm
    top = logr.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(top)):
        raise DegenerateKernelError(f"FFBS row with zero normalising constant at t={t}")
    rows = np.exp(logr - top)
    rows /= rows.sum(axis=1, keepdims=True)
    return rows


def ffbs_row(cloud_prev, x_t, model, counter=None, t=None):
    """``row[i] ∝ W_{t-1}^i m_t(X_{t-1}^i, x_t)``. Costs ``N`` evaluations."""
    return ffbs_matrix(cloud_prev, np.atleast_2d(x_t), model, counter, t)[0]


def ffbs_kernel(cloud_prev, cloud_t, model, counter=None):
    """Dense FFBS kernel for all particles of ``cloud_t``."""
    rows = ffbs_matrix(cloud_prev, cloud_t.states, model, counter, cloud_t.t)
    return BackwardKernel(cloud_t.t, cloud_prev.N, dense=rows, kind="ffbs")


def sample_ffbs_direct(row, rng):
    """Exact categorical draw from a probability row by CDF inversion."""
    return int(inverse_cdf_draw(np.asarray(row), rng.random()))


def sample_rows(rows, rng):
    """One CDF-inversion draw per row of ``rows``."""
    return _draw_from_rows(np.cumsum(rows, axis=1), rng.random(rows.shape[0]))


def _first_accept_generic(model, t, states_prev, x_new, cand, logu, log_bound):
    logm = model.log_transition_density(t, states_prev[cand], x_new[:, None, :])
    excess = logm - log_bound
    acc = logu <= excess
    any_acc = acc.any(axis=1)
    pos = np.where(any_acc, acc.argmax(axis=1), -1)
    used = np.where(any_acc, pos + 1, cand.shape[1])
    mask = np.arange(cand.shape[1])[None, :] < used[:, None]
    return pos, float(excess[mask].max()) if mask.any() else -np.inf


def rejection_backward(cloud_prev, x_new, model, rng, counter=None, sampler=None, max_trials=None, t=None):
    """Backward indices for each row of ``x_new`` by rejection from ``M(W_{t-1})``.

    Each trial proposes ``J ~ M(W_{t-1})`` and accepts with probability
    ``m_t(X^J, x) / Mbar``. With ``max_trials`` set, rows still pending after
    that many trials fall back to an exact direct draw.

    Returns
    -------
    idx : ndarray of int
    trials : ndarray of int
        Trials consumed per row, i.e. ``min(tau, max_trials)``.
    fell_back : ndarray of bool
    """
    t = _t_of(cloud_prev, t)
    log_bound = model.log_density_bound(t)
    if log_bound is None:
        raise UnsupportedOperationError(f"{type(model).__name__} declares no transition density bound")
    x_new = np.ascontiguousarray(np.atleast_2d(x_new), dtype=float)
    m = x_new.shape[0]
    if sampler is None:
        sampler = DiscreteSampler(cloud_prev.weights)
    gauss = model.gaussian_transition(t)
    prev_mean = np.ascontiguousarray(gauss.mean(cloud_prev.states)) if gauss is not None else None

    idx = np.full(m, -1, dtype=np.int64)
    trials = np.zeros(m, dtype=np.int64)
    pending = np.arange(m)
    used = 0
    block = _FIRST_BLOCK
    while pending.size:
        b = block if max_trials is None else min(block, max_trials - used)
        if b <= 0:
            break
        cand = np.ascontiguousarray(sampler.draw((pending.size, b), rng), dtype=np.int64)
        logu = np.log(rng.random((pending.size, b)))
        if gauss is not None:
            pos, max_excess = kernels.gaussian_first_accept(
                prev_mean, gauss.linv, gauss.log_norm, float(log_bound), x_new[pending], cand, logu
            )
        else:
            pos, max_excess = _first_accept_generic(model, t, cloud_prev.states, x_new[pending], cand, logu, log_bound)
        if max_excess > BOUND_TOL:
            raise BoundViolationError(
                f"m_t exceeds the declared bound at t={t} (log excess {max_excess:.3g})"
            )
        acc = pos >= 0
        rows_acc = pending[acc]
        idx[rows_acc] = cand[acc, pos[acc]]
        trials[rows_acc] += pos[acc] + 1
        trials[pending[~acc]] += b
        pending = pending[~acc]
        used += b
        block = min(2 * block, _MAX_BLOCK)

    fell_back = np.zeros(m, dtype=bool)
    if counter is not None:
        counter.add(trials.sum())
    if pending.size:
        fell_back[pending] = True
        rows = ffbs_matrix(cloud_prev, x_new[pending], model, counter, t)
        idx[pending] = sample_rows(rows, rng)
    if counter is not None:
        counter.record_trials(trials, fallbacks=pending.size)
    return idx, trials, fell_back


def sample_ffbs_pure_rejection(cloud_prev, x_t, model, sampler=None, counter=None, rng=None, t=None):
    """One FFBS index by pure rejection; the trial count is geometric."""
    idx, _, _ = rejection_backward(cloud_prev, x_t, model, rng, counter, sampler, None, t)
    return int(idx[0])


def sample_ffbs_hybrid(cloud_prev, x_t, model, sampler=None, counter=None, K=None, rng=None, t=None):
    """One FFBS index: at most ``K`` rejection trials (default ``N``), then a direct draw."""
    K = cloud_prev.N if K is None else K
    idx, _, _ = rejection_backward(cloud_prev, x_t, model, rng, counter, sampler, K, t)
    return int(idx[0])


def draw_ffbs(cloud_prev, x_new, model, rng, method="hybrid", counter=None, sampler=None, K=None, t=None):
    """FFBS indices for many target states with the chosen sampler."""
    if method == "direct":
        rows = ffbs_matrix(cloud_prev, x_new, model, counter, t)
        return sample_rows(rows, rng)
    if method == "pure":
        return rejection_backward(cloud_prev, x_new, model, rng, counter, sampler, None, t)[0]
    if method == "hybrid":
        K = cloud_prev.N if K is None else K
        return rejection_backward(cloud_prev, x_new, model, rng, counter, sampler, K, t)[0]
    raise ValueError(f"unknown FFBS sampling method {method!r}")


def ffbs_sampling_kernel(cloud_prev, cloud_t, model, method="hybrid", counter=None, K=None):
    """Implicit FFBS kernel that draws on demand; rows are never built unless ``method='direct'``."""
    sampler = DiscreteSampler(cloud_prev.weights) if method != "direct" else None

    def draw(rows, rng):
        return draw_ffbs(cloud_prev, cloud_t.states[rows], model, rng, method, counter, sampler, K, cloud_t.t)

    return BackwardKernel(cloud_t.t, cloud_prev.N, sampler=draw, kind=f"ffbs-{method}", info={"n_rows": cloud_t.N})
