"""Drivers that combine a filter, a backward kernel and a smoother."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..backward.ffbs import ffbs_kernel, ffbs_sampling_kernel
from ..backward.intractable import itr_forward_step, itrc_forward_step
from ..backward.kernel import CostCounter
from ..backward.kernels import gt_kernel, imh_kernel, imhp_kernel, paris_kernel
from ..fk.filters import bootstrap_step, guided_step, initial_cloud
from .additive import additive_estimate, initial_statistics, online_update
from .offline import DEFAULT_MAX_STORAGE, check_storage, offline_smoother, path_additive_values

ONLINE_KERNELS = ("gt", "ffbs", "paris", "imhp", "itr", "itrc")
OFFLINE_KERNELS = ("gt", "ffbs", "paris", "imh", "itr", "itrc")


@dataclass
class SmootherOptions:
    """Algorithm choices shared by the online and offline drivers.

    ``kernel`` picks the backward kernel; ``method`` picks the FFBS sampler
    (``direct``, ``pure`` or ``hybrid``) for rejection-based kernels.
    """

    kernel: str = "paris"
    guided: bool = False
    resampling: str = "multinomial"
    n_tilde: int = 2
    method: str = "hybrid"
    K: int | None = None


@dataclass
class OnlineState:
    cloud: object
    S: np.ndarray


@dataclass
class SmootherRun:
    """Per-time outputs of a smoother run, for ``t = 0..T``."""

    estimate: np.ndarray
    ess: np.ndarray
    cost: np.ndarray
    meet: np.ndarray
    counter: CostCounter
    info: dict = field(default_factory=dict)


def _forward(model, cloud, rng, opts):
    step = guided_step if opts.guided else bootstrap_step
    return step(model, cloud, rng, opts.resampling)


def online_step(model, state, fn, rng, opts, counter):
    """Advance the filter one step and update the smoothing statistics. Returns ``(state', estimate)``."""
    prev = state.cloud
    k = opts.kernel
    if k == "itr":
        cloud, kern = itr_forward_step(model, prev, rng)
    elif k == "itrc":
        cloud, kern = itrc_forward_step(model, prev, rng)
    else:
        cloud = _forward(model, prev, rng, opts)
        if k == "gt":
            kern = gt_kernel(cloud, prev.N)
        elif k == "ffbs":
            kern = ffbs_kernel(prev, cloud, model, counter)
        elif k == "paris":
            kern = paris_kernel(prev, cloud, model, opts.n_tilde, opts.method, counter, rng, K=opts.K)
        elif k == "imhp":
            kern = imhp_kernel(prev, cloud, model, opts.n_tilde, counter, rng)
        else:
            raise ValueError(f"unknown online kernel {k!r}")
    S = online_update(state.S, kern, fn, prev, cloud)
    cloud.info.setdefault("meeting_rate", kern.info.get("meeting_rate", float("nan")))
    return OnlineState(cloud, S), additive_estimate(cloud, S)


def paris_online_step(model, state, fn, n_tilde, method, counter, rng, resampling="multinomial"):
    """Bootstrap step, PaRIS kernel and online update in one call."""
    opts = SmootherOptions(kernel="paris", n_tilde=n_tilde, method=method, resampling=resampling)
    return online_step(model, state, fn, rng, opts, counter)


def run_online(model, N, fn, rng, opts=None, counter=None):
    """Online smoother over ``t = 0..T``; ``cost[t]`` counts evaluations spent at step ``t``."""
    opts = opts or SmootherOptions()
    counter = counter or CostCounter()
    T = model.T
    est = np.empty(T + 1)
    ess = np.empty(T + 1)
    cost = np.zeros(T + 1, dtype=np.int64)
    meet = np.full(T + 1, np.nan)
    cloud = initial_cloud(model, N, rng, guided=opts.guided)
    state = OnlineState(cloud, initial_statistics(cloud, fn))
    est[0] = additive_estimate(cloud, state.S)
    ess[0] = cloud.ess()
    for t in range(1, T + 1):
        before = counter.evaluations
        state, est[t] = online_step(model, state, fn, rng, opts, counter)
        cost[t] = counter.evaluations - before
        ess[t] = state.cloud.ess()
        meet[t] = state.cloud.info.get("meeting_rate", np.nan)
    return SmootherRun(est, ess, cost, meet, counter)


def forward_pass(model, N, rng, opts, counter=None, max_storage=DEFAULT_MAX_STORAGE):
    """Store every cloud and build the backward kernels needed offline."""
    check_storage(model.T, N, model.dim, max_storage)
    counter = counter or CostCounter()
    clouds = [initial_cloud(model, N, rng, guided=opts.guided)]
    kernels = [None]
    meet = [np.nan]
    for t in range(1, model.T + 1):
        prev = clouds[-1]
        k = opts.kernel
        if k == "itr":
            cloud, kern = itr_forward_step(model, prev, rng)
        elif k == "itrc":
            cloud, kern = itrc_forward_step(model, prev, rng)
        else:
            cloud = _forward(model, prev, rng, opts)
            if k == "gt":
                kern = gt_kernel(cloud, prev.N)
            elif k == "ffbs":
                kern = ffbs_sampling_kernel(prev, cloud, model, opts.method, counter, opts.K)
            elif k == "imh":
                kern = imh_kernel(prev, cloud, model, max(opts.n_tilde - 1, 1), counter)
            elif k == "paris":
                kern = paris_kernel(prev, cloud, model, opts.n_tilde, opts.method, counter, rng, K=opts.K)
            else:
                raise ValueError(f"unknown offline kernel {k!r}")
        clouds.append(cloud)
        kernels.append(kern)
        meet.append(kern.info.get("meeting_rate", np.nan))
    return clouds, kernels, np.asarray(meet)


def run_offline(model, N, fn, rng, opts=None, n_traj=None, counter=None, max_storage=DEFAULT_MAX_STORAGE):
    """Offline smoother: forward pass, then ``n_traj`` backward trajectories.

    ``estimate[t]`` is the trajectory average of ``phi_t``; ``cost[t]`` is
    the number of evaluations spent drawing the time-``t - 1`` indices
    during the backward pass.
    """
    opts = opts or SmootherOptions(kernel="ffbs")
    n_traj = N if n_traj is None else n_traj
    counter = counter or CostCounter()
    clouds, kernels, meet = forward_pass(model, N, rng, opts, counter, max_storage)
    draws = offline_smoother(clouds, kernels, n_traj, rng, counter)
    phi = path_additive_values(draws, fn)
    est = np.array([math.fsum(phi[:, t].tolist()) / n_traj for t in range(model.T + 1)])
    ess = np.array([c.ess() for c in clouds])
    return SmootherRun(est, ess, draws.cost_by_t, meet, counter, info={"trajectories": draws})
