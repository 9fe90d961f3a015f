"""Bootstrap and guided particle filter steps."""

from __future__ import annotations

import numpy as np

from ..errors import UnsupportedOperationError
from .cloud import make_cloud
from .resampling import resample


def initial_cloud(model, N, rng, guided=False):
    """Particles at ``t = 0``.

    With ``guided=True`` and a model that defines an initial proposal, the
    particles are drawn from it and reweighted by ``m_0 / q_0``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if guided and model.has_initial_proposal:
        x = model.sample_initial_proposal(N, rng)
        log_w = (
            model.log_potential(0, x)
            + model.log_initial_density(x)
            - model.log_initial_proposal_density(x)
        )
    else:
        x = model.sample_initial(N, rng)
        log_w = model.log_potential(0, x)
    return make_cloud(0, x, log_w)


def bootstrap_step(model, cloud, rng, resampling="multinomial"):
    """Resample, move with ``M_t``, reweight by ``G_t``."""
    t = cloud.t + 1
    a = resample(cloud, rng, resampling)
    x = model.sample_transition(t, cloud.states[a], rng)
    return make_cloud(t, x, model.log_potential(t, x), ancestors=a)


def guided_step(model, cloud, rng, resampling="multinomial"):
    """Resample, move with the model's proposal, reweight by ``G_t m_t / q_t``."""
    if not model.has_proposal:
        raise UnsupportedOperationError(f"{type(model).__name__} has no guided proposal")
    t = cloud.t + 1
    a = resample(cloud, rng, resampling)
    xp = cloud.states[a]
    x = model.sample_proposal(t, xp, rng)
    log_w = (
        model.log_potential(t, x)
        + model.log_transition_density(t, xp, x)
        - model.log_proposal_density(t, xp, x)
    )
    return make_cloud(t, x, log_w, ancestors=a)


def run_filter(model, N, rng, guided=False, resampling="multinomial"):
    """Run a full filter pass and return the list of clouds for ``t = 0..T``."""
    step = guided_step if guided else bootstrap_step
    clouds = [initial_cloud(model, N, rng, guided=guided)]
    for _ in range(model.T):
        clouds.append(step(model, clouds[-1], rng, resampling))
    return clouds


def log_likelihood(clouds):
    return float(np.sum([c.log_increment for c in clouds]))
