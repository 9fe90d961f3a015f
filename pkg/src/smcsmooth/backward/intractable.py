"""Forward steps that build backward kernels without evaluating transition densities."""

from __future__ import annotations

import numpy as np

from ..errors import UnsupportedOperationError
from ..fk.cloud import make_cloud
from ..fk.resampling import DiscreteSampler, adjacent_resample
from .kernel import BackwardKernel


def _require_coupling(model):
    if not model.has_coupled_transition:
        raise UnsupportedOperationError(f"{type(model).__name__} has no coupled transition sampler")


def independent_ancestors(cloud_prev, rng):
    """Two independent multinomial ancestor vectors."""
    s = DiscreteSampler(cloud_prev.weights)
    return s.draw(cloud_prev.N, rng), s.draw(cloud_prev.N, rng)


def itr_forward_step(model, cloud_prev, rng, ancestor_coupler=independent_ancestors):
    """Forward step where each particle comes from one of two coupled moves.

    Each particle ``n`` draws ancestors ``(A1, A2)``, moves both with the
    coupled transition and keeps one endpoint at random. Its backward row is
    ``(δ(A1) + δ(A2)) / 2`` if the two moves met and ``δ(A_L)`` otherwise.
    """
    _require_coupling(model)
    t = cloud_prev.t + 1
    N = cloud_prev.N
    a1, a2 = ancestor_coupler(cloud_prev, rng)
    x1, x2, met = model.sample_coupled_transition(t, cloud_prev.states[a1], cloud_prev.states[a2], rng)
    met = np.asarray(met, dtype=bool)
    pick = rng.integers(0, 2, size=N)
    x = np.where(pick[:, None] == 0, x1, x2)
    a = np.where(pick == 0, a1, a2)
    idx = np.where(met[:, None], np.stack([a1, a2], axis=1), np.stack([a, a], axis=1))
    probs = np.where(met[:, None], 0.5, np.array([1.0, 0.0]))
    info = {"meeting_rate": float(met.mean())}
    cloud = make_cloud(t, x, model.log_potential(t, x), ancestors=a, info=info)
    return cloud, BackwardKernel(t, N, indices=idx, probs=probs, kind="itr", info=info)


def itrc_forward_step(model, cloud_prev, rng, order=None):
    """Forward step that moves Hilbert-adjacent ancestor pairs with one coupled transition.

    Particles ``2k`` and ``2k + 1`` form a pair; both endpoints are kept. If
    the pair met, both rows get ``(δ(A_{2k}) + δ(A_{2k+1})) / 2``, otherwise
    each row is the point mass at its own ancestor.
    """
    _require_coupling(model)
    N = cloud_prev.N
    if N % 2:
        raise ValueError("the paired forward step needs an even number of particles")
    t = cloud_prev.t + 1
    a = adjacent_resample(cloud_prev.states, cloud_prev.weights, rng, order=order)
    ae, ao = a[0::2], a[1::2]
    xe, xo, met = model.sample_coupled_transition(t, cloud_prev.states[ae], cloud_prev.states[ao], rng)
    met = np.asarray(met, dtype=bool)
    x = np.empty((N, cloud_prev.dim))
    x[0::2], x[1::2] = xe, xo
    pair_idx = np.stack([ae, ao], axis=1)
    met_rows = np.repeat(met, 2)
    own = np.stack([a, a], axis=1)
    idx = np.where(met_rows[:, None], np.repeat(pair_idx, 2, axis=0), own)
    probs = np.where(met_rows[:, None], 0.5, np.array([1.0, 0.0]))
    distinct = ae != ao
    info = {
        "meeting_rate": float(met.mean()),
        "distinct_pairs": int(distinct.sum()),
        "distinct_meeting_rate": float(met[distinct].mean()) if distinct.any() else float("nan"),
    }
    cloud = make_cloud(t, x, model.log_potential(t, x), ancestors=a, info=info)
    return cloud, BackwardKernel(t, N, indices=idx, probs=probs, kind="itrc", info=info)
