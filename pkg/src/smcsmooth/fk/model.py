"""Feynman-Kac model interface.

States are always stored as ``(n, dim)`` float arrays, including scalar
models (``dim == 1``). Time runs over ``0, ..., T``; the transition ``M_t``
moves a particle from time ``t - 1`` to time ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import UnsupportedOperationError


@dataclass(frozen=True)
class GaussianTransition:
    """``m_t(x, y) = N(y | F x + offset, cov)``, with the pieces the fast kernels need."""

    F: np.ndarray
    offset: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        chol = np.linalg.cholesky(self.cov)
        object.__setattr__(self, "chol", chol)
        object.__setattr__(self, "linv", np.ascontiguousarray(np.linalg.inv(chol)))
        d = self.cov.shape[0]
        log_norm = -0.5 * d * np.log(2 * np.pi) - np.sum(np.log(np.diag(chol)))
        object.__setattr__(self, "log_norm", float(log_norm))

    def mean(self, x_prev):
        return x_prev @ self.F.T + self.offset

    def logpdf(self, x_prev, x_new):
        z = (x_new - self.mean(x_prev)) @ self.linv.T
        return self.log_norm - 0.5 * np.sum(z * z, axis=-1)


class FeynmanKacModel:
    """Base class for Feynman-Kac models.

    Subclasses must provide ``T``, ``dim``, :meth:`sample_initial`,
    :meth:`sample_transition` and :meth:`log_potential`. The remaining
    methods are optional ingredients; algorithms that need a missing one
    raise :class:`UnsupportedOperationError`.
    """

    T: int
    dim: int

    # -- required -------------------------------------------------------
    def sample_initial(self, n, rng):
        raise NotImplementedError

    def sample_transition(self, t, x_prev, rng):
        raise NotImplementedError

    def log_potential(self, t, x):
        raise NotImplementedError

    # -- optional: tractable transition density --------------------------
    def log_transition_density(self, t, x_prev, x_new):
        """``log m_t(x_prev, x_new)``, broadcasting over leading axes."""
        raise UnsupportedOperationError(f"{type(self).__name__} has no tractable transition density")

    def log_density_bound(self, t):
        """``log`` of an upper bound on ``m_t``, or ``None`` if unknown."""
        return None

    def gaussian_transition(self, t):
        """A :class:`GaussianTransition` when ``m_t`` is linear Gaussian, else ``None``."""
        return None

    # -- optional: guided proposal ------------------------------------
    def sample_proposal(self, t, x_prev, rng):
        raise UnsupportedOperationError(f"{type(self).__name__} has no guided proposal")

    def log_proposal_density(self, t, x_prev, x_new):
        raise UnsupportedOperationError(f"{type(self).__name__} has no guided proposal")

    def sample_initial_proposal(self, n, rng):
        raise UnsupportedOperationError(f"{type(self).__name__} has no initial proposal")

    def log_initial_proposal_density(self, x):
        raise UnsupportedOperationError(f"{type(self).__name__} has no initial proposal")

    def log_initial_density(self, x):
        raise UnsupportedOperationError(f"{type(self).__name__} has no initial density")

    # -- optional: coupled transition ------------------------------------
    def sample_coupled_transition(self, t, xa, xb, rng):
        """Return ``(xa_new, xb_new, met)`` with correct marginals and ``met`` a bool array."""
        raise UnsupportedOperationError(f"{type(self).__name__} has no coupled transition sampler")

    # -- capability probes -------------------------------------------
    def _overrides(self, name):
        return getattr(type(self), name) is not getattr(FeynmanKacModel, name)

    @property
    def has_transition_density(self):
        return self._overrides("log_transition_density")

    @property
    def has_proposal(self):
        return self._overrides("sample_proposal") and self._overrides("log_proposal_density")

    @property
    def has_initial_proposal(self):
        return (
            self._overrides("sample_initial_proposal")
            and self._overrides("log_initial_proposal_density")
            and self._overrides("log_initial_density")
        )

    @property
    def has_coupled_transition(self):
        return self._overrides("sample_coupled_transition")


class ProposalIsTransition(FeynmanKacModel):
    """Wraps a model so that its guided proposal is the transition kernel itself."""

    def __init__(self, base):
        self.base = base
        self.T = base.T
        self.dim = base.dim

    def sample_initial(self, n, rng):
        return self.base.sample_initial(n, rng)

    def sample_transition(self, t, x_prev, rng):
        return self.base.sample_transition(t, x_prev, rng)

    def log_potential(self, t, x):
        return self.base.log_potential(t, x)

    def log_transition_density(self, t, x_prev, x_new):
        return self.base.log_transition_density(t, x_prev, x_new)

    def sample_proposal(self, t, x_prev, rng):
        return self.base.sample_transition(t, x_prev, rng)

    def log_proposal_density(self, t, x_prev, x_new):
        return self.base.log_transition_density(t, x_prev, x_new)
