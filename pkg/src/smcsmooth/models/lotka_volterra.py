"""Stochastic Lotka-Volterra predator-prey model observed on the log scale."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..coupling.euler import coupled_euler_transition, euler_transition
from ..errors import NumericError
from ..fk.model import FeynmanKacModel


def _default_gamma():
    return np.linalg.cholesky(np.array([[1 / 100, 1 / 200], [1 / 200, 1 / 100]]))


@dataclass
class LotkaVolterraSDE:
    """``dX = b(X) dt + diag(X) Gamma dW`` with ``b`` the competitive Lotka-Volterra drift.

    ``b(x) = [beta0 x0 - tau0 x0^2 / 2 - tau1 x0 x1, -beta1 x1 + tau1 x0 x1]``.
    Observations are ``log X_t + N(0, obs_cov)``.
    """

    beta0: float = 0.3125
    beta1: float = 0.25
    tau0: float = 1 / 800
    tau1: float = 1 / 400
    gamma: np.ndarray = field(default_factory=_default_gamma)
    obs_cov: np.ndarray = field(default_factory=lambda: np.array([[0.04, 0.02], [0.02, 0.04]]))
    init_mean: np.ndarray = field(default_factory=lambda: np.array([100.0, 100.0]))
    init_cov: np.ndarray = field(default_factory=lambda: np.array([[100.0, 50.0], [50.0, 100.0]]))

    def __post_init__(self):
        for name in ("beta0", "beta1", "tau0", "tau1"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        self.gamma = np.asarray(self.gamma, dtype=float).reshape(2, 2)
        self.obs_cov = np.asarray(self.obs_cov, dtype=float)
        self.init_mean = np.asarray(self.init_mean, dtype=float)
        self.init_cov = np.asarray(self.init_cov, dtype=float)
        np.linalg.cholesky(self.obs_cov)
        np.linalg.cholesky(self.init_cov)

    def drift(self, x):
        x0, x1 = x[:, 0], x[:, 1]
        return np.stack(
            [
                self.beta0 * x0 - 0.5 * self.tau0 * x0 * x0 - self.tau1 * x0 * x1,
                -self.beta1 * x1 + self.tau1 * x0 * x1,
            ],
            axis=1,
        )

    def diffusion(self, x):
        return x[:, :, None] * self.gamma[None, :, :]


class _Floor:
    """Clamp populations at ``floor`` and count how often it bites."""

    def __init__(self, floor):
        self.floor = floor
        self.count = 0

    def __call__(self, x):
        low = x < self.floor
        n = int(low.sum())
        if n:
            self.count += n
            x = np.where(low, self.floor, x)
        return x


@dataclass
class LVComponents:
    sample_transition: callable
    sample_coupled_transition: callable
    log_potential: callable
    floor: _Floor


def lv_euler_components(model, n_steps=10, floor=1e-6, coupler="mlr"):
    """Euler transition over unit time, its coupled version and the log-scale observation potential."""
    guard = _Floor(floor)
    chol = np.linalg.cholesky(model.obs_cov)
    linv = np.linalg.inv(chol)
    log_norm = -np.log(2 * np.pi) - np.sum(np.log(np.diag(chol)))

    def sample_transition(x_prev, rng):
        return euler_transition(model.drift, model.diffusion, x_prev, n_steps, rng, post=guard)

    def sample_coupled(xa, xb, rng):
        return coupled_euler_transition(model.drift, model.diffusion, xa, xb, n_steps, coupler, rng, post=guard)

    def log_potential(y, x):
        z = (y - np.log(np.maximum(x, floor))) @ linv.T
        return log_norm - 0.5 * np.sum(z * z, axis=-1)

    return LVComponents(sample_transition, sample_coupled, log_potential, guard)


class LotkaVolterraFK(FeynmanKacModel):
    """Bootstrap Feynman-Kac model for the Lotka-Volterra SDE with observations ``y``.

    The transition density is intractable; only forward and coupled forward
    simulation are available.
    """

    def __init__(self, model, y, n_steps=10, floor=1e-6, coupler="mlr"):
        self.model = model
        self.y = np.asarray(y, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(self.y)):
            raise NumericError("observations contain non-finite values")
        self.T = self.y.shape[0] - 1
        self.dim = 2
        self.comp = lv_euler_components(model, n_steps, floor, coupler)
        self._init_chol = np.linalg.cholesky(model.init_cov)

    @property
    def clamp_count(self):
        return self.comp.floor.count

    def sample_initial(self, n, rng):
        x = self.model.init_mean + rng.standard_normal((n, 2)) @ self._init_chol.T
        return self.comp.floor(x)

    def sample_transition(self, t, x_prev, rng):
        return self.comp.sample_transition(x_prev, rng)

    def log_potential(self, t, x):
        return self.comp.log_potential(self.y[t], x)

    def sample_coupled_transition(self, t, xa, xb, rng):
        res = self.comp.sample_coupled_transition(xa, xb, rng)
        return res.left, res.right, res.met


def simulate_lv(model, T, rng, n_steps=10, floor=1e-6):
    """Simulate states and log-scale observations for ``t = 0..T``. Returns ``(x, y, clamp_count)``."""
    comp = lv_euler_components(model, n_steps, floor)
    chol_obs = np.linalg.cholesky(model.obs_cov)
    x = np.empty((T + 1, 2))
    x[0] = comp.floor(model.init_mean + np.linalg.cholesky(model.init_cov) @ rng.standard_normal(2))[None][0]
    for t in range(1, T + 1):
        x[t] = comp.sample_transition(x[t - 1 : t], rng)[0]
    y = np.log(x) + rng.standard_normal((T + 1, 2)) @ chol_obs.T
    return x, y, comp.floor.count
