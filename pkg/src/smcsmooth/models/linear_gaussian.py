"""Linear-Gaussian state-space models and their Feynman-Kac representation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coupling.gaussian import COUPLERS
from ..errors import NumericError
from ..fk.model import FeynmanKacModel, GaussianTransition


def _mat(a, name):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _check_cov(c, name):
    if c.shape[0] != c.shape[1] or not np.allclose(c, c.T, atol=1e-12):
        raise ValueError(f"{name} must be a symmetric square matrix")
    try:
        np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} is not positive definite") from None


@dataclass
class LinearGaussianModel:
    """``X_t = F_X X_{t-1} + N(0, C_X)``, ``Y_t = F_Y X_t + N(0, C_Y)``, ``X_0 ~ N(mu0, Sigma0)``."""

    F_X: np.ndarray
    C_X: np.ndarray
    F_Y: np.ndarray
    C_Y: np.ndarray
    mu0: np.ndarray
    Sigma0: np.ndarray

    def __post_init__(self):
        self.F_X = _mat(self.F_X, "F_X")
        self.C_X = _mat(self.C_X, "C_X")
        self.F_Y = _mat(self.F_Y, "F_Y")
        self.C_Y = _mat(self.C_Y, "C_Y")
        self.Sigma0 = _mat(self.Sigma0, "Sigma0")
        self.mu0 = np.atleast_1d(np.asarray(self.mu0, dtype=float))
        dx, dy = self.dim_x, self.dim_y
        if self.F_X.shape != (dx, dx) or self.C_X.shape != (dx, dx) or self.Sigma0.shape != (dx, dx):
            raise ValueError("state-space matrices have inconsistent shapes")
        if self.F_Y.shape != (dy, dx) or self.C_Y.shape != (dy, dy):
            raise ValueError("observation matrices have inconsistent shapes")
        for c, name in ((self.C_X, "C_X"), (self.C_Y, "C_Y"), (self.Sigma0, "Sigma0")):
            _check_cov(c, name)

    @property
    def dim_x(self):
        return self.mu0.shape[0]

    @property
    def dim_y(self):
        return self.F_Y.shape[0]

    def simulate(self, T, rng):
        """Draw ``(x, y)`` with shapes ``(T+1, dim_x)`` and ``(T+1, dim_y)``."""
        x = np.empty((T + 1, self.dim_x))
        y = np.empty((T + 1, self.dim_y))
        lx = np.linalg.cholesky(self.C_X)
        ly = np.linalg.cholesky(self.C_Y)
        x[0] = self.mu0 + np.linalg.cholesky(self.Sigma0) @ rng.standard_normal(self.dim_x)
        for t in range(T + 1):
            if t > 0:
                x[t] = self.F_X @ x[t - 1] + lx @ rng.standard_normal(self.dim_x)
            y[t] = self.F_Y @ x[t] + ly @ rng.standard_normal(self.dim_y)
        return x, y


def guarniero_model(alpha=0.4, sigma_y2=0.5, dim=2):
    """Linear-Gaussian benchmark with ``F_X[i, j] = alpha ** (1 + |i - j|)``.

    ``F_Y = I``, ``C_Y = sigma_y2 I``, ``C_X = I`` and ``X_0 ~ N(0, I)``.
    """
    idx = np.arange(dim)
    F = alpha ** (1.0 + np.abs(idx[:, None] - idx[None, :]))
    eye = np.eye(dim)
    return LinearGaussianModel(F, eye, eye, sigma_y2 * eye, np.zeros(dim), eye)


def scalar_model(sigma_y, rho=0.5, sigma_x=1.0):
    """Stationary scalar AR(1) observed in noise: ``X_0 ~ N(0, sigma_x^2 / (1 - rho^2))``."""
    var0 = sigma_x**2 / (1.0 - rho**2)
    return LinearGaussianModel([[rho]], [[sigma_x**2]], [[1.0]], [[sigma_y**2]], [0.0], [[var0]])


@dataclass(frozen=True)
class LGComponents:
    """Feynman-Kac ingredients of a linear-Gaussian model for bootstrap and guided filters."""

    transition: GaussianTransition
    log_bound: float
    # locally optimal proposal q(x' | x) = N(A x + K y, P) with A = P C_X^{-1} F_X
    opt_cov: np.ndarray
    opt_gain: np.ndarray
    opt_A: np.ndarray


def lg_components(model):
    tr = GaussianTransition(model.F_X, np.zeros(model.dim_x), model.C_X)
    cx_inv = np.linalg.inv(model.C_X)
    cy_inv = np.linalg.inv(model.C_Y)
    P = np.linalg.inv(cx_inv + model.F_Y.T @ cy_inv @ model.F_Y)
    P = 0.5 * (P + P.T)
    return LGComponents(
        transition=tr,
        log_bound=tr.log_norm,
        opt_cov=P,
        opt_gain=P @ model.F_Y.T @ cy_inv,
        opt_A=P @ cx_inv @ model.F_X,
    )


def _gauss_logpdf(z, linv, log_norm):
    u = z @ linv.T
    return log_norm - 0.5 * np.sum(u * u, axis=-1)


class LinearGaussianFK(FeynmanKacModel):
    """Bootstrap/guided Feynman-Kac model for a :class:`LinearGaussianModel` and data ``y``.

    The guided proposal is the locally optimal one, ``p(x_t | x_{t-1}, y_t)``.
    ``coupler`` names the Gaussian coupling used by the coupled transition.
    """

    def __init__(self, model, y, coupler="mlr"):
        self.model = model
        self.coupler = COUPLERS[coupler] if isinstance(coupler, str) else coupler
        self.y = np.asarray(y, dtype=float).reshape(-1, model.dim_y)
        if not np.all(np.isfinite(self.y)):
            raise NumericError("observations contain non-finite values")
        self.T = self.y.shape[0] - 1
        self.dim = model.dim_x
        self.comp = lg_components(model)
        self._tr = self.comp.transition
        self._obs = GaussianTransition(model.F_Y, np.zeros(model.dim_y), model.C_Y)
        self._init = GaussianTransition(np.zeros((self.dim, 1)), model.mu0, model.Sigma0)
        self._opt_chol = np.linalg.cholesky(self.comp.opt_cov)
        self._opt_linv = np.linalg.inv(self._opt_chol)
        self._opt_log_norm = -0.5 * self.dim * np.log(2 * np.pi) - np.sum(np.log(np.diag(self._opt_chol)))
        # initial optimal proposal p(x_0 | y_0)
        S0inv = np.linalg.inv(model.Sigma0)
        cy_inv = np.linalg.inv(model.C_Y)
        P0 = np.linalg.inv(S0inv + model.F_Y.T @ cy_inv @ model.F_Y)
        P0 = 0.5 * (P0 + P0.T)
        self._q0_mean = P0 @ (S0inv @ model.mu0 + model.F_Y.T @ cy_inv @ self.y[0])
        self._q0 = GaussianTransition(np.zeros((self.dim, 1)), self._q0_mean, P0)

    def sample_initial(self, n, rng):
        z = rng.standard_normal((n, self.dim))
        return self.model.mu0 + z @ self._init.chol.T

    def sample_transition(self, t, x_prev, rng):
        z = rng.standard_normal(x_prev.shape)
        return x_prev @ self.model.F_X.T + z @ self._tr.chol.T

    def log_potential(self, t, x):
        z = self.y[t] - x @ self.model.F_Y.T
        return _gauss_logpdf(z, self._obs.linv, self._obs.log_norm)

    def log_transition_density(self, t, x_prev, x_new):
        return self._tr.logpdf(x_prev, x_new)

    def log_density_bound(self, t):
        return self.comp.log_bound

    def gaussian_transition(self, t):
        return self._tr

    def sample_coupled_transition(self, t, xa, xb, rng):
        res = self.coupler(xa @ self.model.F_X.T, xb @ self.model.F_X.T, self._tr.chol, self._tr.chol, rng)
        return np.atleast_2d(res[0]), np.atleast_2d(res[1]), np.atleast_1d(res[2])

    def _opt_mean(self, t, x_prev):
        return x_prev @ self.comp.opt_A.T + self.comp.opt_gain @ self.y[t]

    def sample_proposal(self, t, x_prev, rng):
        z = rng.standard_normal(x_prev.shape)
        return self._opt_mean(t, x_prev) + z @ self._opt_chol.T

    def log_proposal_density(self, t, x_prev, x_new):
        return _gauss_logpdf(x_new - self._opt_mean(t, x_prev), self._opt_linv, self._opt_log_norm)

    def sample_initial_proposal(self, n, rng):
        return self._q0_mean + rng.standard_normal((n, self.dim)) @ self._q0.chol.T

    def log_initial_proposal_density(self, x):
        return _gauss_logpdf(x - self._q0_mean, self._q0.linv, self._q0.log_norm)

    def log_initial_density(self, x):
        return _gauss_logpdf(x - self.model.mu0, self._init.linv, self._init.log_norm)
