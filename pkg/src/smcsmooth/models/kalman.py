"""Exact filtering and smoothing for linear-Gaussian models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError


@dataclass
class KalmanResult:
    """Moments of the predictive, filtering and smoothing distributions for ``t = 0..T``."""

    pred_mean: np.ndarray
    pred_cov: np.ndarray
    filt_mean: np.ndarray
    filt_cov: np.ndarray
    smth_mean: np.ndarray
    smth_cov: np.ndarray
    loglik: float

    def additive_first_coordinate(self):
        """Exact ``E[sum_{s<=t} X_s(0) | Y_{0:T}]`` for every ``t``."""
        return np.cumsum(self.smth_mean[:, 0])


def kalman_filter_smoother(model, y):
    """Kalman filter followed by the Rauch-Tung-Striebel backward pass.

    Parameters
    ----------
    model : LinearGaussianModel
    y : array_like, shape (T+1, dim_y)

    Returns
    -------
    KalmanResult
    """
    y = np.asarray(y, dtype=float).reshape(-1, model.dim_y)
    n, dx = y.shape[0], model.dim_x
    F, C, H, R = model.F_X, model.C_X, model.F_Y, model.C_Y
    mp = np.empty((n, dx))
    Pp = np.empty((n, dx, dx))
    mf = np.empty((n, dx))
    Pf = np.empty((n, dx, dx))
    loglik = 0.0
    eye = np.eye(dx)
    for t in range(n):
        if t == 0:
            mp[0], Pp[0] = model.mu0, model.Sigma0
        else:
            mp[t] = F @ mf[t - 1]
            Pp[t] = F @ Pf[t - 1] @ F.T + C
        S = H @ Pp[t] @ H.T + R
        try:
            Sc = np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            raise NumericError(f"singular innovation covariance at t={t}") from None
        K = np.linalg.solve(S, H @ Pp[t]).T
        innov = y[t] - H @ mp[t]
        mf[t] = mp[t] + K @ innov
        IKH = eye - K @ H
        Pf[t] = IKH @ Pp[t] @ IKH.T + K @ R @ K.T
        z = np.linalg.solve(Sc, innov)
        loglik += -0.5 * (z @ z) - np.sum(np.log(np.diag(Sc))) - 0.5 * len(z) * np.log(2 * np.pi)
    ms = mf.copy()
    Ps = Pf.copy()
    for t in range(n - 2, -1, -1):
        G = np.linalg.solve(Pp[t + 1], F @ Pf[t]).T
        ms[t] = mf[t] + G @ (ms[t + 1] - mp[t + 1])
        Ps[t] = Pf[t] + G @ (Ps[t + 1] - Pp[t + 1]) @ G.T
        Ps[t] = 0.5 * (Ps[t] + Ps[t].T)
    return KalmanResult(mp, Pp, mf, Pf, ms, Ps, float(loglik))


def ffbs_contraction_k0(model, y, t=1):
    """Smallest eigenvalue of ``I + C_X^{1/2}(Sigma_smth^{-1} - Sigma_pred^{-1})C_X^{1/2}`` at time ``t``.

    Moments of order above this value of the pure-rejection trial count at
    time ``t`` are infinite, so it measures how heavy the rejection tails are.
    """
    res = kalman_filter_smoother(model, y)
    w, V = np.linalg.eigh(model.C_X)
    half = V @ np.diag(np.sqrt(w)) @ V.T
    D = np.linalg.inv(res.smth_cov[t]) - np.linalg.inv(res.pred_cov[t])
    return float(np.linalg.eigvalsh(np.eye(model.dim_x) + half @ D @ half).min())
