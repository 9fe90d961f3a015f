"""Couplings of two Gaussian distributions and a generic rejection maximal coupler.

Batched functions take ``mu`` of shape ``(n, d)`` and ``sigma`` of shape
``(n, d, d)``; the covariance of each distribution is ``sigma @ sigma.T``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import NumericError


class CoupledPair(NamedTuple):
    """Two coupled draws. ``met`` implies ``left`` and ``right`` are bitwise equal."""

    left: np.ndarray
    right: np.ndarray
    met: np.ndarray | bool
    trials: int = 1


def _batch(mu_a, mu_b, sig_a, sig_b):
    mu_a = np.asarray(mu_a, dtype=float)
    mu_b = np.asarray(mu_b, dtype=float)
    single = mu_a.ndim == 1
    mu_a = np.atleast_2d(mu_a)
    mu_b = np.atleast_2d(mu_b)
    n, d = mu_a.shape
    sig_a = np.broadcast_to(np.asarray(sig_a, dtype=float).reshape(-1, d, d), (n, d, d))
    sig_b = np.broadcast_to(np.asarray(sig_b, dtype=float).reshape(-1, d, d), (n, d, d))
    return single, mu_a, mu_b, sig_a, sig_b


def _unbatch(single, xa, xb, met):
    if single:
        return CoupledPair(xa[0], xb[0], bool(met[0]))
    return CoupledPair(xa, xb, met)


def _solve(sig, v):
    try:
        return np.linalg.solve(sig, v[..., None])[..., 0]
    except np.linalg.LinAlgError:
        raise NumericError("singular diffusion matrix in Gaussian coupling") from None


def gaussian_logpdf(x, mu, sig):
    """``log N(x | mu, sig sig^T)`` row-wise."""
    z = _solve(sig, x - mu)
    _, logdet = np.linalg.slogdet(sig)
    d = x.shape[-1]
    return -0.5 * d * np.log(2 * np.pi) - logdet - 0.5 * np.sum(z * z, axis=-1)


def _lr(mu_a, mu_b, sig_a, sig_b, rng):
    u = _solve(sig_b, mu_a - mu_b)
    norm = np.linalg.norm(u, axis=1)
    # equal means: the reflection direction is undefined, use common noise
    safe = norm > 0
    u[safe] /= norm[safe, None]
    u[~safe] = 0.0
    wa = rng.standard_normal(mu_a.shape)
    wb = wa - 2.0 * u * np.sum(u * wa, axis=1, keepdims=True)
    xa = mu_a + np.einsum("nij,nj->ni", sig_a, wa)
    xb = mu_b + np.einsum("nij,nj->ni", sig_b, wb)
    return xa, xb


def lindvall_rogers_gaussian(mu_a, mu_b, sigma_a, sigma_b, rng):
    """Reflection coupling: ``W_B = (I - 2 u u^T) W_A`` with ``u`` along ``sigma_b^{-1}(mu_a - mu_b)``."""
    single, mu_a, mu_b, sig_a, sig_b = _batch(mu_a, mu_b, sigma_a, sigma_b)
    xa, xb = _lr(mu_a, mu_b, sig_a, sig_b, rng)
    return _unbatch(single, xa, xb, np.all(xa == xb, axis=1))


def mlr_gaussian_coupler(mu_a, mu_b, sigma_a, sigma_b, rng):
    """Modified reflection coupling with a shared replacement draw in the overlap region.

    Each pair uses exactly two Gaussian vectors and two uniforms, whatever
    the inputs, so the cost is deterministic.
    """
    single, mu_a, mu_b, sig_a, sig_b = _batch(mu_a, mu_b, sigma_a, sigma_b)
    n = mu_a.shape[0]
    xa, xb = _lr(mu_a, mu_b, sig_a, sig_b, rng)
    log_u = np.log(rng.random(n))
    y = mu_a + np.einsum("nij,nj->ni", sig_a, rng.standard_normal(mu_a.shape))
    log_v = np.log(rng.random(n))

    la_xa = gaussian_logpdf(xa, mu_a, sig_a)
    lb_xa = gaussian_logpdf(xa, mu_b, sig_b)
    lb_xb = gaussian_logpdf(xb, mu_b, sig_b)
    la_xb = gaussian_logpdf(xb, mu_a, sig_a)
    la_y = gaussian_logpdf(y, mu_a, sig_a)
    lb_y = gaussian_logpdf(y, mu_b, sig_b)

    overlap = log_v + la_y <= lb_y
    rep_a = overlap & (log_u + la_xa <= lb_xa)
    rep_b = overlap & (log_u + lb_xb <= la_xb)
    xa[rep_a] = y[rep_a]
    xb[rep_b] = y[rep_b]
    return _unbatch(single, xa, xb, np.all(xa == xb, axis=1))


def common_noise_coupler(mu_a, mu_b, sigma_a, sigma_b, rng):
    """Synchronous coupling with the same standard normal driving both sides."""
    single, mu_a, mu_b, sig_a, sig_b = _batch(mu_a, mu_b, sigma_a, sigma_b)
    w = rng.standard_normal(mu_a.shape)
    xa = mu_a + np.einsum("nij,nj->ni", sig_a, w)
    xb = mu_b + np.einsum("nij,nj->ni", sig_b, w)
    return _unbatch(single, xa, xb, np.all(xa == xb, axis=1))


def maximal_gaussian_coupler(mu_a, mu_b, sigma_a, sigma_b, rng, max_rounds=10_000):
    """Batched rejection maximal coupling of Gaussian pairs.

    Same law as :func:`rejection_maximal_coupling` row by row; rows still
    rejecting are redrawn together until every row has finished.
    """
    single, mu_a, mu_b, sig_a, sig_b = _batch(mu_a, mu_b, sigma_a, sigma_b)
    xa = mu_a + np.einsum("nij,nj->ni", sig_a, rng.standard_normal(mu_a.shape))
    met = np.log(rng.random(mu_a.shape[0])) + gaussian_logpdf(xa, mu_a, sig_a) <= gaussian_logpdf(xa, mu_b, sig_b)
    xb = xa.copy()
    pending = np.flatnonzero(~met)
    for _ in range(max_rounds):
        if pending.size == 0:
            break
        ma, mb, sa, sb = mu_a[pending], mu_b[pending], sig_a[pending], sig_b[pending]
        cand = mb + np.einsum("nij,nj->ni", sb, rng.standard_normal(mb.shape))
        ok = np.log(rng.random(pending.size)) + gaussian_logpdf(cand, mb, sb) > gaussian_logpdf(cand, ma, sa)
        xb[pending[ok]] = cand[ok]
        pending = pending[~ok]
    else:
        raise RuntimeError(f"maximal coupling did not finish within {max_rounds} rounds")
    return _unbatch(single, xa, xb, met)


COUPLERS = {
    "lr": lindvall_rogers_gaussian,
    "mlr": mlr_gaussian_coupler,
    "maximal": maximal_gaussian_coupler,
    "common": common_noise_coupler,
}


def rejection_maximal_coupling(logpdf_a, sample_a, logpdf_b, sample_b, rng, max_trials=None):
    """Maximal coupling by rejection.

    Parameters
    ----------
    logpdf_a, logpdf_b : callable
        Log densities of the two targets.
    sample_a, sample_b : callable
        ``sample(rng)`` returns one exact draw.
    max_trials : int, optional
        Safety cap on the rejection loop for the second draw.

    Returns
    -------
    CoupledPair
        ``trials`` counts draws from ``f_b`` in the rejection loop (0 if the
        first draw was accepted for both sides).
    """
    xa = sample_a(rng)
    if np.log(rng.random()) + logpdf_a(xa) <= logpdf_b(xa):
        return CoupledPair(xa, xa, True, 0)
    trials = 0
    while True:
        trials += 1
        xb = sample_b(rng)
        if np.log(rng.random()) + logpdf_b(xb) > logpdf_a(xb):
            return CoupledPair(xa, xb, False, trials)
        if max_trials is not None and trials >= max_trials:
            raise RuntimeError(f"maximal coupling exceeded {max_trials} trials")
