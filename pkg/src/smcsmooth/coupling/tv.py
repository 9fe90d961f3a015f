"""Total-variation oracles used to bound coupling rates."""

import numpy as np
from scipy import integrate, stats


def overlap_1d(pdf_a, pdf_b, lo=-np.inf, hi=np.inf, points=None):
    """``int min(f_a, f_b)`` by adaptive quadrature, i.e. ``1 - TV``."""
    val, _ = integrate.quad(lambda x: min(pdf_a(x), pdf_b(x)), lo, hi, points=points, limit=200, epsabs=1e-12)
    return float(val)


def gaussian_overlap_1d(mu_a, sd_a, mu_b, sd_b):
    fa = stats.norm(mu_a, sd_a).pdf
    fb = stats.norm(mu_b, sd_b).pdf
    lo = min(mu_a - 12 * sd_a, mu_b - 12 * sd_b)
    hi = max(mu_a + 12 * sd_a, mu_b + 12 * sd_b)
    return overlap_1d(fa, fb, lo, hi, points=[mu_a, mu_b, 0.5 * (mu_a + mu_b)])


def gaussian_overlap_mc(mu_a, cov_a, mu_b, cov_b, n, rng):
    """Monte Carlo estimate of ``int min(f_a, f_b)`` for two Gaussians in any dimension.

    Averages ``E_a[min(1, f_b/f_a)]`` and ``E_b[min(1, f_a/f_b)]``, which
    share the same target. Returns ``(estimate, standard_error)``.
    """
    A = stats.multivariate_normal(mu_a, cov_a)
    B = stats.multivariate_normal(mu_b, cov_b)
    xa = A.rvs(n, random_state=rng).reshape(n, -1)
    xb = B.rvs(n, random_state=rng).reshape(n, -1)
    ra = np.minimum(1.0, np.exp(B.logpdf(xa) - A.logpdf(xa)))
    rb = np.minimum(1.0, np.exp(A.logpdf(xb) - B.logpdf(xb)))
    vals = 0.5 * (ra + rb)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(n))
