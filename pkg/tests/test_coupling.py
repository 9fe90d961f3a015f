import numpy as np
import pytest
from scipy import stats

from smcsmooth.coupling import (
    COUPLERS,
    common_noise_coupler,
    coupled_euler_transition,
    gaussian_overlap_1d,
    gaussian_overlap_mc,
    lindvall_rogers_gaussian,
    maximal_gaussian_coupler,
    meeting_times,
    mlr_gaussian_coupler,
    overlap_1d,
    rejection_maximal_coupling,
)
from smcsmooth.errors import NumericError
from smcsmooth.models import LotkaVolterraSDE

N_DRAWS = 100_000
LV = LotkaVolterraSDE()
DELTA = 0.1


def _lv_pair(n):
    xa = np.tile([100.0, 100.0], (n, 1))
    xb = np.tile([101.0, 99.5], (n, 1))
    mu_a = xa + DELTA * LV.drift(xa)
    mu_b = xb + DELTA * LV.drift(xb)
    return mu_a, mu_b, np.sqrt(DELTA) * LV.diffusion(xa), np.sqrt(DELTA) * LV.diffusion(xb)


def _whiten(x, mu, sig):
    return np.linalg.solve(sig, (x - mu)[..., None])[..., 0]


def _exact_overlap_equal_cov(mu_a, mu_b, sig):
    """For ``N(mu_a, S)`` vs ``N(mu_b, S)``, ``int min = 2 Phi(-D/2)`` with ``D`` the Mahalanobis distance."""
    D = np.linalg.norm(np.linalg.solve(sig, mu_a - mu_b))
    return 2 * stats.norm.cdf(-D / 2)


@pytest.mark.parametrize("name", sorted(COUPLERS))
def test_marginals_exact_lv_covariance(name, rng):
    mu_a, mu_b, sa, sb = _lv_pair(N_DRAWS)
    pair = COUPLERS[name](mu_a, mu_b, sa, sb, rng)
    for x, mu, sig in ((pair.left, mu_a, sa), (pair.right, mu_b, sb)):
        z = _whiten(x, mu, sig)
        for k in range(2):
            assert stats.kstest(z[:, k], "norm").pvalue > 1e-3


@pytest.mark.parametrize("name", sorted(COUPLERS))
def test_marginals_exact_1d(name, rng):
    mu_a = np.zeros((N_DRAWS, 1))
    mu_b = np.full((N_DRAWS, 1), 1.5)
    pair = COUPLERS[name](mu_a, mu_b, np.eye(1), 2 * np.eye(1), rng)
    assert stats.kstest(pair.left[:, 0], "norm").pvalue > 1e-3
    assert stats.kstest(pair.right[:, 0], stats.norm(1.5, 2).cdf).pvalue > 1e-3


@pytest.mark.parametrize("name", sorted(COUPLERS))
def test_coupling_inequality(name, rng):
    mu_a = np.zeros((N_DRAWS, 2))
    mu_b = np.tile([0.8, -0.4], (N_DRAWS, 1))
    sig = np.array([[1.0, 0.0], [0.5, 0.8]])
    pair = COUPLERS[name](mu_a, mu_b, sig, sig, rng)
    bound = _exact_overlap_equal_cov(mu_a[0], mu_b[0], sig)
    f = pair.met.mean()
    assert f <= bound + 4 * np.sqrt(max(f * (1 - f), 1e-12) / N_DRAWS)


def test_met_means_bitwise_equal(rng):
    mu_a, mu_b, sa, sb = _lv_pair(20_000)
    for c in COUPLERS.values():
        p = c(mu_a, mu_b, sa, sb, rng)
        np.testing.assert_array_equal(p.met, np.all(p.left == p.right, axis=1))


class TestLindvallRogers:
    def test_equal_means_share_noise(self, rng):
        p = lindvall_rogers_gaussian(np.zeros(2), np.zeros(2), np.eye(2), np.eye(2), rng)
        np.testing.assert_array_equal(p.left, p.right)

    def test_one_dimensional_reflection(self, rng):
        mu_a = rng.standard_normal((1000, 1))
        mu_b = mu_a + 2.0
        p = lindvall_rogers_gaussian(mu_a, mu_b, np.eye(1), np.eye(1), rng)
        np.testing.assert_allclose(p.right - mu_b, -(p.left - mu_a), atol=1e-12)
        assert not p.met.any()

    def test_single_input_returns_single_pair(self, rng):
        p = lindvall_rogers_gaussian(np.zeros(2), np.ones(2), np.eye(2), np.eye(2), rng)
        assert p.left.shape == (2,) and isinstance(p.met, bool)


class TestMLR:
    def test_identical_distributions_meet_often(self, rng):
        mu = np.zeros((N_DRAWS, 2))
        p = mlr_gaussian_coupler(mu, mu, np.eye(2), np.eye(2), rng)
        assert p.met.mean() > 0.4

    def test_far_apart_never_meet(self, rng):
        mu_b = np.tile([20.0, 0.0], (N_DRAWS, 1))
        p = mlr_gaussian_coupler(np.zeros((N_DRAWS, 2)), mu_b, np.eye(2), np.eye(2), rng)
        assert p.met.mean() < 1e-3

    def test_constant_rng_consumption(self):
        # Four uniforms / normals per pair, independent of the outcome
        class Counting:
            def __init__(self, seed):
                self.g = np.random.default_rng(seed)
                self.n = 0

            def standard_normal(self, size):
                self.n += int(np.prod(size))
                return self.g.standard_normal(size)

            def random(self, size=None):
                self.n += int(np.prod(size)) if size is not None else 1
                return self.g.random(size)

        counts = set()
        for gap in (0.0, 0.5, 30.0):
            r = Counting(0)
            mlr_gaussian_coupler(np.zeros((100, 2)), np.full((100, 2), gap), np.eye(2), np.eye(2), r)
            counts.add(r.n)
        assert len(counts) == 1

    def test_rejection_coupler_trials_unbounded(self, rng):
        # nearly identical laws: the rare second stage accepts with probability TV ~ 0.004
        la = stats.norm(0, 1).logpdf
        lb = stats.norm(0.01, 1).logpdf
        trials = [
            rejection_maximal_coupling(la, lambda r: r.normal(0, 1), lb, lambda r: r.normal(0.01, 1), rng).trials
            for _ in range(5_000)
        ]
        assert max(trials) > 100


class TestMaximal:
    def test_meeting_frequency_matches_quadrature(self, rng):
        target = overlap_1d(stats.norm(0, 1).pdf, stats.norm(1.5, 1).pdf, -15, 16.5, points=[0.75])
        assert target == pytest.approx(0.4533, abs=5e-5)
        p = maximal_gaussian_coupler(np.zeros((N_DRAWS, 1)), np.full((N_DRAWS, 1), 1.5), np.eye(1), np.eye(1), rng)
        assert abs(p.met.mean() - target) < 0.005

    def test_generic_rejection_frequency(self, rng):
        la, lb = stats.norm(0, 1).logpdf, stats.norm(1.5, 1).logpdf
        met = [
            rejection_maximal_coupling(la, lambda r: r.normal(0, 1), lb, lambda r: r.normal(1.5, 1), rng).met
            for _ in range(N_DRAWS)
        ]
        assert abs(np.mean(met) - 0.4533) < 0.005

    def test_equal_laws_always_meet(self, rng):
        lp = stats.norm(0, 1).logpdf
        for _ in range(200):
            p = rejection_maximal_coupling(lp, lambda r: r.normal(), lp, lambda r: r.normal(), rng)
            assert p.met and p.left == p.right

    def test_disjoint_uniforms_never_meet(self, rng):
        la = stats.uniform(0, 1).logpdf
        lb = stats.uniform(2, 1).logpdf
        for _ in range(200):
            p = rejection_maximal_coupling(la, lambda r: r.random(), lb, lambda r: 2 + r.random(), rng)
            assert not p.met

    def test_trial_cap(self, rng):
        la = stats.norm(0, 1).logpdf
        lb = stats.norm(3, 1).logpdf
        with pytest.raises(RuntimeError):
            rejection_maximal_coupling(la, lambda r: -3.0, lb, lambda r: -3.0, rng, max_trials=3)


class TestOverlapOracles:
    def test_gaussian_closed_form(self):
        assert gaussian_overlap_1d(0, 1, 1.5, 1) == pytest.approx(2 * stats.norm.cdf(-0.75), abs=1e-10)

    def test_mc_overlap(self, rng):
        sig = np.array([[1.0, 0.0], [0.5, 0.8]])
        cov = sig @ sig.T
        est, se = gaussian_overlap_mc(np.zeros(2), cov, np.array([0.8, -0.4]), cov, 50_000, rng)
        assert abs(est - _exact_overlap_equal_cov(np.zeros(2), np.array([0.8, -0.4]), sig)) < 4 * se


def _bm_drift(x):
    return np.zeros_like(x)


def _bm_diff(x):
    return np.broadcast_to(np.eye(x.shape[1]), (x.shape[0], x.shape[1], x.shape[1]))


class TestEuler:
    def test_equal_starts_stay_equal(self, rng):
        p = coupled_euler_transition(LV.drift, LV.diffusion, [100.0, 90.0], [100.0, 90.0], 10, "common", rng)
        assert p.met
        np.testing.assert_array_equal(p.left, p.right)

    def test_lr_never_meets(self, rng):
        p = coupled_euler_transition(_bm_drift, _bm_diff, np.zeros((2000, 1)), np.full((2000, 1), 1.5), 20, "lr", rng)
        assert not p.met.any()

    def test_marginal_matches_single_chain(self, rng):
        n = 20_000
        p = coupled_euler_transition(_bm_drift, _bm_diff, np.zeros((n, 1)), np.full((n, 1), 1.5), 10, "mlr", rng)
        assert stats.kstest(p.left[:, 0], "norm").pvalue > 1e-3
        assert stats.kstest(p.right[:, 0] - 1.5, "norm").pvalue > 1e-3

    def test_met_pairs_stay_met(self, rng):
        n = 5000
        xa = np.zeros((n, 1))
        xb = np.full((n, 1), 0.3)
        p1 = coupled_euler_transition(_bm_drift, _bm_diff, xa, xb, 10, "mlr", rng)
        p2 = coupled_euler_transition(_bm_drift, _bm_diff, p1.left, p1.right, 10, "mlr", rng)
        assert np.all(p2.met[p1.met])

    def test_non_finite(self, rng):
        bad = lambda x: np.full_like(x, np.inf)  # noqa: E731
        with pytest.raises(NumericError):
            coupled_euler_transition(bad, _bm_diff, np.zeros(1), np.ones(1), 2, "mlr", rng)

    def test_bad_steps(self, rng):
        with pytest.raises(ValueError):
            coupled_euler_transition(_bm_drift, _bm_diff, np.zeros(1), np.ones(1), 0, "mlr", rng)

    def test_meeting_time_law_levy_limit(self, rng):
        # the continuous reflection coupling meets at a Levy(0, 1.5^2/4) time
        times = meeting_times(_bm_drift, _bm_diff, [0.0], [1.5], 0.005, 5.0, "mlr", rng, n_paths=20_000)
        assert np.all(np.isfinite(times) | np.isinf(times))
        levy = stats.levy(0, 1.5**2 / 4)
        frac = np.mean(times <= 5.0)
        assert abs(frac - levy.cdf(5.0)) < 0.05
