import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_skeleton
from oracles import chi2_gof, ffbs_matrix_oracle, ffbs_row_mp, imh_matrix_oracle
from smcsmooth.backward import (
    CostCounter,
    ffbs_kernel,
    ffbs_matrix,
    ffbs_row,
    gt_kernel,
    imh_backward_sample,
    imh_transition_matrix,
    imhp_kernel,
    itr_forward_step,
    itrc_forward_step,
    paris_kernel,
    rejection_backward,
    sample_ffbs_direct,
    sample_ffbs_hybrid,
    sample_ffbs_pure_rejection,
)
from smcsmooth.backward.ffbs import draw_ffbs
from smcsmooth.errors import BoundViolationError, DegenerateKernelError, UnsupportedOperationError
from smcsmooth.fk import FeynmanKacModel, bootstrap_step, initial_cloud, make_cloud
from smcsmooth.models import LinearGaussianFK, scalar_model


class TableModel(FeynmanKacModel):
    """Scalar model whose transition density depends only on ``x_prev`` through ``mfun``."""

    T, dim = 1, 1

    def __init__(self, mfun, log_bound):
        self.mfun = mfun
        self.log_bound = log_bound

    def sample_initial(self, n, rng):
        return rng.random((n, 1))

    def sample_transition(self, t, x, rng):
        return x.copy()

    def log_potential(self, t, x):
        return np.zeros(x.shape[0])

    def log_transition_density(self, t, x_prev, x_new):
        x_prev, x_new = np.broadcast_arrays(x_prev, x_new)
        with np.errstate(divide="ignore"):
            return np.log(self.mfun(x_prev[..., 0], x_new[..., 0]))

    def log_density_bound(self, t):
        return self.log_bound


def _cloud(states, w, t=0, anc=None):
    return make_cloud(t, np.asarray(states, float).reshape(-1, 1), np.log(np.asarray(w, float)), ancestors=anc)


def _cloud_t(x, anc, t=1):
    return make_cloud(t, np.asarray(x, float).reshape(-1, 1), np.zeros(len(x)), ancestors=np.asarray(anc))


class TestFFBSRow:
    def test_two_point_arithmetic(self):
        m = TableModel(lambda xp, x: np.where(xp < 0.5, 1.0, 3.0), np.log(3.0))
        row = ffbs_row(_cloud([0.0, 1.0], [0.5, 0.5]), [0.0], m)
        np.testing.assert_allclose(row, [0.25, 0.75], atol=1e-15)

    def test_constant_density_returns_weights(self, rng):
        m = TableModel(lambda xp, x: np.full(xp.shape, 2.0), np.log(2.0))
        w = rng.random(6)
        w /= w.sum()
        np.testing.assert_allclose(ffbs_row(_cloud(rng.random(6), w), [0.3], m), w, atol=1e-15)

    def test_matches_extended_precision(self, rng):
        fk, clouds = make_skeleton(rng, N=4)
        prev, cur = clouds
        F, C = 0.5, 1.0
        for i in range(4):
            row = ffbs_row(prev, cur.states[i], fk)
            ref = ffbs_row_mp(prev.weights, prev.states[:, 0], cur.states[i, 0], F, C)
            np.testing.assert_allclose(row, ref, rtol=0, atol=1e-14)

    def test_matrix_matches_loop_oracle(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=7)
        B = ffbs_matrix(prev, cur.states, fk)
        ref = ffbs_matrix_oracle(prev.weights, prev.states[:, 0], cur.states[:, 0], 0.5, 1.0)
        np.testing.assert_allclose(B, ref, atol=1e-13)

    def test_cost_is_N_per_row(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=6)
        c = CostCounter()
        ffbs_row(prev, cur.states[0], fk, c)
        assert c.evaluations == 6
        ffbs_kernel(prev, cur, fk, c)
        assert c.evaluations == 6 + 36

    def test_zero_denominator(self):
        m = TableModel(lambda xp, x: np.zeros(xp.shape), 0.0)
        with pytest.raises(DegenerateKernelError):
            ffbs_row(_cloud([0.1, 0.2], [0.5, 0.5]), [0.0], m)

    def test_rows_are_probability_vectors(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=9)
        B = ffbs_kernel(prev, cur, fk).to_dense()
        assert np.all(B >= 0)
        np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-12)


class TestDirectSampling:
    def test_point_mass_row(self, rng):
        assert sample_ffbs_direct(np.array([1.0, 0.0, 0.0]), rng) == 0

    def test_binomial_frequency(self, rng):
        from smcsmooth.backward.ffbs import sample_rows

        rows = np.tile([0.25, 0.75], (1_000_000, 1))
        freq = sample_rows(rows, rng).mean()
        assert abs(freq - 0.75) < 0.002

    def test_gof_against_row(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=10)
        row = ffbs_row(prev, cur.states[0], fk)
        draws = draw_ffbs(prev, np.repeat(cur.states[:1], 100_000, axis=0), fk, rng, method="direct")
        assert chi2_gof(np.bincount(draws, minlength=10), row) > 1e-3


class TestRejection:
    def test_density_at_bound_takes_one_trial(self, rng):
        m = TableModel(lambda xp, x: np.full(xp.shape, 2.0), np.log(2.0))
        prev = _cloud(rng.random(5), np.full(5, 0.2))
        c = CostCounter()
        idx, trials, fb = rejection_backward(prev, np.zeros((500, 1)), m, rng, c)
        assert np.all(trials == 1) and not fb.any()
        assert c.evaluations == 500
        assert c.trial_histogram() == {1: 500}

    def test_geometric_mean_two(self, rng):
        # half of the particles have m = Mbar, half m = 0: acceptance rate 1/2
        m = TableModel(lambda xp, x: np.where(xp < 0.5, 1.0, 0.0), 0.0)
        prev = _cloud([0.25, 0.75, 0.25, 0.75], np.full(4, 0.25))
        _, trials, _ = rejection_backward(prev, np.zeros((100_000, 1)), m, rng)
        assert trials.mean() == pytest.approx(2.0, abs=0.05)

    def test_mixed_acceptance_rate(self, rng):
        m = TableModel(lambda xp, x: xp, 0.0)
        prev = _cloud([0.25, 0.75], [0.5, 0.5])
        _, trials, _ = rejection_backward(prev, np.zeros((100_000, 1)), m, rng)
        assert trials.mean() == pytest.approx(2.0, abs=0.05)

    def test_cost_equals_trials(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=10)
        c = CostCounter()
        _, trials, _ = rejection_backward(prev, cur.states, fk, rng, c)
        assert c.evaluations == trials.sum()
        assert c.draws == 10

    def test_bound_violation(self, rng):
        m = TableModel(lambda xp, x: np.full(xp.shape, 3.0), np.log(2.0))
        with pytest.raises(BoundViolationError):
            rejection_backward(_cloud([0.1, 0.2], [0.5, 0.5]), np.zeros((3, 1)), m, rng)

    def test_bound_required(self, rng):
        m = TableModel(lambda xp, x: np.ones(xp.shape), None)
        with pytest.raises(UnsupportedOperationError):
            sample_ffbs_pure_rejection(_cloud([0.1, 0.2], [0.5, 0.5]), np.zeros((1, 1)), m, rng=rng)

    def test_hybrid_k_zero_is_direct(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=10)
        c = CostCounter()
        idx, trials, fb = rejection_backward(prev, cur.states, fk, rng, c, max_trials=0)
        assert np.all(trials == 0) and fb.all()
        assert c.evaluations == 100 and c.fallbacks == 10

    def test_hybrid_at_bound_never_falls_back(self, rng):
        m = TableModel(lambda xp, x: np.full(xp.shape, 2.0), np.log(2.0))
        c = CostCounter()
        for _ in range(50):
            sample_ffbs_hybrid(_cloud(rng.random(5), np.full(5, 0.2)), np.zeros((1, 1)), m, counter=c, rng=rng)
        assert c.fallbacks == 0 and c.evaluations == 50

    def test_hybrid_cost_min_tau_K_plus_N(self, rng):
        m = TableModel(lambda xp, x: np.where(xp < 0.5, 1.0, 1e-300), 0.0)
        w = np.array([1e-6, 1 - 1e-6 - 3e-6, 1e-6, 1e-6, 1e-6])
        prev = _cloud([0.25, 0.75, 0.75, 0.75, 0.75], w)
        c = CostCounter()
        idx, trials, fb = rejection_backward(prev, np.zeros((20, 1)), m, rng, c, max_trials=5)
        assert np.all(trials[fb] == 5)
        assert c.evaluations == trials.sum() + 5 * fb.sum()
        assert np.all(idx == 0)

    @pytest.mark.parametrize("method", ["pure", "hybrid"])
    def test_law_matches_direct(self, rng, method):
        fk, (prev, cur) = make_skeleton(rng, N=10)
        row = ffbs_row(prev, cur.states[3], fk)
        x = np.repeat(cur.states[3:4], 100_000, axis=0)
        draws = draw_ffbs(prev, x, fk, rng, method=method, K=10)
        assert chi2_gof(np.bincount(draws, minlength=10), row) > 1e-3

    def test_hybrid_small_K_law(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=10)
        row = ffbs_row(prev, cur.states[0], fk)
        draws = draw_ffbs(prev, np.repeat(cur.states[:1], 100_000, axis=0), fk, rng, method="hybrid", K=1)
        assert chi2_gof(np.bincount(draws, minlength=10), row) > 1e-3

    def test_single_draw_wrappers(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=4)
        assert 0 <= sample_ffbs_pure_rejection(prev, cur.states[0], fk, rng=rng) < 4
        assert 0 <= sample_ffbs_hybrid(prev, cur.states[0], fk, rng=rng) < 4


class TestGT:
    def test_rows(self):
        cur = _cloud_t([0.0, 0.0, 0.0], [2, 0, 1])
        B = gt_kernel(cur).to_dense()
        np.testing.assert_array_equal(B, np.eye(3)[[2, 0, 1]])

    def test_no_cost_and_composition(self, rng):
        fk = LinearGaussianFK(scalar_model(1.0), np.zeros(6))
        clouds = [initial_cloud(fk, 8, rng)]
        for _ in range(5):
            clouds.append(bootstrap_step(fk, clouds[-1], rng))
        kernels = [None] + [gt_kernel(c) for c in clouds[1:]]
        idx = np.arange(8)
        for t in range(5, 0, -1):
            nxt = kernels[t].sample(idx, rng)
            np.testing.assert_array_equal(nxt, clouds[t].ancestors[idx])
            idx = nxt

    def test_requires_ancestors(self, rng):
        with pytest.raises(ValueError):
            gt_kernel(_cloud([0.0], [1.0]))


class TestPaRIS:
    def test_n_tilde_one_point_masses(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=5)
        K = paris_kernel(prev, cur, fk, n_tilde=1, rng=rng)
        assert all(K.support_size(i) == 1 for i in range(5))

    def test_support_bound(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=5)
        K = paris_kernel(prev, cur, fk, n_tilde=3, rng=rng)
        assert all(K.support_size(i) <= 3 for i in range(5))
        np.testing.assert_allclose(K.to_dense().sum(axis=1), 1.0)

    def test_two_draws_differ(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=5)
        diff = 0
        for _ in range(2000):
            K = paris_kernel(prev, cur, fk, n_tilde=2, rng=rng)
            diff += np.mean(K.indices[:, 0] != K.indices[:, 1])
        assert diff / 2000 > 0.05

    @pytest.mark.parametrize("method", ["direct", "pure"])
    def test_unbiased_small(self, rng, method):
        fk, (prev, cur) = make_skeleton(rng, N=5)
        B = ffbs_kernel(prev, cur, fk).to_dense()
        R = 20_000
        acc = np.zeros((5, 5))
        for _ in range(R):
            acc += paris_kernel(prev, cur, fk, n_tilde=2, method=method, rng=rng).to_dense()
        mean = acc / R
        se = np.sqrt(B * (1 - B) / (2 * R)) + 1e-12
        assert np.all(np.abs(mean - B) <= 4.5 * se)


class TestIMH:
    def test_zero_steps(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=6)
        assert imh_backward_sample(prev, cur.states[0], 4, fk, 0, rng=rng) == 4

    def test_constant_density_always_accepts(self, rng):
        m = TableModel(lambda xp, x: np.ones(xp.shape), 0.0)
        w = np.array([0.1, 0.2, 0.3, 0.4])
        prev = _cloud([0.1, 0.2, 0.3, 0.4], w)
        out = [imh_backward_sample(prev, [0.0], 0, m, 1, rng=rng) for _ in range(20_000)]
        assert chi2_gof(np.bincount(out, minlength=4), w) > 1e-3

    def test_transition_matrix_matches_oracle(self, rng):
        w = rng.random(6)
        w /= w.sum()
        mv = rng.random(6) + 0.1
        np.testing.assert_allclose(imh_transition_matrix(w, mv), imh_matrix_oracle(w, mv), atol=1e-15)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=20)
    def test_invariance(self, seed):
        rng = np.random.default_rng(seed)
        fk, (prev, cur) = make_skeleton(rng, N=6)
        x = cur.states[0]
        pi = ffbs_row(prev, x, fk)
        mv = np.exp(fk.log_transition_density(1, prev.states, x[None, :]))
        P = imh_matrix_oracle(prev.weights, mv)
        assert np.abs(pi @ P - pi).max() < 1e-12

    def test_long_chain_converges(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=6)
        x = np.repeat(cur.states[:1], 100_000, axis=0)
        from smcsmooth.backward.kernels import imh_chain

        path = imh_chain(prev, x, np.zeros(100_000, dtype=np.int64), fk, 50, rng)
        row = ffbs_row(prev, cur.states[0], fk)
        assert chi2_gof(np.bincount(path[:, -1], minlength=6), row) > 1e-3

    def test_imhp_costs_one_per_particle(self, rng):
        fk, (prev, cur) = make_skeleton(rng, N=6)
        c = CostCounter()
        K = imhp_kernel(prev, cur, fk, n_tilde=2, counter=c, rng=rng)
        assert c.evaluations == 6
        np.testing.assert_array_equal(K.indices[:, 0], cur.ancestors)

    def test_imhp_stuck_chain(self, rng):
        # target mass concentrates on index 0; started there, proposals to others are rejected
        m = TableModel(lambda xp, x: np.where(xp < 0.15, 1.0, 1e-300), 0.0)
        prev = _cloud([0.1, 0.2, 0.3], [1 / 3] * 3)
        cur = _cloud_t([0.0, 0.0], [0, 0])
        K = imhp_kernel(prev, cur, m, n_tilde=2, rng=rng)
        np.testing.assert_array_equal(K.to_dense(), [[1, 0, 0], [1, 0, 0]])

    def test_imhp_constant_density(self, rng):
        m = TableModel(lambda xp, x: np.ones(xp.shape), 0.0)
        prev = _cloud([0.1, 0.2, 0.3], [0.2, 0.3, 0.5])
        cur = _cloud_t([0.0] * 30_000, [0] * 30_000)
        K = imhp_kernel(prev, cur, m, n_tilde=2, rng=rng)
        assert np.all(K.indices[:, 0] == 0)
        assert chi2_gof(np.bincount(K.indices[:, 1], minlength=3), [0.2, 0.3, 0.5]) > 1e-3


class _Coupled(FeynmanKacModel):
    T, dim = 1, 1

    def __init__(self, meet):
        self.meet = meet

    def sample_initial(self, n, rng):
        return rng.standard_normal((n, 1))

    def sample_transition(self, t, x, rng):
        return x + 1.0

    def log_potential(self, t, x):
        return np.zeros(x.shape[0])

    def sample_coupled_transition(self, t, xa, xb, rng):
        n = xa.shape[0]
        if self.meet:
            return xa + 1.0, xa + 1.0, np.ones(n, bool)
        return xa + 1.0, xb + 1.0, np.zeros(n, bool)


class TestIntractable:
    def test_itrc_two_particles_meet(self, rng):
        prev = _cloud([0.0, 5.0], [0.5, 0.5])
        cloud, K = itrc_forward_step(_Coupled(True), prev, rng)
        a = cloud.ancestors
        assert sorted(a.tolist()) == [0, 1]
        np.testing.assert_allclose(K.to_dense(), [[0.5, 0.5], [0.5, 0.5]])

    def test_itrc_two_particles_miss(self, rng):
        prev = _cloud([0.0, 5.0], [0.5, 0.5])
        cloud, K = itrc_forward_step(_Coupled(False), prev, rng)
        np.testing.assert_array_equal(K.to_dense(), np.eye(2)[cloud.ancestors])

    def test_itrc_odd(self, rng):
        with pytest.raises(ValueError):
            itrc_forward_step(_Coupled(True), _cloud([0.0, 1.0, 2.0], [1 / 3] * 3), rng)

    def test_itr_never_meets_is_gt(self, rng):
        prev = _cloud(rng.random(6), np.full(6, 1 / 6))
        cloud, K = itr_forward_step(_Coupled(False), prev, rng)
        assert all(K.support_size(i) == 1 for i in range(6))
        np.testing.assert_array_equal(K.to_dense(), np.eye(6)[cloud.ancestors])

    def test_itr_always_meets(self, rng):
        prev = _cloud(np.arange(6.0), np.full(6, 1 / 6))
        distinct = lambda c, r: (np.arange(6), (np.arange(6) + 1) % 6)  # noqa: E731
        cloud, K = itr_forward_step(_Coupled(True), prev, rng, ancestor_coupler=distinct)
        D = K.to_dense()
        assert np.all((D == 0.5).sum(axis=1) == 2)

    def test_requires_coupler(self, rng):
        class NoCouple(_Coupled):
            sample_coupled_transition = FeynmanKacModel.sample_coupled_transition

        with pytest.raises(UnsupportedOperationError):
            itr_forward_step(NoCouple(True), _cloud([0.0, 1.0], [0.5, 0.5]), rng)

    def test_itr_filter_law_matches_bootstrap(self):
        fk = LinearGaussianFK(scalar_model(1.0), np.array([0.0, 0.8]), coupler="maximal")
        a, b = [], []
        for s in range(200):
            r = np.random.default_rng(s)
            c0 = initial_cloud(fk, 50, r)
            c1, _ = itr_forward_step(fk, c0, r)
            a.append(c1.weights @ c1.states[:, 0])
            c1b = bootstrap_step(fk, c0, r, resampling="multinomial")
            b.append(c1b.weights @ c1b.states[:, 0])
        a, b = np.array(a), np.array(b)
        se = np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
        assert abs(a.mean() - b.mean()) < 4 * se

    def test_itr_support_condition(self, rng):
        fk = LinearGaussianFK(scalar_model(1.0), np.array([0.0, 0.8]), coupler="maximal")
        c0 = initial_cloud(fk, 100, rng)
        diff = []
        for _ in range(50):
            _, K = itr_forward_step(fk, c0, rng)
            s = np.stack([K.sample(np.arange(100), rng) for _ in range(2)])
            diff.append(np.mean(s[0] != s[1]))
        assert np.mean(diff) > 0.05
