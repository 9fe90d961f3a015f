"""The compiled and pure-Python kernels must agree exactly."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from smcsmooth import _backend
from smcsmooth._backend import available_backends, python_kernels

compiled = _backend.compiled_kernels
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def test_backend_selected():
    assert _backend.BACKEND in available_backends()


@needs_ext
@given(hnp.arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 10)))
def test_alias_setup_agrees(w):
    if w.sum() == 0:
        w = w + 1.0
    p = w / w.sum()
    a = compiled.alias_setup(p)
    b = python_kernels.alias_setup(p)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


@needs_ext
@given(st.integers(2, 8), st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_hilbert_keys_agree(d, bits, seed):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 2**bits, size=(40, d)).astype(np.uint64)
    np.testing.assert_array_equal(compiled.hilbert_keys(g, bits), python_kernels.hilbert_keys(g, bits))


@needs_ext
@given(hnp.arrays(np.int64, st.integers(1, 40), elements=st.integers(0, 4)), st.integers(0, 2**32 - 1))
def test_adjacent_traverse_agrees(counts, seed):
    u = np.random.default_rng(seed).random(max(int(counts.sum()), 1))
    np.testing.assert_array_equal(compiled.adjacent_traverse(counts, u), python_kernels.adjacent_traverse(counts, u))


@needs_ext
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_gaussian_first_accept_agrees(d, seed):
    rng = np.random.default_rng(seed)
    n, m, b = 30, 12, 7
    prev_mean = rng.standard_normal((n, d))
    L = np.tril(rng.standard_normal((d, d))) + 3 * np.eye(d)
    linv = np.ascontiguousarray(np.tril(np.linalg.inv(L)))
    x_new = rng.standard_normal((m, d))
    cand = rng.integers(0, n, size=(m, b)).astype(np.int64)
    logu = np.log(rng.random((m, b)))
    pa, ea = compiled.gaussian_first_accept(prev_mean, linv, -1.0, -1.0, x_new, cand, logu)
    pb, eb = python_kernels.gaussian_first_accept(prev_mean, linv, -1.0, -1.0, x_new, cand, logu)
    np.testing.assert_array_equal(pa, pb)
    assert ea == pytest.approx(eb, abs=1e-12)


@pytest.mark.parametrize("kern", list(available_backends().values()), ids=list(available_backends()))
@pytest.mark.parametrize("d", [2, 3, 4])
def test_hilbert_curve_visits_neighbours(kern, d):
    bits = 3 if d < 4 else 2
    pts = np.array(list(itertools.product(range(2**bits), repeat=d)), dtype=np.uint64)
    keys = kern.hilbert_keys(pts, bits)
    order = np.lexsort([keys[:, w] for w in range(keys.shape[1] - 1, -1, -1)])
    steps = np.abs(np.diff(pts[order].astype(np.int64), axis=0)).sum(axis=1)
    assert np.all(steps == 1)
    # keys are a bijection onto 0..2^(d*bits)-1
    assert len({tuple(k) for k in keys.tolist()}) == len(pts)


@pytest.mark.parametrize("kern", list(available_backends().values()), ids=list(available_backends()))
def test_alias_tables_reproduce_probabilities(kern):
    p = np.array([0.1, 0.0, 0.5, 0.15, 0.25])
    prob, alias = kern.alias_setup(p)
    n = len(p)
    implied = np.zeros(n)
    for i in range(n):
        implied[i] += prob[i] / n
        implied[alias[i]] += (1 - prob[i]) / n
    np.testing.assert_allclose(implied, p, atol=1e-15)
