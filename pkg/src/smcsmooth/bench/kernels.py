"""Timing comparison of the compiled and pure-Python kernel backends."""

from __future__ import annotations

import timeit

import numpy as np

from .._backend import available_backends


def _cases(n, rng):
    w = rng.random(n)
    w /= w.sum()
    coords = rng.integers(0, 2**16, size=(n, 2)).astype(np.uint64)
    counts = rng.multinomial(n, w).astype(np.int64)
    tie_u = rng.random(n)
    d = 2
    prev_mean = rng.standard_normal((n, d))
    linv = np.ascontiguousarray(np.linalg.inv(np.linalg.cholesky(np.eye(d))))
    log_norm = -np.log(2 * np.pi)
    x_new = rng.standard_normal((n, d))
    cand = rng.integers(0, n, size=(n, 8)).astype(np.int64)
    logu = np.log(rng.random((n, 8)))
    return {
        "alias_setup": lambda k: k.alias_setup(w),
        "hilbert_keys": lambda k: k.hilbert_keys(coords, 16),
        "adjacent_traverse": lambda k: k.adjacent_traverse(counts, tie_u),
        "gaussian_first_accept": lambda k: k.gaussian_first_accept(prev_mean, linv, log_norm, log_norm, x_new, cand, logu),
    }


def benchmark_backends(n=10_000, repeat=5, seed=0):
    """Best-of-``repeat`` seconds per call for each kernel and backend."""
    rng = np.random.default_rng(seed)
    cases = _cases(n, rng)
    out = {}
    for name, fn in cases.items():
        row = {}
        for backend, mod in available_backends().items():
            number = 1
            row[backend] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=repeat)) / number
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        out[name] = row
    return out


def format_benchmark(res):
    lines = [f"{'kernel':<24}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}"]
    for name, row in res.items():
        cy = row.get("cython", float("nan"))
        sp = row.get("speedup", float("nan"))
        lines.append(f"{name:<24}{row['python']:>12.2e}{cy:>12.2e}{sp:>10.1f}")
    return "\n".join(lines)
