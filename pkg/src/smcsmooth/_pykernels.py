"""Pure-Python/numpy versions of the hot loops in ``_ckernels.pyx``.

Same signatures, same outputs. Used when the extension is not built or when
``SMCSMOOTH_BACKEND=python``.
"""

import numpy as np


def alias_setup(probs):
    """Vose alias tables for ``probs`` (assumed to sum to one)."""
    n = probs.shape[0]
    scaled = probs * n
    prob = np.empty(n, dtype=np.float64)
    alias = np.empty(n, dtype=np.int64)
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if not scaled[i] < 1.0]
    scaled = scaled.tolist()
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] + scaled[s]) - 1.0
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    for l in large:
        prob[l] = 1.0
        alias[l] = l
    for s in small:
        prob[s] = 1.0
        alias[s] = s
    return prob, alias


def hilbert_keys(coords, bits):
    """Hilbert indices of integer grid points, packed big-endian into uint64 words.

    Skilling's transpose algorithm, vectorised over points.
    """
    coords = np.asarray(coords, dtype=np.uint64)
    n, d = coords.shape
    X = coords.copy()
    one = np.uint64(1)
    M = one << np.uint64(bits - 1)
    Q = M
    while Q > one:
        P = Q - one
        for i in range(d):
            hit = (X[:, i] & Q) != 0
            X[hit, 0] ^= P
            miss = ~hit
            t = (X[miss, 0] ^ X[miss, i]) & P
            X[miss, 0] ^= t
            X[miss, i] ^= t
        Q >>= one
    for i in range(1, d):
        X[:, i] ^= X[:, i - 1]
    t = np.zeros(n, dtype=np.uint64)
    Q = M
    while Q > one:
        hit = (X[:, d - 1] & Q) != 0
        t[hit] ^= Q - one
        Q >>= one
    X ^= t[:, None]

    total = d * bits
    nwords = (total + 63) // 64
    pos = nwords * 64 - total
    keys = np.zeros((n, nwords), dtype=np.uint64)
    for j in range(bits - 1, -1, -1):
        for i in range(d):
            bit = (X[:, i] >> np.uint64(j)) & one
            keys[:, pos // 64] |= bit << np.uint64(63 - pos % 64)
            pos += 1
    return keys


def adjacent_traverse(counts, tie_u):
    """Walk the Hilbert-ordered offspring counts, hopping to the heavier neighbour.

    Returns the sequence of visited positions (length ``counts.sum()``).
    """
    f = [int(c) for c in counts]
    n = len(f)
    nxt = [-1] * n
    prv = [-1] * n
    first = last = -1
    for i in range(n):
        if f[i] > 0:
            if first < 0:
                first = i
            else:
                nxt[last] = i
                prv[i] = last
            last = i
    total = sum(c for c in f if c > 0)
    out = np.empty(total, dtype=np.int64)
    i = first
    for k in range(total):
        out[k] = i
        f[i] -= 1
        a = nxt[i]
        b = prv[i]
        if f[i] == 0:
            if b >= 0:
                nxt[b] = a
            if a >= 0:
                prv[a] = b
        if a >= 0 and b >= 0:
            if f[a] > f[b]:
                i = a
            elif f[b] > f[a]:
                i = b
            elif tie_u[k] < 0.5:
                i = a
            else:
                i = b
        elif a >= 0:
            i = a
        elif b >= 0:
            i = b
    return out


def gaussian_first_accept(prev_mean, linv, log_norm, log_bound, x_new, cand, logu):
    """First accepted trial per row for a Gaussian transition density.

    Row ``r`` proposes ``cand[r, j]`` for ``j = 0, 1, ...`` and accepts when
    ``logu[r, j] <= log m - log_bound``. Returns the accepted column (-1 if
    none) and the largest ``log m - log_bound`` among the evaluated trials.
    """
    diff = x_new[:, None, :] - prev_mean[cand]
    z = np.einsum("kl,rjl->rjk", linv, diff)
    excess = log_norm - 0.5 * np.einsum("rjk,rjk->rj", z, z) - log_bound
    acc = logu <= excess
    any_acc = acc.any(axis=1)
    pos = np.where(any_acc, acc.argmax(axis=1), -1).astype(np.int64)
    b = cand.shape[1]
    used = np.where(any_acc, pos + 1, b)
    mask = np.arange(b)[None, :] < used[:, None]
    max_excess = float(excess[mask].max()) if mask.any() else -np.inf
    return pos, max_excess
