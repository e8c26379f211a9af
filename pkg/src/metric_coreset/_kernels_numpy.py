"""Pure-numpy twins of the numba kernels.

Accumulations are kept sequential (``cumsum``, ``bincount``) and the
Euclidean distance is summed one coordinate at a time, so these produce
the same floats as the compiled loops.
"""
import itertools

import numpy as np

_BLOCK_ELEMS = 1 << 22


def _block(X, is_matrix, a, b):
    if is_matrix:
        return X[np.ix_(a, b)]
    s = np.zeros((a.shape[0], b.shape[0]))
    for t in range(X.shape[1]):
        diff = X[a, t][:, None] - X[b, t][None, :]
        s += diff * diff
    return np.sqrt(s)


def _column(X, is_matrix, ids, c):
    if is_matrix:
        return X[ids, c]
    s = np.zeros(ids.shape[0])
    for t in range(X.shape[1]):
        diff = X[ids, t] - X[c, t]
        s += diff * diff
    return np.sqrt(s)


def _rows_per_chunk(ncols):
    return max(1, _BLOCK_ELEMS // max(1, ncols))


def pairwise(X, is_matrix, a, b):
    return _block(X, is_matrix, a, b)


def nearest(X, is_matrix, p, t):
    n = p.shape[0]
    pos = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    step = _rows_per_chunk(t.shape[0])
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        block = _block(X, is_matrix, p[lo:hi], t)
        arg = np.argmin(block, axis=1)
        pos[lo:hi] = arg
        dist[lo:hi] = block[np.arange(hi - lo), arg]
    return pos, dist


def seq_sum(v):
    if v.shape[0] == 0:
        return 0.0
    return float(np.cumsum(v)[-1])


def cover_greedy(X, is_matrix, order, thr):
    n = order.shape[0]
    tau = np.full(n, -1, dtype=np.int64)
    sel = []
    i = 0
    while i < n:
        if tau[i] >= 0:
            i += 1
            continue
        sel.append(i)
        cand = i + np.flatnonzero(tau[i:] < 0)
        d = _column(X, is_matrix, order[cand], order[i])
        tau[cand[d <= thr[cand]]] = i
        i += 1
    return tau, np.asarray(sel, dtype=np.int64)


def best_swap(X, is_matrix, ids, w, centers, z):
    n = ids.shape[0]
    k = centers.shape[0]
    D = _block(X, is_matrix, ids, ids[centers])
    if z == 2:
        D = D * D
    near = np.argmin(D, axis=1)
    first = D[np.arange(n), near]
    second = np.sort(D, axis=1)[:, 1] if k > 1 else np.full(n, np.inf)
    is_center = np.zeros(n, dtype=bool)
    is_center[centers] = True

    best, best_out, best_in = np.inf, -1, -1
    for c in np.flatnonzero(~is_center):
        dc = _column(X, is_matrix, ids, ids[c])
        if z == 2:
            dc = dc * dc
        m1 = np.minimum(dc, first)
        total = seq_sum(w * m1)
        delta = np.bincount(near, weights=w * (np.minimum(dc, second) - m1), minlength=k)
        for j in range(k):
            val = total + delta[j]
            out_id = centers[j]
            if val < best or (val == best and (out_id, c) < (best_out, best_in)):
                best, best_out, best_in = val, int(out_id), int(c)
    return best_out, best_in, best


def best_subset(Dz, w, k):
    n_eval, n_cand = Dz.shape
    if n_eval == 0:
        return np.arange(k), 0.0
    combos = itertools.combinations(range(n_cand), k)
    step = _rows_per_chunk(n_eval * k)
    best = np.inf
    best_idx = np.arange(k)
    while True:
        chunk = np.array(list(itertools.islice(combos, step)), dtype=np.int64)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, k)
        m = Dz[:, chunk].min(axis=2)  # (n_eval, n_chunk)
        costs = np.cumsum(w[:, None] * m, axis=0)[-1]
        j = int(np.argmin(costs))
        if costs[j] < best:
            best = float(costs[j])
            best_idx = chunk[j].copy()
    return best_idx, best
