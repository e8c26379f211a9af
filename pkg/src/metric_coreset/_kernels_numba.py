"""Loop kernels compiled with numba.

Every kernel takes the metric as ``(X, is_matrix)``: ``X`` is either the
coordinate table (rows are points) or the full distance matrix. Sums run
sequentially in index order so results match the numpy twins bit for bit.
"""
import math

import numpy as np

from ._accel import njit

_OPTS = dict(cache=True, nogil=True)


@njit(inline="always")
def _dist(X, is_matrix, a, b):
    if is_matrix:
        return X[a, b]
    s = 0.0
    for t in range(X.shape[1]):
        diff = X[a, t] - X[b, t]
        s += diff * diff
    return math.sqrt(s)


@njit(**_OPTS)
def pairwise(X, is_matrix, a, b):
    out = np.empty((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            out[i, j] = _dist(X, is_matrix, a[i], b[j])
    return out


@njit(**_OPTS)
def nearest(X, is_matrix, p, t):
    n = p.shape[0]
    pos = np.empty(n, dtype=np.int64)
    dist = np.empty(n)
    for i in range(n):
        best = np.inf
        arg = -1
        for j in range(t.shape[0]):
            d = _dist(X, is_matrix, p[i], t[j])
            if d < best:
                best = d
                arg = j
        pos[i] = arg
        dist[i] = best
    return pos, dist


@njit(**_OPTS)
def seq_sum(v):
    s = 0.0
    for i in range(v.shape[0]):
        s += v[i]
    return s


@njit(**_OPTS)
def cover_greedy(X, is_matrix, order, thr):
    n = order.shape[0]
    tau = np.full(n, -1, dtype=np.int64)
    sel = np.empty(n, dtype=np.int64)
    n_sel = 0
    for i in range(n):
        if tau[i] >= 0:
            continue
        p = order[i]
        sel[n_sel] = i
        n_sel += 1
        # every position before i is already removed
        for j in range(i, n):
            if tau[j] < 0 and _dist(X, is_matrix, p, order[j]) <= thr[j]:
                tau[j] = i
    return tau, sel[:n_sel]


@njit(**_OPTS)
def _column_into(X, is_matrix, ids, c, z, out):
    n = ids.shape[0]
    if is_matrix:
        for x in range(n):
            out[x] = X[ids[x], ids[c]]
    else:
        dim = X.shape[1]
        for x in range(n):
            s = 0.0
            for t in range(dim):
                diff = X[x, t] - X[c, t]
                s += diff * diff
            out[x] = math.sqrt(s)
    if z == 2:
        for x in range(n):
            out[x] = out[x] * out[x]


@njit(**_OPTS)
def best_swap(X, is_matrix, ids, w, centers, z):
    n = ids.shape[0]
    k = centers.shape[0]
    # gathered coordinates keep the candidate loop contiguous
    Y = X if is_matrix else X[ids]
    first = np.full(n, np.inf)
    second = np.full(n, np.inf)
    near = np.zeros(n, dtype=np.int64)
    is_center = np.zeros(n, dtype=np.bool_)
    col = np.empty(n)
    for j in range(k):
        is_center[centers[j]] = True
        _column_into(Y, is_matrix, ids, centers[j], z, col)
        for x in range(n):
            d = col[x]
            if d < first[x]:
                second[x] = first[x]
                first[x] = d
                near[x] = j
            elif d < second[x]:
                second[x] = d
    best = np.inf
    best_out = -1
    best_in = -1
    delta = np.empty(k)
    for c in range(n):
        if is_center[c]:
            continue
        _column_into(Y, is_matrix, ids, c, z, col)
        total = 0.0
        for j in range(k):
            delta[j] = 0.0
        for x in range(n):
            m1 = min(col[x], first[x])
            total += w[x] * m1
            delta[near[x]] += w[x] * (min(col[x], second[x]) - m1)
        for j in range(k):
            val = total + delta[j]
            out_id = centers[j]
            if val < best or (val == best and (out_id < best_out or (out_id == best_out and c < best_in))):
                best = val
                best_out = out_id
                best_in = c
    return best_out, best_in, best


@njit(**_OPTS)
def best_subset(Dz, w, k):
    n_eval, n_cand = Dz.shape
    idx = np.arange(k)
    best = np.inf
    best_idx = idx.copy()
    while True:
        cost = 0.0
        for x in range(n_eval):
            m = np.inf
            for j in range(k):
                v = Dz[x, idx[j]]
                if v < m:
                    m = v
            cost += w[x] * m
        if cost < best:
            best = cost
            best_idx[:] = idx
        # advance to the next combination in lexicographic order
        i = k - 1
        while i >= 0 and idx[i] == n_cand - k + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, k):
            idx[j] = idx[j - 1] + 1
    return best_idx, best
