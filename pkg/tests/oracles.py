"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package: distances come from ``math.dist`` or a
plain nested list, and loops follow the textbook definitions literally.
"""
import itertools
import math


def dist_fn(coords=None, matrix=None):
    if matrix is not None:
        return lambda a, b: float(matrix[a][b])
    pts = [tuple(map(float, row)) if hasattr(row, "__len__") else (float(row),) for row in coords]
    return lambda a, b: math.dist(pts[a], pts[b])


def naive_cover(d, P, T, R, eps, beta, priority=None):
    """Literal greedy loop: pick the first remaining point, remove its ball.

    ``priority`` lists P in pick order; the default is ascending id.
    """
    remaining = list(priority) if priority is not None else sorted(set(P))
    tau = {}
    order = []
    dT = {q: min(d(q, t) for t in T) for q in remaining}
    while remaining:
        p = remaining[0]
        order.append(p)
        keep = []
        for q in remaining:
            if d(p, q) <= eps / (2 * beta) * max(R, dT[q]):
                tau[q] = p
            else:
                keep.append(q)
        remaining = keep
    weights = {}
    for q, c in tau.items():
        weights[c] = weights.get(c, 0) + 1
    return tau, weights, order


def naive_cost(d, weighted, centers, z):
    return sum(w * min(d(x, c) for c in centers) ** z for x, w in weighted)


def naive_opt(d, weighted, k, z, candidates=None):
    """Exhaustive optimum; ties go to the lexicographically smallest tuple."""
    ids = sorted(x for x, _ in weighted) if candidates is None else sorted(candidates)
    best, best_set = math.inf, None
    for S in itertools.combinations(ids, min(k, len(ids))):
        c = naive_cost(d, weighted, S, z)
        if c < best:
            best, best_set = c, S
    return best_set, best
