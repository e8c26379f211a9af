"""Executable checkers for the coreset definitions and bounds.

Every checker returns a :class:`PropertyReport`; a failing report always
carries a witness (a point id or a center tuple). Inequalities are tested with
the relative slack :data:`~metric_coreset.metric.REL_SLACK`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import comb
from typing import Any

import numpy as np

from .cover import AssignmentMap, CoverParams, CoverResult
from .errors import InvalidArgument, ResourceLimit
from .metric import MetricSpace, Objective, WeightedPointSet, cost, leq
from .solvers import SUBSET_CAP, best_centers, brute_force_opt


@dataclass
class PropertyReport:
    name: str
    passed: bool
    worst_ratio: float
    bound: float | None = None
    witness: Any = None
    detail: str = ""

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError(f"failing report {self.name!r} needs a witness")

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        ratio = self.worst_ratio if math.isfinite(self.worst_ratio) else str(self.worst_ratio)
        return {"name": self.name, "passed": self.passed, "worst_ratio": ratio,
                "bound": self.bound, "witness": self.witness, "detail": self.detail}


@dataclass(frozen=True)
class CoresetBounds:
    bounded: float
    approximate: float
    centroid: float
    ratio_alpha1: float


def coreset_bounds(objective, eps: float) -> CoresetBounds:
    """Proven constants for the two-round output at precision ``eps``.

    ``ratio_alpha1`` is the end-to-end cost ratio when the final solver is exact.
    """
    if Objective.parse(objective) is Objective.MEDIAN:
        return CoresetBounds(2 * eps, 2 * eps, 7 * eps, (1 + 7 * eps) * (1 + 2 * eps) + 2 * eps)
    e2 = eps * eps
    return CoresetBounds(4 * e2, 4 * e2 + 4 * eps, 27 * eps,
                         (1 + 8 * eps + 8 * e2) * (1 + 4 * eps + 4 * e2) * (1 + 27 * eps))


def one_round_ratio(alpha: float, eps: float) -> float:
    """k-median cost ratio after solving on the one-round coreset."""
    return 2 * alpha * (1 + 2 * eps) + 2 * eps


def _ratio(num: float, den: float) -> float:
    if den > 0:
        return num / den
    return 0.0 if num <= 0 else math.inf


def check_cover(space: MetricSpace, P, T, params: CoverParams, result: CoverResult) -> PropertyReport:
    """Coverage radius, weight conservation, self-mapping and the anti-chain order."""
    P = np.unique(space.check_ids(P))
    tau = result.assignment
    if not tau.covers(P):
        raise InvalidArgument("assignment map is not total over P")
    if result.coreset.total_weight != P.shape[0]:
        return PropertyReport("cover", False, math.inf, witness=int(result.coreset.ids[0]),
                              detail="weights do not sum to |P|")
    if result.coreset != tau.weights():
        bad = weight_mismatch(result.coreset, tau)
        return PropertyReport("cover", False, math.inf, witness=bad, detail="weights disagree with map")
    for c in result.coreset.ids.tolist():
        if tau[c] != c:
            return PropertyReport("cover", False, math.inf, witness=c, detail="coreset point not self-mapped")
    _, d_T = space.dist_to_set(tau.points, T)
    allowed = params.scale * np.maximum(params.R, d_T)
    d_tau = space.paired(tau.points, tau.images)
    over = d_tau > allowed + 1e-9 * np.maximum(d_tau, allowed)
    worst = float(np.max(np.where(allowed > 0, d_tau / np.where(allowed > 0, allowed, 1), 0.0),
                         initial=0.0))
    if over.any():
        return PropertyReport("cover", False, worst, 1.0, witness=int(tau.points[np.argmax(over)]),
                              detail="point farther from its proxy than the ball radius")
    # replay: each selected point must have escaped every earlier ball
    order = np.asarray(result.selection_order, dtype=np.int64)
    if order.size > 1:
        _, d_sel_T = space.dist_to_set(order, T)
        radius = params.scale * np.maximum(params.R, d_sel_T)
        for lo in range(0, order.size, 512):
            hi = min(order.size, lo + 512)
            D = space.distances(order[:hi], order[lo:hi])
            earlier = np.arange(hi)[:, None] < np.arange(lo, hi)[None, :]
            inside = earlier & (D <= radius[None, lo:hi])
            if inside.any():
                j = lo + int(np.argmax(inside.any(axis=0)))
                return PropertyReport("cover", False, worst, 1.0, witness=int(order[j]),
                                      detail="selected point lies inside an earlier ball")
    return PropertyReport("cover", True, worst, 1.0)


def weight_mismatch(coreset: WeightedPointSet, mapping: AssignmentMap) -> int:
    expected = mapping.weights()
    ids = np.union1d(coreset.ids, expected.ids)
    for x in ids.tolist():
        if coreset.weight_of(x) != expected.weight_of(x):
            return int(x)
    raise AssertionError("no mismatch found")


def proxy_cost(space: MetricSpace, mapping: AssignmentMap, objective) -> float:
    """Sum over input points of ``d(x, map(x))`` (squared for k-means)."""
    d = space.paired(mapping.points, mapping.images)
    if Objective.parse(objective) is Objective.MEANS:
        d = d * d
    return float(np.cumsum(d)[-1]) if d.size else 0.0


def check_bounded(space: MetricSpace, P, coreset: WeightedPointSet, mapping: AssignmentMap,
                  eps_bound: float, opt_cost: float, objective) -> PropertyReport:
    """Proxy map total over P, weights count preimages, proxy cost <= eps_bound * opt."""
    P = np.unique(space.check_ids(P))
    if not mapping.covers(P):
        raise InvalidArgument("assignment map is not total over P")
    lhs = proxy_cost(space, mapping, objective)
    ratio = _ratio(lhs, opt_cost)
    if coreset != mapping.weights():
        return PropertyReport("bounded", False, ratio, eps_bound,
                              witness=weight_mismatch(coreset, mapping),
                              detail="coreset weights disagree with the map")
    if not leq(lhs, eps_bound * opt_cost):
        d = space.paired(mapping.points, mapping.images)
        return PropertyReport("bounded", False, ratio, eps_bound,
                              witness=int(mapping.points[np.argmax(d)]),
                              detail=f"proxy cost {lhs} > {eps_bound} * {opt_cost}")
    return PropertyReport("bounded", True, ratio, eps_bound)


def _subset_stream(P: np.ndarray, k: int, mode, cap: int):
    total = comb(P.shape[0], k)
    if mode == "exhaustive":
        if total > cap:
            raise ResourceLimit(f"C({P.shape[0]}, {k}) = {total} subsets exceeds cap {cap}")
        return (np.array(s, dtype=np.int64) for s in itertools.combinations(P.tolist(), k))
    kind, n_samples, seed = mode
    if kind != "sampled":
        raise InvalidArgument(f"unknown mode {mode!r}")
    if n_samples >= total:
        return _subset_stream(P, k, "exhaustive", max(cap, total))
    rng = np.random.default_rng(seed)
    return (np.sort(rng.choice(P, size=k, replace=False)) for _ in range(n_samples))


def check_approximate(space: MetricSpace, P, coreset: WeightedPointSet, eps_bound: float, k: int,
                      objective, mode="exhaustive", cap: int = SUBSET_CAP) -> PropertyReport:
    """``|cost_P(S) - cost_C(S)| <= eps_bound * cost_P(S)`` for k-subsets S of P.

    ``mode`` is ``"exhaustive"`` or ``("sampled", n, seed)``; a sample at least as
    large as the number of subsets enumerates them all.
    """
    objective = Objective.parse(objective)
    P = np.unique(space.check_ids(P))
    P_w = WeightedPointSet.unit(P)
    k = min(k, P.shape[0])
    worst, witness, ok = 0.0, None, True
    for S in _subset_stream(P, k, mode, cap):
        full = cost(space, P_w, S, objective)
        approx = cost(space, coreset, S, objective)
        gap = abs(full - approx)
        worst = max(worst, _ratio(gap, full))
        if ok and not leq(gap, eps_bound * full):
            ok, witness = False, S.tolist()
    return PropertyReport("approximate", ok, worst, eps_bound, witness=witness)


def check_centroid(space: MetricSpace, P, candidate_set, k: int, eps_bound: float, opt_cost: float,
                   objective, cap: int = SUBSET_CAP) -> PropertyReport:
    """Some X within the candidates, ``|X| <= k``, costs at most ``(1 + eps_bound) * opt``."""
    P_w = WeightedPointSet.unit(np.unique(space.check_ids(P)))
    best = best_centers(space, P_w, candidate_set, k, objective, cap)
    ratio = _ratio(best.cost, opt_cost) - 1.0 if opt_cost > 0 else (0.0 if best.cost <= 0 else math.inf)
    ok = leq(best.cost, (1.0 + eps_bound) * opt_cost)
    return PropertyReport("centroid", ok, ratio, eps_bound,
                          witness=None if ok else best.centers.tolist(),
                          detail=f"best subset cost {best.cost}, opt {opt_cost}")


@dataclass(frozen=True)
class SizeBoundParams:
    T_size: int
    beta: float
    eps: float
    D: float
    c: float

    def __post_init__(self):
        for name in ("T_size", "beta", "eps", "D", "c"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")


def size_bound(params: SizeBoundParams) -> float:
    """``|T| (16 beta / eps)^D (log2 max(c, 1) + 2)``."""
    return (params.T_size * (16.0 * params.beta / params.eps) ** params.D
            * (math.log2(max(params.c, 1.0)) + 2.0))


def measure_c(space: MetricSpace, P, T, R: float) -> float:
    """Smallest c with ``c * R >= d(q, T)`` for every q in P (at least 1)."""
    _, d = space.dist_to_set(P, T)
    far = float(d.max(initial=0.0))
    if far <= R:
        return 1.0
    return math.inf if R == 0 else far / R


def check_size_bound(observed: int, params: SizeBoundParams) -> PropertyReport:
    bound = size_bound(params)
    ok = observed <= bound
    return PropertyReport("size-bound", ok, observed / bound, bound, witness=None if ok else observed)


def check_opt_restriction(space: MetricSpace, P, subset_w: WeightedPointSet, k: int, objective,
                          cap: int = SUBSET_CAP) -> PropertyReport:
    """``cost_C(opt(C, k)) <= f * cost_C(opt(P, k))`` with f = 2 (median) or 4 (means)."""
    objective = Objective.parse(objective)
    P = np.unique(space.check_ids(P))
    if not np.all(np.isin(subset_w.ids, P)):
        raise InvalidArgument("subset must be drawn from P")
    factor = 2.0 if objective is Objective.MEDIAN else 4.0
    opt_full = brute_force_opt(space, WeightedPointSet.unit(P), k, objective, cap)
    opt_sub = best_centers(space, subset_w, subset_w.ids, k, objective, cap)
    lhs = opt_sub.cost
    rhs = cost(space, subset_w, opt_full.centers, objective)
    ok = leq(lhs, factor * rhs)
    return PropertyReport("opt-restriction", ok, _ratio(lhs, rhs), factor,
                          witness=None if ok else opt_sub.centers.tolist())


def check_squared_triangle(space: MetricSpace, triples, cs=(0.1, 1.0, 10.0)) -> PropertyReport:
    """``d(x,y)^2 <= (1 + 1/c) d(x,z)^2 + (1 + c) d(z,y)^2`` on the given triples."""
    triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    x, y, z = triples.T
    dxy = space.paired(x, y) ** 2
    dxz = space.paired(x, z) ** 2
    dzy = space.paired(z, y) ** 2
    worst = 0.0
    for c in cs:
        rhs = (1 + 1 / c) * dxz + (1 + c) * dzy
        bad = dxy > rhs + 1e-9
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(rhs > 0, dxy / rhs, 0.0)
        worst = max(worst, float(r.max(initial=0.0)))
        if bad.any():
            i = int(np.argmax(bad))
            return PropertyReport("squared-triangle", False, worst, 1.0,
                                  witness=[*triples[i].tolist(), c])
    return PropertyReport("squared-triangle", True, worst, 1.0)
