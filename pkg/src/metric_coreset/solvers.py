"""Weighted sequential solvers: swap local search, D^z seeding, exhaustive oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import kernels
from .errors import InvalidArgument, ResourceLimit
from .metric import MetricSpace, Objective, WeightedPointSet, cost

SOLVER_KINDS = ("local-search", "bicriteria-seeding", "brute-force")

#: Default cap on the number of k-subsets the exhaustive oracle may enumerate.
SUBSET_CAP = 2_000_000


@dataclass(frozen=True)
class SolverConfig:
    kind: str = "local-search"
    objective: Objective = Objective.MEDIAN
    t: int = 1
    max_iters: int = 1000
    min_relative_gain: float = 1e-6
    seed: int = 0
    beta: float = 16.0
    cap: int = SUBSET_CAP

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if self.kind not in SOLVER_KINDS:
            raise InvalidArgument(f"solver kind must be one of {SOLVER_KINDS}, got {self.kind!r}")
        if self.t < 1 or self.max_iters < 1:
            raise InvalidArgument("t and max_iters must be positive")
        if not self.min_relative_gain > 0:
            raise InvalidArgument("min_relative_gain must be > 0")
        if not self.beta >= 1:
            raise InvalidArgument("beta must be >= 1")

    @property
    def guarantee(self) -> float:
        """Proven cost factor of this solver, used as the coreset beta.

        Local search only ever performs single swaps, so its guarantee is the
        t = 1 value whatever ``t`` says. Bi-criteria seeding has no closed
        form and uses the configured ``beta``.
        """
        if self.kind == "brute-force":
            return 1.0
        if self.kind == "local-search":
            return 5.0 if self.objective is Objective.MEDIAN else 9.0
        return float(self.beta)


@dataclass(frozen=True)
class Solution:
    centers: np.ndarray
    cost: float
    iterations: int = 0
    history: tuple = field(default=())

    def to_dict(self) -> dict:
        return {"centers": self.centers.tolist(), "cost": self.cost, "iterations": self.iterations}


def _check_count(P_w: WeightedPointSet, count: int, what: str = "k"):
    if count < 1 or count > len(P_w):
        raise InvalidArgument(f"{what} must lie in [1, {len(P_w)}], got {count}")


def _solution(space, P_w, centers, objective, iterations=0, history=()):
    centers = np.sort(np.asarray(centers, dtype=np.int64))
    return Solution(centers, cost(space, P_w, centers, objective), iterations, tuple(history))


def bicriteria_seed(space: MetricSpace, P_w: WeightedPointSet, m: int, seed: int = 0,
                    objective=Objective.MEDIAN) -> Solution:
    """Weighted D^z sampling of ``m`` centers (z = 1 median, 2 means)."""
    objective = Objective.parse(objective)
    _check_count(P_w, m, "m")
    ids = P_w.ids
    n = len(P_w)
    if m == n:
        return _solution(space, P_w, ids, objective)
    rng = np.random.default_rng(seed)
    w = P_w.weights.astype(np.float64)
    chosen = np.zeros(n, dtype=bool)

    def draw(mass):
        cum = np.cumsum(mass)
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        return min(i, n - 1)

    first = draw(w)
    chosen[first] = True
    mind = space.distances(ids, ids[first:first + 1])[:, 0]
    for _ in range(m - 1):
        mass = w * mind ** objective.power
        mass[chosen] = 0.0
        if not mass.sum() > 0:
            # every remaining point coincides with a center
            mass = np.where(chosen, 0.0, w)
        i = draw(mass)
        chosen[i] = True
        mind = np.minimum(mind, space.distances(ids, ids[i:i + 1])[:, 0])
    return _solution(space, P_w, ids[chosen], objective)


def local_search(space: MetricSpace, P_w: WeightedPointSet, k: int,
                 cfg: SolverConfig | None = None) -> Solution:
    """Single-swap local search on a weighted instance.

    Starts from D^z seeding with ``m = k`` and ``cfg.seed``, then applies the best
    improving (center out, point in) swap until the relative gain drops below
    ``cfg.min_relative_gain`` or ``cfg.max_iters`` swaps were made. Ties between
    equally good swaps go to the smallest (out, in) id pair.
    """
    cfg = cfg or SolverConfig()
    _check_count(P_w, k)
    objective = cfg.objective
    ids = P_w.ids
    if k == len(P_w):
        return _solution(space, P_w, ids, objective)
    w = P_w.weights.astype(np.float64)
    start = bicriteria_seed(space, P_w, k, cfg.seed, objective)
    centers = np.searchsorted(ids, start.centers)
    current = start.cost
    history = [current]
    iterations = 0
    while iterations < cfg.max_iters and current > 0:
        out, into, _ = kernels.best_swap(space.data, space.is_matrix, ids, w, centers,
                                         objective.power)
        if out < 0:
            break
        trial = np.sort(np.where(centers == out, into, centers))
        trial_cost = cost(space, P_w, ids[trial], objective)
        if not (current - trial_cost >= cfg.min_relative_gain * current):
            break
        centers, current = trial, trial_cost
        history.append(current)
        iterations += 1
    return Solution(ids[centers], current, iterations, tuple(history))


def best_centers(space: MetricSpace, X: WeightedPointSet, candidates, k: int,
                 objective=Objective.MEDIAN, cap: int = SUBSET_CAP) -> Solution:
    """Exhaustive minimum-cost choice of ``k`` centers among ``candidates``.

    Ties go to the lexicographically smallest id tuple. With fewer than ``k``
    candidates all of them are returned.
    """
    objective = Objective.parse(objective)
    candidates = np.unique(space.check_ids(candidates))
    if candidates.size == 0:
        raise InvalidArgument("candidate set must be non-empty")
    k = min(k, candidates.size)
    n_subsets = comb(candidates.size, k)
    if n_subsets > cap:
        raise ResourceLimit(f"C({candidates.size}, {k}) = {n_subsets} subsets exceeds cap {cap}")
    Dz = space.distances(X.ids, candidates)
    if objective is Objective.MEANS:
        Dz = Dz * Dz
    pos, _ = kernels.best_subset(Dz, X.weights.astype(np.float64), k)
    return _solution(space, X, candidates[pos], objective)


def brute_force_opt(space: MetricSpace, P_w: WeightedPointSet, k: int,
                    objective=Objective.MEDIAN, cap: int = SUBSET_CAP) -> Solution:
    """Exact optimum over all k-subsets of the instance points."""
    _check_count(P_w, k)
    return best_centers(space, P_w, P_w.ids, k, objective, cap)


def solve(space: MetricSpace, P_w: WeightedPointSet, count: int, cfg: SolverConfig) -> Solution:
    """Run the solver named by ``cfg.kind`` for ``count`` centers."""
    if cfg.kind == "local-search":
        return local_search(space, P_w, count, cfg)
    if cfg.kind == "bicriteria-seeding":
        return bicriteria_seed(space, P_w, count, cfg.seed, cfg.objective)
    return brute_force_opt(space, P_w, count, cfg.objective, cfg.cap)
