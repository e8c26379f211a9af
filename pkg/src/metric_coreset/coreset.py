"""Composable coresets for k-median / k-means and the 3-round distributed solve.

Round 1 runs, per partition, a sequential solver for a reference set ``T``,
derives the tolerance radius ``R_l`` and covers the partition with balls. Round
2 broadcasts the union ``C_w`` and all ``R_l`` and covers every partition again,
this time around ``C_w``. Round 3 solves the weighted instance on ``E_w``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .cover import AssignmentMap, CoverParams, CoverResult, SelectionPolicy, cover_with_balls
from .errors import InvalidArgument
from .metric import MetricSpace, Objective, WeightedPointSet, cost
from .mr_sim import MemoryStats, RoundPlan, make_partitioning, run_round
from .solvers import SolverConfig, Solution, solve

LABEL_ONE_ROUND = "2alpha+O(eps)"
LABEL_CONTINUOUS = "continuous"
LABEL_TWO_ROUND = "alpha+O(eps)"

#: Largest eps + eps^2 for which the k-means guarantees hold.
MEANS_EPS_LIMIT = 1.0 / 8.0


def means_eps_ok(eps: float) -> bool:
    return eps + eps * eps <= MEANS_EPS_LIMIT


@dataclass(frozen=True)
class CoresetParams:
    eps: float
    k: int
    objective: Objective = Objective.MEDIAN
    m: int | None = None
    L: int = 1
    t_solver: str = "local-search"
    beta: float | None = None
    t: int = 1
    partition_seed: int = 0
    solver_seed: int = 0
    cover_seed: int = 0
    cover_policy: str = "input-order"
    unsafe: bool = False

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if self.m is None:
            object.__setattr__(self, "m", self.k)
        if not (0.0 < self.eps < 1.0):
            raise InvalidArgument(f"eps must lie in (0, 1), got {self.eps}")
        if self.k < 1:
            raise InvalidArgument(f"k must be positive, got {self.k}")
        if self.m < self.k:
            raise InvalidArgument(f"m must be >= k, got m={self.m}, k={self.k}")
        if self.L < 1:
            raise InvalidArgument(f"L must be positive, got {self.L}")
        if (self.objective is Objective.MEANS and not self.unsafe
                and not means_eps_ok(self.eps)):
            raise InvalidArgument(
                f"k-means needs eps + eps^2 <= 1/8, got eps={self.eps}; pass unsafe to override")
        solver = self.solver_config()
        if self.beta is not None:
            if self.beta < 1:
                raise InvalidArgument(f"beta must be >= 1, got {self.beta}")
            if (solver.kind != "bicriteria-seeding" and not self.unsafe
                    and self.beta != solver.guarantee):
                raise InvalidArgument(
                    f"beta for {solver.kind} is fixed at {solver.guarantee}; pass unsafe to override")
        SelectionPolicy(self.cover_policy)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(kind=self.t_solver, objective=self.objective, t=self.t,
                            seed=self.solver_seed,
                            beta=self.beta if self.beta is not None else 16.0)

    @property
    def effective_beta(self) -> float:
        if self.beta is not None:
            return float(self.beta)
        return self.solver_config().guarantee

    def cover_eps_beta(self) -> tuple[float, float]:
        """``(eps, beta)`` handed to the ball cover; k-means uses ``(sqrt2 eps, sqrt beta)``."""
        if self.objective is Objective.MEDIAN:
            return self.eps, self.effective_beta
        return math.sqrt(2.0) * self.eps, math.sqrt(self.effective_beta)

    def policy(self, round_index: int, part: int) -> SelectionPolicy:
        if self.cover_policy == "input-order":
            return SelectionPolicy()
        seed = int(np.random.SeedSequence([self.cover_seed, round_index, part]).generate_state(1)[0])
        return SelectionPolicy("seeded-random", seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["objective"] = self.objective.value
        d["effective_beta"] = self.effective_beta
        return d


@dataclass
class PartitionState:
    index: int
    ids: np.ndarray
    T: np.ndarray
    T_cost: float
    R: float
    first: CoverResult
    second: CoverResult | None = None


@dataclass
class RoundState:
    params: CoresetParams
    partitions: list
    C_w: WeightedPointSet
    tau: AssignmentMap
    memory: list = field(default_factory=list)
    R: float | None = None
    E_w: WeightedPointSet | None = None
    phi: AssignmentMap | None = None
    guarantee_label: str = LABEL_ONE_ROUND

    def round_reports(self) -> list[dict]:
        parts = self.partitions
        rounds = [{
            "round": 1,
            "partition_sizes": [int(p.ids.shape[0]) for p in parts],
            "t_sizes": [int(p.T.shape[0]) for p in parts],
            "R_l": [p.R for p in parts],
            "c_sizes": [len(p.first.coreset) for p in parts],
            "c_total": len(self.C_w),
            "memory": self.memory[0].to_dict(),
        }]
        if self.E_w is not None:
            rounds.append({
                "round": 2,
                "R": self.R,
                "e_sizes": [len(p.second.coreset) for p in parts],
                "e_total": len(self.E_w),
                "memory": self.memory[1].to_dict(),
            })
        return rounds


@dataclass
class PipelineReport:
    params: dict
    guarantee_label: str
    rounds: list
    memory: MemoryStats
    final: dict | None = None

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "guarantee_label": self.guarantee_label,
            "rounds": self.rounds,
            "memory": self.memory.to_dict(),
            "final": self.final,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineReport":
        return cls(d["params"], d["guarantee_label"], d["rounds"],
                   MemoryStats.from_dict(d["memory"]), d.get("final"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def __eq__(self, other):
        if not isinstance(other, PipelineReport):
            return NotImplemented
        return self.to_json() == other.to_json()


def report_from_state(state: RoundState, final: dict | None = None,
                      extra_rounds: list | None = None) -> PipelineReport:
    memory = MemoryStats()
    for stats in state.memory:
        memory = memory.merge(stats)
    rounds = state.round_reports() + list(extra_rounds or [])
    for r in extra_rounds or []:
        memory = memory.merge(MemoryStats.from_dict(r["memory"]))
    return PipelineReport(state.params.to_dict(), state.guarantee_label, rounds, memory, final)


def _prepare(space: MetricSpace, P, params: CoresetParams) -> list[np.ndarray]:
    P = np.unique(space.check_ids(P))
    n = P.shape[0]
    if n == 0:
        raise InvalidArgument("P must be non-empty")
    if params.L > n:
        raise InvalidArgument(f"L={params.L} exceeds |P|={n}")
    smallest = n // params.L
    if smallest < params.m:
        raise InvalidArgument(
            f"partitions of size {smallest} cannot hold m={params.m} centers (|P|={n}, L={params.L})")
    return make_partitioning(n, params.L, params.partition_seed).split(P)


def _first_round(space, parts, params, threads):
    solver = params.solver_config()
    eps_c, beta_c = params.cover_eps_beta()
    means = params.objective is Objective.MEANS

    def worker(part, P_l, _broadcast):
        T = solve(space, WeightedPointSet.unit(P_l), params.m, solver)
        n_l = P_l.shape[0]
        R_l = math.sqrt(T.cost / n_l) if means else T.cost / n_l
        cov = cover_with_balls(space, P_l, T.centers, CoverParams(R_l, eps_c, beta_c),
                               params.policy(1, part))
        return PartitionState(part, P_l, T.centers, T.cost, R_l, cov)

    plan = RoundPlan(1, parts,
                     output_items=lambda s: s.T.shape[0] + len(s.first.coreset))
    return run_round(plan, worker, threads)


def global_radius(sizes, radii, objective) -> float:
    """Size-weighted mean of the ``R_l`` (root mean square for k-means)."""
    objective = Objective.parse(objective)
    n = sum(sizes)
    acc = 0.0
    for size, r in zip(sizes, radii):
        acc += size * (r if objective is Objective.MEDIAN else r * r)
    return acc / n if objective is Objective.MEDIAN else math.sqrt(acc / n)


def _second_round(space, parts, C_w, radii, params, threads):
    eps_c, beta_c = params.cover_eps_beta()
    sizes = [p.shape[0] for p in parts]

    def worker(part, P_l, broadcast):
        centers, all_radii = broadcast
        R = global_radius(sizes, all_radii, params.objective)
        return cover_with_balls(space, P_l, centers, CoverParams(R, eps_c, beta_c),
                                params.policy(2, part))

    plan = RoundPlan(2, parts, broadcast=(C_w.ids, list(radii)),
                     broadcast_items=len(C_w) + len(parts),
                     output_items=lambda cov: len(cov.coreset))
    return run_round(plan, worker, threads)


def _union(covers) -> tuple[WeightedPointSet, AssignmentMap]:
    tau = AssignmentMap.union(c.assignment for c in covers)
    return tau.weights(), tau


def build_coreset_one_round(space: MetricSpace, P, params: CoresetParams,
                            threads: int | None = None):
    """One-round construction; returns ``(C_w, tau, state)``."""
    parts = _prepare(space, P, params)
    states, stats = _first_round(space, parts, params, threads)
    C_w, tau = _union(s.first for s in states)
    state = RoundState(params, states, C_w, tau, memory=[stats])
    return C_w, tau, state


def continuous_mode_coreset(space: MetricSpace, P, params: CoresetParams,
                            threads: int | None = None):
    """The one-round construction labelled for centers drawn from the whole space."""
    C_w, tau, state = build_coreset_one_round(space, P, params, threads)
    state.guarantee_label = LABEL_CONTINUOUS
    return C_w, tau, state


def build_coreset_two_round(space: MetricSpace, P, params: CoresetParams,
                            threads: int | None = None):
    """Two-round construction; returns ``(E_w, phi, state)``."""
    parts = _prepare(space, P, params)
    states, stats1 = _first_round(space, parts, params, threads)
    C_w, tau = _union(s.first for s in states)
    radii = [s.R for s in states]
    covers, stats2 = _second_round(space, parts, C_w, radii, params, threads)
    for s, cov in zip(states, covers):
        s.second = cov
    E_w, phi = _union(covers)
    state = RoundState(params, states, C_w, tau, memory=[stats1, stats2],
                       R=global_radius([p.shape[0] for p in parts], radii, params.objective),
                       E_w=E_w, phi=phi, guarantee_label=LABEL_TWO_ROUND)
    return E_w, phi, state


def default_partitions(n: int, k: int, m: int | None = None) -> int:
    """``round(cbrt(n / k))`` clamped to ``[1, n // max(m, k)]``."""
    m = k if m is None else m
    L = int(round((n / k) ** (1.0 / 3.0)))
    return max(1, min(L, n // max(m, k)))


@dataclass(frozen=True)
class PipelineConfig:
    objective: Objective = Objective.MEDIAN
    m: int | None = None
    L: int | None = None
    t_solver: str = "local-search"
    final_solver: str = "local-search"
    beta: float | None = None
    t: int = 1
    partition_seed: int = 0
    solver_seed: int = 0
    cover_seed: int = 0
    cover_policy: str = "input-order"
    unsafe: bool = False
    threads: int | None = None

    def coreset_params(self, n: int, k: int, eps: float) -> CoresetParams:
        m = k if self.m is None else self.m
        L = default_partitions(n, k, m) if self.L is None else self.L
        return CoresetParams(eps=eps, k=k, objective=self.objective, m=m, L=L,
                             t_solver=self.t_solver, beta=self.beta, t=self.t,
                             partition_seed=self.partition_seed, solver_seed=self.solver_seed,
                             cover_seed=self.cover_seed, cover_policy=self.cover_policy,
                             unsafe=self.unsafe)


def solve_distributed(space: MetricSpace, P, k: int, eps: float,
                      cfg: PipelineConfig | None = None) -> tuple[Solution, PipelineReport]:
    """Two coreset rounds, then a weighted sequential solve on ``E_w``.

    The returned solution's ``cost`` is measured on the full input ``P``.
    """
    cfg = cfg or PipelineConfig()
    P = np.unique(space.check_ids(P))
    if not (1 <= k <= P.shape[0]):
        raise InvalidArgument(f"k must lie in [1, {P.shape[0]}], got {k}")
    params = cfg.coreset_params(P.shape[0], k, eps)
    E_w, phi, state = build_coreset_two_round(space, P, params, cfg.threads)

    final_cfg = SolverConfig(kind=cfg.final_solver, objective=params.objective,
                             t=params.t, seed=params.solver_seed)
    k_final = min(k, len(E_w))
    plan = RoundPlan(3, [E_w], input_items=len, output_items=lambda s: s.centers.shape[0])
    (S,), stats3 = run_round(plan, lambda _part, E, _b: solve(space, E, k_final, final_cfg),
                             cfg.threads)
    full_cost = cost(space, WeightedPointSet.unit(P), S.centers, params.objective)
    final = {
        "solver": cfg.final_solver,
        "centers": S.centers.tolist(),
        "cost": full_cost,
        "coreset_cost": S.cost,
        "iterations": S.iterations,
        "c_size": len(state.C_w),
        "e_size": len(E_w),
    }
    round3 = {"round": 3, "coreset_size": len(E_w), "memory": stats3.to_dict()}
    report = report_from_state(state, final, [round3])
    return Solution(S.centers, full_cost, S.iterations, S.history), report
