"""Command-line entry point.

Exit codes: 0 success, 1 usage/input/runtime error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coreset import (CoresetParams, PipelineConfig, build_coreset_one_round,
                      build_coreset_two_round, continuous_mode_coreset, default_partitions,
                      means_eps_ok, report_from_state, solve_distributed)
from .cover import AssignmentMap, CoverParams, cover_with_balls
from .errors import DatasetError, InvalidArgument, ResourceLimit, RoundFailure
from .io import dumps, load_dataset, read_json
from .metric import Objective, WeightedPointSet
from .mr_sim import resolve_threads
from .solvers import SOLVER_KINDS, SUBSET_CAP, SolverConfig, brute_force_opt, solve
from .verify import (PropertyReport, check_approximate, check_bounded, check_centroid,
                     coreset_bounds, weight_mismatch)

MODES = ("solve", "coreset", "cover", "verify", "oracle")

EXIT_OK, EXIT_ERROR, EXIT_VERIFY_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    input: Path
    format: str
    objective: Objective
    k: int
    eps: float
    L: int | None
    m: int | None
    t_solver: str
    final_solver: str
    beta: float | None
    seed_partition: int
    seed_solver: int
    seed_cover: int
    cover_policy: str
    output: Path | None
    unsafe_eps: bool
    threads: int
    rounds: int
    continuous: bool
    coreset: Path | None
    samples: int
    oracle_cap: int

    def resolve_L(self, n: int) -> int:
        return default_partitions(n, self.k, self.m) if self.L is None else self.L

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(objective=self.objective, m=self.m, L=self.L,
                              t_solver=self.t_solver, final_solver=self.final_solver,
                              beta=self.beta, partition_seed=self.seed_partition,
                              solver_seed=self.seed_solver, cover_seed=self.seed_cover,
                              cover_policy=self.cover_policy, unsafe=self.unsafe_eps,
                              threads=self.threads)

    def coreset_params(self, n: int) -> CoresetParams:
        return self.pipeline().coreset_params(n, self.k, self.eps)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="metric-coreset",
                description="Distributed coresets for k-median / k-means in general metric spaces.",
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("mode_pos", nargs="?", choices=MODES, metavar="MODE",
                   help=f"one of {', '.join(MODES)} (same as --mode)")
    p.add_argument("--mode", choices=MODES, default=None, help="what to run (default: solve)")
    p.add_argument("--input", required=True, type=Path, help="dataset file")
    p.add_argument("--format", choices=("auto", "coords", "matrix"), default="auto",
                   help="dataset format; auto looks for a 'matrix n' header")
    p.add_argument("--objective", choices=[o.value for o in Objective], default="median")
    p.add_argument("--k", type=int, required=True, help="number of centers")
    p.add_argument("--eps", type=float, default=0.1, help="precision, in (0, 1)")
    p.add_argument("--l-partitions", type=int, default=None,
                   help="number of partitions L (default round(cbrt(n/k)), clamped)")
    p.add_argument("--m", type=int, default=None, help="size of each T_l (default k)")
    p.add_argument("--t-solver", choices=SOLVER_KINDS, default="local-search",
                   help="solver for the per-partition reference sets")
    p.add_argument("--final-solver", choices=("local-search", "brute-force"),
                   default="local-search", help="weighted solver run on the coreset")
    p.add_argument("--beta", type=float, default=None,
                   help="approximation factor of the T-solver (bicriteria-seeding default 16)")
    p.add_argument("--seed-partition", type=int, default=0)
    p.add_argument("--seed-solver", type=int, default=0)
    p.add_argument("--seed-cover", type=int, default=0)
    p.add_argument("--cover-policy", choices=("input-order", "seeded-random"), default="input-order")
    p.add_argument("--output", type=Path, default=None, help="output file (default stdout)")
    p.add_argument("--unsafe-eps", action="store_true",
                   help="allow k-means eps with eps + eps^2 > 1/8 and custom beta")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default $METRIC_CORESET_THREADS or 1)")
    p.add_argument("--rounds", type=int, choices=(1, 2), default=2, help="coreset mode: rounds to run")
    p.add_argument("--continuous", action="store_true",
                   help="coreset mode with --rounds 1: label the output for continuous centers")
    p.add_argument("--coreset", type=Path, default=None, help="verify mode: coreset JSON to check")
    p.add_argument("--samples", type=int, default=200,
                   help="verify mode: sampled solutions for the approximate-coreset check")
    p.add_argument("--oracle-cap", type=int, default=SUBSET_CAP,
                   help="largest number of k-subsets the exact oracle may enumerate")
    return p


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if ns.mode_pos and ns.mode and ns.mode_pos != ns.mode:
        raise UsageError(f"conflicting modes {ns.mode_pos!r} and {ns.mode!r}")
    mode = ns.mode or ns.mode_pos or "solve"
    objective = Objective(ns.objective)
    if not (0.0 < ns.eps < 1.0):
        raise UsageError(f"--eps must lie in (0, 1), got {ns.eps}")
    if objective is Objective.MEANS and not ns.unsafe_eps and not means_eps_ok(ns.eps):
        raise UsageError(f"k-means requires eps + eps^2 <= 1/8 (got eps={ns.eps}); "
                         "pass --unsafe-eps to override")
    if ns.k < 1:
        raise UsageError("--k must be positive")
    if ns.m is not None and ns.m < ns.k:
        raise UsageError("--m must be >= --k")
    if ns.l_partitions is not None and ns.l_partitions < 1:
        raise UsageError("--l-partitions must be positive")
    if mode == "verify" and ns.coreset is None:
        raise UsageError("verify mode needs --coreset")
    if ns.samples < 1 or ns.oracle_cap < 1:
        raise UsageError("--samples and --oracle-cap must be positive")
    try:
        threads = resolve_threads(ns.threads)
        # surfaces beta / solver constraint violations before any work is done
        PipelineConfig(objective=objective, beta=ns.beta, t_solver=ns.t_solver,
                       unsafe=ns.unsafe_eps).coreset_params(max(ns.k, ns.m or ns.k), ns.k, ns.eps)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(mode=mode, input=ns.input, format=ns.format, objective=objective, k=ns.k,
                     eps=ns.eps, L=ns.l_partitions, m=ns.m, t_solver=ns.t_solver,
                     final_solver=ns.final_solver, beta=ns.beta,
                     seed_partition=ns.seed_partition, seed_solver=ns.seed_solver,
                     seed_cover=ns.seed_cover, cover_policy=ns.cover_policy, output=ns.output,
                     unsafe_eps=ns.unsafe_eps, threads=threads, rounds=ns.rounds,
                     continuous=ns.continuous, coreset=ns.coreset, samples=ns.samples,
                     oracle_cap=ns.oracle_cap)


def _emit(text: str, output: Path | None):
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _common(cfg: RunConfig, n: int) -> dict:
    return {"mode": cfg.mode, "objective": cfg.objective.value, "k": cfg.k, "eps": cfg.eps, "n": n}


def _run_solve(cfg, space, P):
    S, report = solve_distributed(space, P, cfg.k, cfg.eps, cfg.pipeline())
    return {**_common(cfg, P.size), "centers": S.centers.tolist(), "cost": S.cost,
            "report": report.to_dict()}


def _run_coreset(cfg, space, P):
    params = cfg.coreset_params(P.size)
    if cfg.rounds == 2:
        coreset, mapping, state = build_coreset_two_round(space, P, params, cfg.threads)
    elif cfg.continuous:
        coreset, mapping, state = continuous_mode_coreset(space, P, params, cfg.threads)
    else:
        coreset, mapping, state = build_coreset_one_round(space, P, params, cfg.threads)
    return {**_common(cfg, P.size), "rounds": cfg.rounds, "coreset": coreset.to_dict(),
            "assignment": mapping.to_dict(), "report": report_from_state(state).to_dict()}


def _run_cover(cfg, space, P):
    params = cfg.coreset_params(P.size)
    m = params.m
    T = solve(space, WeightedPointSet.unit(P), m, params.solver_config())
    R = T.cost / P.size
    if cfg.objective is Objective.MEANS:
        R = float(np.sqrt(R))
    eps_c, beta_c = params.cover_eps_beta()
    cover_params = CoverParams(R, eps_c, beta_c)
    result = cover_with_balls(space, P, T.centers, cover_params, params.policy(1, 0))
    return {**_common(cfg, P.size), "T": T.centers.tolist(), "R": R,
            "cover_eps": eps_c, "cover_beta": beta_c, **result.to_dict()}


def _run_oracle(cfg, space, P):
    opt = brute_force_opt(space, WeightedPointSet.unit(P), cfg.k, cfg.objective, cfg.oracle_cap)
    return {**_common(cfg, P.size), "centers": opt.centers.tolist(), "cost": opt.cost}


def _load_coreset(path: Path):
    doc = read_json(path)
    try:
        coreset = WeightedPointSet.from_dict(doc["coreset"])
        mapping = AssignmentMap.from_dict(doc["assignment"])
        return doc, coreset, mapping
    except (KeyError, TypeError, InvalidArgument) as exc:
        raise DatasetError(f"malformed coreset document ({exc})", path) from None


def _run_verify(cfg, space, P):
    doc, coreset, mapping = _load_coreset(cfg.coreset)
    objective = Objective.parse(doc.get("objective", cfg.objective))
    eps = float(doc.get("eps", cfg.eps))
    k = int(doc.get("k", cfg.k))
    bounds = coreset_bounds(objective, eps)
    checks: list[PropertyReport] = []

    if not mapping.covers(P):
        missing = np.setdiff1d(P, mapping.points)
        witness = int(missing[0]) if missing.size else int(np.setdiff1d(mapping.points, P)[0])
        checks.append(PropertyReport("map-total", False, float("inf"), witness=witness,
                                     detail="map does not cover exactly the input points"))
    else:
        try:
            opt = brute_force_opt(space, WeightedPointSet.unit(P), k, objective, cfg.oracle_cap)
        except ResourceLimit:
            opt = None
        if opt is None:
            ok = coreset == mapping.weights()
            checks.append(PropertyReport("weights", ok, 0.0,
                                         witness=None if ok else weight_mismatch(coreset, mapping),
                                         detail="optimum beyond oracle cap; bounded check skipped"))
        else:
            checks.append(check_bounded(space, P, coreset, mapping, bounds.bounded, opt.cost,
                                        objective))
        checks.append(check_approximate(space, P, coreset, bounds.approximate, k, objective,
                                        mode=("sampled", cfg.samples, cfg.seed_solver),
                                        cap=cfg.oracle_cap))
        if opt is not None and doc.get("rounds", 2) == 2:
            try:
                checks.append(check_centroid(space, P, coreset.ids, k, bounds.centroid, opt.cost,
                                             objective, cfg.oracle_cap))
            except ResourceLimit:
                pass
    passed = all(c.passed for c in checks)
    return {"mode": "verify", "passed": passed, "checks": [c.to_dict() for c in checks]}, passed


def run(cfg: RunConfig) -> int:
    try:
        space = load_dataset(cfg.input, cfg.format)
        P = np.arange(space.n, dtype=np.int64)
        if cfg.k > space.n:
            raise InvalidArgument(f"k={cfg.k} exceeds the {space.n} input points")
        if cfg.mode == "verify":
            result, passed = _run_verify(cfg, space, P)
            text = dumps(result)
            sys.stdout.write(text)
            if cfg.output is not None:
                cfg.output.write_text(text)
            return EXIT_OK if passed else EXIT_VERIFY_FAILED
        handler = {"solve": _run_solve, "coreset": _run_coreset, "cover": _run_cover,
                   "oracle": _run_oracle}[cfg.mode]
        _emit(dumps(handler(cfg, space, P)), cfg.output)
        return EXIT_OK
    except (InvalidArgument, ResourceLimit, RoundFailure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
