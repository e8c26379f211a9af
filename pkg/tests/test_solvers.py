import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_space
from oracles import dist_fn, naive_opt
from metric_coreset.errors import InvalidArgument, ResourceLimit
from metric_coreset.metric import MetricSpace, Objective, WeightedPointSet, cost
from metric_coreset.solvers import (SolverConfig, best_centers, bicriteria_seed,
                                    brute_force_opt, local_search, solve)

LINE4 = [0.0, 1.0, 10.0, 11.0]


def test_local_search_examples(line4):
    P = WeightedPointSet.unit(range(4))
    for seed in range(10):
        sol = local_search(line4, P, 2, SolverConfig(seed=seed))
        assert sol.cost == 2.0
        assert sol.centers[0] in (0, 1) and sol.centers[1] in (2, 3)
    full = local_search(line4, P, 4)
    assert full.cost == 0.0 and full.centers.tolist() == [0, 1, 2, 3]
    sp = MetricSpace.euclidean([0.0, 10.0])
    sol = local_search(sp, WeightedPointSet([0, 1], [3, 1]), 1)
    assert sol.centers.tolist() == [0] and sol.cost == 10.0
    with pytest.raises(InvalidArgument):
        local_search(line4, P, 5)


def test_bicriteria_examples():
    sp = MetricSpace.euclidean([0.0, 0.1, 100.0, 100.1])
    P = WeightedPointSet.unit(range(4))
    full = bicriteria_seed(sp, P, 4, 0)
    assert full.cost == 0.0 and len(full.centers) == 4
    assert np.array_equal(bicriteria_seed(sp, P, 2, 5).centers, bicriteria_seed(sp, P, 2, 5).centers)
    with pytest.raises(InvalidArgument):
        bicriteria_seed(sp, P, 5, 0)


def _split_probability(coords):
    """Exact chance that two D-weighted draws land in different clusters."""
    d = dist_fn(coords)
    total = 0.0
    for first in range(4):
        mass = [d(first, q) for q in range(4)]
        far = sum(mass[q] for q in range(4) if (q < 2) != (first < 2))
        total += 0.25 * far / sum(mass)
    return total


def test_bicriteria_far_clusters():
    coords = [0.0, 0.1, 100.0, 100.1]
    p = _split_probability(coords)
    # chance of at least 19 successes out of 20
    p19 = p ** 20 + 20 * p ** 19 * (1 - p)
    assert p19 > 0.999
    sp = MetricSpace.euclidean(coords)
    P = WeightedPointSet.unit(range(4))
    wins = sum(bicriteria_seed(sp, P, 2, s).cost < 1 for s in range(20))
    assert wins >= 19


def test_brute_force_examples(line4):
    P = WeightedPointSet.unit(range(4))
    assert brute_force_opt(line4, P, 2).cost == 2.0
    sp = MetricSpace.euclidean([0.0, 2.0])
    sol = brute_force_opt(sp, WeightedPointSet.unit([0, 1]), 1)
    assert sol.centers.tolist() == [0] and sol.cost == 2.0
    assert brute_force_opt(line4, P, 4).cost == 0.0
    with pytest.raises(ResourceLimit):
        brute_force_opt(line4, P, 2, cap=5)


@pytest.mark.parametrize("seed", range(15))
def test_brute_force_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11))
    coords = rng.normal(size=(n, 2))
    sp, d = MetricSpace.euclidean(coords), dist_fn(coords)
    w = rng.integers(1, 5, size=n)
    P = WeightedPointSet(np.arange(n), w)
    k = int(rng.integers(1, min(n, 4) + 1))
    for obj, z in ((Objective.MEDIAN, 1), (Objective.MEANS, 2)):
        centers, value = naive_opt(d, list(zip(range(n), w.tolist())), k, z)
        sol = brute_force_opt(sp, P, k, obj)
        assert sol.cost == pytest.approx(value, rel=1e-12)
        assert tuple(sol.centers.tolist()) == centers


def test_best_centers_restricted_candidates(line4):
    P = WeightedPointSet.unit(range(4))
    sol = best_centers(line4, P, [1, 3], 2)
    assert sol.centers.tolist() == [1, 3] and sol.cost == 2.0
    # fewer candidates than k: all of them
    assert best_centers(line4, P, [2], 3).centers.tolist() == [2]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(Objective)))
def test_local_search_guarantee_and_monotone(seed, obj):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 25))
    sp = random_space(rng, n)
    P = WeightedPointSet(np.arange(n), rng.integers(1, 4, size=n))
    k = int(rng.integers(1, 4))
    cfg = SolverConfig(objective=obj, seed=seed % 1000)
    sol = local_search(sp, P, k, cfg)
    opt = brute_force_opt(sp, P, k, obj)
    envelope = 5.0 if obj is Objective.MEDIAN else 25.0
    assert sol.cost <= envelope * opt.cost * (1 + 1e-9) + 1e-12
    assert all(b <= a for a, b in zip(sol.history, sol.history[1:]))
    assert sol.cost == pytest.approx(cost(sp, P, sol.centers, obj), rel=1e-12)
    assert len(sol.history) == sol.iterations + 1


def test_local_search_is_swap_optimal():
    rng = np.random.default_rng(8)
    sp = MetricSpace.euclidean(rng.normal(size=(30, 2)))
    P = WeightedPointSet.unit(range(30))
    cfg = SolverConfig(min_relative_gain=1e-12)
    sol = local_search(sp, P, 3, cfg)
    for out, into in itertools.product(sol.centers.tolist(), range(30)):
        trial = [c for c in sol.centers.tolist() if c != out] + [into]
        assert cost(sp, P, trial, "median") >= sol.cost * (1 - 1e-9)


def test_weights_equal_duplicates():
    base = [0.0, 1.0, 5.0, 9.0, 9.5]
    w = [3, 1, 2, 1, 2]
    sp_w = MetricSpace.euclidean(base)
    sp_u = MetricSpace.euclidean(np.repeat(base, w))
    opt_w = brute_force_opt(sp_w, WeightedPointSet(range(5), w), 2)
    opt_u = brute_force_opt(sp_u, WeightedPointSet.unit(range(sum(w))), 2)
    assert opt_w.cost == pytest.approx(opt_u.cost)


def test_solver_config():
    assert SolverConfig(kind="brute-force").guarantee == 1.0
    assert SolverConfig().guarantee == 5.0
    assert SolverConfig(objective="means", t=3).guarantee == 9.0
    assert SolverConfig(kind="bicriteria-seeding", beta=20).guarantee == 20.0
    with pytest.raises(InvalidArgument):
        SolverConfig(kind="greedy")
    with pytest.raises(InvalidArgument):
        SolverConfig(beta=0.5)


def test_solve_dispatch_and_determinism(line4):
    P = WeightedPointSet.unit(range(4))
    for kind in ("local-search", "bicriteria-seeding", "brute-force"):
        a = solve(line4, P, 2, SolverConfig(kind=kind, seed=3))
        b = solve(line4, P, 2, SolverConfig(kind=kind, seed=3))
        assert np.array_equal(a.centers, b.centers) and a.cost == b.cost
