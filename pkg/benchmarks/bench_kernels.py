"""Time the numba kernels against their numpy twins and check they agree.

    python3 benchmarks/bench_kernels.py [--n 4000] [--k 10] [--repeat 3]
"""
import argparse
import time

import numpy as np

from metric_coreset import kernels


def _best_of(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(n, k, rng):
    X = rng.normal(size=(n, 2))
    ids = np.arange(n)
    centers = np.sort(rng.choice(n, size=k, replace=False))
    w = rng.integers(1, 5, size=n).astype(np.float64)
    order = rng.permutation(n)
    _, d = kernels.numpy_impl.nearest(X, False, ids, centers)
    thr = 0.05 * np.maximum(d.mean(), d)
    Dz = rng.uniform(size=(200, 24))
    return {
        "pairwise": lambda m: m.pairwise(X, False, ids[:2000], ids[:500]),
        "nearest": lambda m: m.nearest(X, False, ids, centers),
        "seq_sum": lambda m: m.seq_sum(w),
        "cover_greedy": lambda m: m.cover_greedy(X, False, order, thr),
        "best_swap": lambda m: m.best_swap(X, False, ids, w, np.searchsorted(ids, centers), 1),
        "best_subset": lambda m: m.best_subset(Dz, w[:200], 3),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.numba_impl is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"n={args.n} k={args.k} (best of {args.repeat}; numba timed after compilation)")
    print(f"{'kernel':<14}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  equal")
    for name, fn in cases(args.n, args.k, rng).items():
        fn(kernels.numba_impl)  # compile
        t_nb, out_nb = _best_of(lambda: fn(kernels.numba_impl), args.repeat)
        t_np, out_np = _best_of(lambda: fn(kernels.numpy_impl), args.repeat)
        print(f"{name:<14}{t_nb:>12.5f}{t_np:>12.5f}{t_np / t_nb:>10.1f}  {_same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
