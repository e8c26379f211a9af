"""Hot kernels, dispatched to numba or numpy per ``METRIC_CORESET_BACKEND``.

Both implementations stay importable as :data:`numba_impl` and
:data:`numpy_impl` for equivalence tests and the benchmark.
"""
from . import _kernels_numpy as numpy_impl
from ._accel import BACKEND, HAVE_NUMBA

if HAVE_NUMBA:
    from . import _kernels_numba as numba_impl
else:  # pragma: no cover
    numba_impl = None

_impl = numba_impl if BACKEND == "numba" else numpy_impl

pairwise = _impl.pairwise
nearest = _impl.nearest
seq_sum = _impl.seq_sum
cover_greedy = _impl.cover_greedy
best_swap = _impl.best_swap
best_subset = _impl.best_subset

__all__ = [
    "BACKEND",
    "numba_impl",
    "numpy_impl",
    "pairwise",
    "nearest",
    "seq_sum",
    "cover_greedy",
    "best_swap",
    "best_subset",
]
