"""Partition-parallel round executor with item-level memory accounting.

Each round hands every partition its own input plus one shared broadcast
payload; workers cannot talk to each other inside a round. Memory is counted
in items (points and scalars), never bytes.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import InvalidArgument, RoundFailure

THREADS_ENV = "METRIC_CORESET_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else ``$METRIC_CORESET_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise InvalidArgument(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 1:
        raise InvalidArgument(f"thread count must be >= 1, got {threads}")
    return threads


@dataclass(frozen=True)
class Partitioning:
    """``assignment[i]`` is the partition of the i-th input position."""

    assignment: np.ndarray
    L: int

    def sizes(self) -> list[int]:
        return np.bincount(self.assignment, minlength=self.L).tolist()

    def split(self, ids) -> list[np.ndarray]:
        """Partition members of ``ids`` (aligned with positions), each sorted."""
        ids = np.asarray(ids, dtype=np.int64)
        if ids.shape[0] != self.assignment.shape[0]:
            raise InvalidArgument("ids do not match the partitioning length")
        return [np.sort(ids[self.assignment == part]) for part in range(self.L)]


def make_partitioning(n: int, L: int, seed: int = 0) -> Partitioning:
    """Seeded shuffle, then a contiguous split; the first ``n mod L`` parts get one extra."""
    if not (1 <= L <= n):
        raise InvalidArgument(f"need 1 <= L <= n, got L={L}, n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    base, extra = divmod(n, L)
    assignment = np.empty(n, dtype=np.int64)
    start = 0
    for part in range(L):
        size = base + (1 if part < extra else 0)
        assignment[perm[start:start + size]] = part
        start += size
    assignment.setflags(write=False)
    return Partitioning(assignment, L)


@dataclass(frozen=True)
class MemoryStats:
    max_local_items: int = 0
    aggregate_items: int = 0

    def merge(self, other: "MemoryStats") -> "MemoryStats":
        """Worst case over two rounds."""
        return MemoryStats(max(self.max_local_items, other.max_local_items),
                           max(self.aggregate_items, other.aggregate_items))

    def to_dict(self) -> dict:
        return {"max_local_items": self.max_local_items, "aggregate_items": self.aggregate_items}

    @classmethod
    def from_dict(cls, d: dict) -> "MemoryStats":
        return cls(int(d["max_local_items"]), int(d["aggregate_items"]))


def _default_size(obj) -> int:
    try:
        return len(obj)
    except TypeError:
        return 1


@dataclass
class RoundPlan:
    """Inputs for one round.

    ``output_items`` measures what a worker leaves resident; the default counts
    nothing, so a pass-through worker costs only its input.
    """

    index: int
    inputs: Sequence[Any]
    broadcast: Any = None
    broadcast_items: int = 0
    input_items: Callable[[Any], int] = _default_size
    output_items: Callable[[Any], int] = field(default=lambda out: 0)


def run_round(plan: RoundPlan, worker: Callable[[int, Any, Any], Any],
              threads: int | None = None) -> tuple[list, MemoryStats]:
    """Apply ``worker(partition, input, broadcast)`` to every partition.

    Outputs come back in partition order whatever the execution order. A
    failing worker aborts the round with a :class:`RoundFailure`.
    """
    threads = resolve_threads(threads)

    def call(part):
        try:
            return worker(part, plan.inputs[part], plan.broadcast)
        except Exception as exc:
            raise RoundFailure(plan.index, part, exc) from exc

    parts = range(len(plan.inputs))
    if threads == 1 or len(plan.inputs) <= 1:
        outputs = [call(part) for part in parts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(call, parts))

    local = [plan.input_items(inp) + plan.broadcast_items + plan.output_items(out)
             for inp, out in zip(plan.inputs, outputs)]
    stats = MemoryStats(max(local, default=0), sum(local))
    return outputs, stats
