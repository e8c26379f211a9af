"""Greedy ball cover: the CoverWithBalls selection loop and its proxy map."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import kernels
from .errors import InvalidArgument
from .metric import MetricSpace, WeightedPointSet


@dataclass(frozen=True)
class CoverParams:
    R: float
    eps: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0):
            raise InvalidArgument(f"eps must lie in (0, 1), got {self.eps}")
        if not self.beta >= 1.0:
            raise InvalidArgument(f"beta must be >= 1, got {self.beta}")
        if not (self.R >= 0.0 and np.isfinite(self.R)):
            raise InvalidArgument(f"R must be a finite non-negative real, got {self.R}")

    @property
    def scale(self) -> float:
        """Ball radius factor applied to ``max(R, d(q, T))``."""
        return self.eps / (2.0 * self.beta)


@dataclass(frozen=True)
class SelectionPolicy:
    """How the greedy loop picks the next remaining point.

    ``input-order`` takes the smallest remaining id. ``seeded-random`` walks a
    seeded uniform permutation; the first unremoved point of a uniform
    permutation is uniform over the remaining points.
    """

    kind: str = "input-order"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("input-order", "seeded-random"):
            raise InvalidArgument(f"unknown selection policy {self.kind!r}")
        if self.kind == "seeded-random" and self.seed is None:
            object.__setattr__(self, "seed", 0)

    def priority(self, ids) -> np.ndarray:
        ids = np.sort(np.asarray(ids, dtype=np.int64))
        if self.kind == "input-order":
            return ids
        return np.random.default_rng(self.seed).permutation(ids)

    def pick(self, remaining: Iterable[int]) -> int:
        ids = np.fromiter(remaining, dtype=np.int64)
        if ids.size == 0:
            raise InvalidArgument("nothing left to pick from")
        return int(self.priority(ids)[0])


def selection_policy(kind: str = "input-order", seed: int | None = None) -> SelectionPolicy:
    return SelectionPolicy(kind, seed)


class AssignmentMap:
    """Total map from input points to their proxies, stored sorted by point."""

    def __init__(self, points, images):
        points = np.asarray(points, dtype=np.int64).reshape(-1)
        images = np.asarray(images, dtype=np.int64).reshape(-1)
        if points.shape != images.shape:
            raise InvalidArgument("points and images must have the same length")
        order = np.argsort(points, kind="stable")
        points, images = points[order], images[order]
        if points.size > 1 and np.any(points[1:] == points[:-1]):
            raise InvalidArgument("a point may have only one image")
        points.setflags(write=False)
        images.setflags(write=False)
        self.points = points
        self.images = images

    @classmethod
    def union(cls, maps: Iterable["AssignmentMap"]) -> "AssignmentMap":
        maps = list(maps)
        if not maps:
            return cls([], [])
        return cls(np.concatenate([m.points for m in maps]),
                   np.concatenate([m.images for m in maps]))

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, point: int) -> int:
        i = np.searchsorted(self.points, point)
        if i == len(self) or self.points[i] != point:
            raise KeyError(point)
        return int(self.images[i])

    def __eq__(self, other):
        if not isinstance(other, AssignmentMap):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(self.images, other.images)

    def __repr__(self):
        return f"AssignmentMap({dict(zip(self.points.tolist(), self.images.tolist()))})"

    def covers(self, P) -> bool:
        return np.array_equal(self.points, np.unique(np.asarray(P, dtype=np.int64)))

    def weights(self) -> WeightedPointSet:
        """Weighted set whose weights count preimages."""
        ids, counts = np.unique(self.images, return_counts=True)
        return WeightedPointSet(ids, counts)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "images": self.images.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "AssignmentMap":
        return cls(d["points"], d["images"])


@dataclass(frozen=True)
class CoverResult:
    coreset: WeightedPointSet
    assignment: AssignmentMap
    selection_order: np.ndarray

    def to_dict(self) -> dict:
        return {
            "coreset": self.coreset.to_dict(),
            "assignment": self.assignment.to_dict(),
            "selection_order": self.selection_order.tolist(),
        }


def cover_with_balls(space: MetricSpace, P, T, params: CoverParams,
                     policy: SelectionPolicy | None = None) -> CoverResult:
    """Greedily pick points of ``P``; each pick removes every remaining ``q`` with
    ``d(p, q) <= eps/(2 beta) * max(R, d(q, T))`` and becomes its proxy.
    """
    policy = policy or SelectionPolicy()
    T = np.unique(space.check_ids(T))
    if T.size == 0:
        raise InvalidArgument("T must be non-empty")
    P = np.unique(space.check_ids(P))
    if P.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return CoverResult(WeightedPointSet(empty, empty), AssignmentMap(empty, empty), empty)

    order = policy.priority(P)
    _, d_T = space.dist_to_set(order, T)
    thr = params.scale * np.maximum(params.R, d_T)
    tau_pos, sel = kernels.cover_greedy(space.data, space.is_matrix, order, thr)
    assignment = AssignmentMap(order, order[tau_pos])
    return CoverResult(assignment.weights(), assignment, order[sel])
