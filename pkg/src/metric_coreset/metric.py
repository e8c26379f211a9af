"""Metric spaces, weighted point sets and the clustering cost functions."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidArgument

#: Relative slack used by every inequality check on floating-point distances.
REL_SLACK = 1e-9


def leq(a: float, b: float, slack: float = REL_SLACK) -> bool:
    """``a <= b`` up to a relative slack."""
    return a <= b + slack * max(abs(a), abs(b))


class Objective(str, enum.Enum):
    MEDIAN = "median"
    MEANS = "means"

    @property
    def power(self) -> int:
        """Exponent applied to distances: 1 for k-median, 2 for k-means."""
        return 1 if self is Objective.MEDIAN else 2

    @classmethod
    def parse(cls, value) -> "Objective":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgument(f"objective must be 'median' or 'means', got {value!r}") from None


class MetricSpace:
    """Distance oracle over a finite universe of points ``0..n-1``.

    Two kinds are supported: Euclidean coordinates (``n x dim`` table) and an
    explicit symmetric distance matrix. Instances are immutable.
    """

    def __init__(self, data: np.ndarray, is_matrix: bool):
        # private copy: freezing must not touch the caller's array
        data = np.array(data, dtype=np.float64, order="C", copy=True)
        data.setflags(write=False)
        self._data = data
        self.is_matrix = bool(is_matrix)

    @classmethod
    def euclidean(cls, coords) -> "MetricSpace":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[0] == 0 or coords.shape[1] == 0:
            raise InvalidArgument("coordinates must form a non-empty n x dim table")
        if not np.all(np.isfinite(coords)):
            raise InvalidArgument("coordinates must be finite")
        return cls(coords, is_matrix=False)

    @classmethod
    def explicit(cls, matrix, validate_cap: int = 512, spot_checks: int = 100_000,
                 seed: int = 0) -> "MetricSpace":
        """Build from a distance matrix, validating the metric axioms.

        The triangle inequality is checked exhaustively when ``n <= validate_cap``
        and on ``spot_checks`` random triples otherwise.
        """
        D = np.asarray(matrix, dtype=np.float64)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
            raise InvalidArgument("distance matrix must be square and non-empty")
        if not np.all(np.isfinite(D)) or np.any(D < 0):
            raise InvalidArgument("distances must be finite and non-negative")
        if np.any(np.diag(D) != 0):
            raise InvalidArgument("d(x, x) must be 0")
        if not np.array_equal(D, D.T):
            raise InvalidArgument("distance matrix must be symmetric")
        n = D.shape[0]
        if n <= validate_cap:
            for z in range(n):
                via = D[:, z, None] + D[None, z, :]
                bad = D > via + REL_SLACK * np.maximum(D, via)
                if bad.any():
                    x, y = np.argwhere(bad)[0]
                    raise InvalidArgument(f"triangle inequality fails for ({x}, {y}) via {z}")
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, n, size=(3, spot_checks))
            via = D[x, z] + D[z, y]
            bad = D[x, y] > via + REL_SLACK * np.maximum(D[x, y], via)
            if bad.any():
                i = int(np.argmax(bad))
                raise InvalidArgument(
                    f"triangle inequality fails for ({x[i]}, {y[i]}) via {z[i]}")
        return cls(D, is_matrix=True)

    @property
    def kind(self) -> str:
        return "explicit-matrix" if self.is_matrix else "euclidean"

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def dim(self) -> int | None:
        return None if self.is_matrix else self._data.shape[1]

    @property
    def data(self) -> np.ndarray:
        """Read-only backing array handed to the kernels."""
        return self._data

    def check_ids(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        if ids.size and (ids.min() < 0 or ids.max() >= self.n):
            raise InvalidArgument(f"point id out of range [0, {self.n})")
        return ids

    def distance(self, a: int, b: int) -> float:
        ids = self.check_ids([a, b])
        return float(kernels.pairwise(self._data, self.is_matrix, ids[:1], ids[1:])[0, 0])

    def distances(self, a, b) -> np.ndarray:
        """Distance block between two id lists."""
        return kernels.pairwise(self._data, self.is_matrix, self.check_ids(a), self.check_ids(b))

    def paired(self, a, b) -> np.ndarray:
        """Elementwise ``d(a[i], b[i])``."""
        a, b = self.check_ids(a), self.check_ids(b)
        if a.shape != b.shape:
            raise InvalidArgument("paired distances need equal-length id lists")
        if self.is_matrix:
            return self._data[a, b]
        s = np.zeros(a.shape[0])
        for t in range(self._data.shape[1]):
            diff = self._data[a, t] - self._data[b, t]
            s += diff * diff
        return np.sqrt(s)

    def dist_to_set(self, p, Y) -> tuple[np.ndarray, np.ndarray]:
        """For every id in ``p`` the nearest member of ``Y`` and the distance to it.

        Ties go to the smallest id in ``Y``.
        """
        Y = np.unique(self.check_ids(Y))
        if Y.size == 0:
            raise InvalidArgument("center set must be non-empty")
        pos, dist = kernels.nearest(self._data, self.is_matrix, self.check_ids(p), Y)
        return Y[pos], dist

    def __repr__(self):
        shape = f"n={self.n}" + ("" if self.is_matrix else f", dim={self.dim}")
        return f"MetricSpace({self.kind}, {shape})"


@dataclass(frozen=True, eq=False)
class WeightedPointSet:
    """Distinct point ids with positive integer weights, kept sorted by id."""

    ids: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        weights = np.asarray(self.weights).reshape(-1)
        if ids.shape != weights.shape:
            raise InvalidArgument("ids and weights must have the same length")
        if weights.size and not np.all(np.equal(np.mod(weights, 1), 0)):
            raise InvalidArgument("weights must be integers")
        weights = weights.astype(np.int64)
        if weights.size and weights.min() < 1:
            raise InvalidArgument("weights must be >= 1")
        order = np.argsort(ids, kind="stable")
        ids, weights = ids[order], weights[order]
        if ids.size > 1 and np.any(ids[1:] == ids[:-1]):
            raise InvalidArgument("point ids must be distinct")
        if ids.size and ids[0] < 0:
            raise InvalidArgument("point ids must be non-negative")
        ids.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def unit(cls, ids) -> "WeightedPointSet":
        ids = np.asarray(ids, dtype=np.int64).reshape(-1)
        return cls(ids, np.ones(ids.shape[0], dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "WeightedPointSet":
        pairs = list(pairs)
        if not pairs:
            return cls(np.empty(0, np.int64), np.empty(0, np.int64))
        ids, weights = zip(*pairs)
        return cls(np.array(ids), np.array(weights))

    def __len__(self) -> int:
        return self.ids.shape[0]

    def __iter__(self):
        return iter(zip(self.ids.tolist(), self.weights.tolist()))

    def __eq__(self, other):
        if not isinstance(other, WeightedPointSet):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.weights, other.weights)

    def __repr__(self):
        return f"WeightedPointSet({list(self)})"

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())

    def weight_of(self, point: int) -> int:
        i = np.searchsorted(self.ids, point)
        if i < len(self) and self.ids[i] == point:
            return int(self.weights[i])
        return 0

    def to_dict(self) -> dict:
        return {"ids": self.ids.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "WeightedPointSet":
        return cls(np.array(d["ids"], dtype=np.int64), np.array(d["weights"], dtype=np.int64))


@dataclass(frozen=True)
class ProblemInstance:
    points: WeightedPointSet
    k: int
    objective: Objective

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective.parse(self.objective))
        if self.k < 1 or self.k > len(self.points):
            raise InvalidArgument(f"k must lie in [1, {len(self.points)}], got {self.k}")


def distance(space: MetricSpace, a: int, b: int) -> float:
    return space.distance(a, b)


def nearest(space: MetricSpace, x: int, Y: Sequence[int]) -> tuple[int, float]:
    """Nearest member of ``Y`` to ``x`` and its distance (ties: smallest id)."""
    center, dist = space.dist_to_set([x], Y)
    return int(center[0]), float(dist[0])


def cost(space: MetricSpace, X: WeightedPointSet, Y, objective) -> float:
    """Weighted k-median (sum of distances) or k-means (sum of squares) cost.

    Summation is sequential in ascending point id, so results are reproducible.
    """
    objective = Objective.parse(objective)
    _, dist = space.dist_to_set(X.ids, Y)
    if objective is Objective.MEANS:
        dist = dist * dist
    return float(kernels.seq_sum(X.weights.astype(np.float64) * dist))
