"""Instances, tours and the cost functionals of the node weight dependent TSP.

Cities are numbered ``0..n-1`` internally; the start city defaults to ``0``.
File formats and the CLI use 1-based numbering, converted at the boundary.

A tour is a tuple of city indices.  Functions accept any integer sequence and
return plain tuples so results hash and compare cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

Tour = tuple[int, ...]

METRIC_AUDIT_EXHAUSTIVE_MAX = 200
METRIC_AUDIT_SAMPLES = 200_000


class WtspError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(WtspError, ValueError):
    """Malformed instance, tour or parameter."""


class NotMetricError(ValidationError):
    """A metric-only operation received a non-metric instance."""


class CapExceededError(WtspError):
    """Instance too large for an exact or enumeration-based routine."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def audit_metric(dist: np.ndarray, rtol: float = 1e-9, seed: int = 0) -> bool:
    """Check the triangle inequality ``d(a,c) <= d(a,b) + d(b,c)``.

    Exhaustive for up to 200 cities, sampled (deterministically) above that.
    """
    dist = np.asarray(dist, dtype=float)
    n = dist.shape[0]
    tol = rtol * max(1.0, float(dist.max(initial=0.0)))
    if n <= METRIC_AUDIT_EXHAUSTIVE_MAX:
        for b in range(n):
            if np.any(dist > dist[:, b, None] + dist[None, b, :] + tol):
                return False
        return True
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, n, size=(3, METRIC_AUDIT_SAMPLES))
    return bool(np.all(dist[a, c] <= dist[a, b] + dist[b, c] + tol))


def euclidean_matrix(coords: np.ndarray, rounding: str = "none") -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if rounding == "nint":
        # TSPLIB EUC_2D convention
        dist = np.floor(dist + 0.5)
    elif rounding != "none":
        raise ValidationError(f"unknown rounding mode {rounding!r}")
    return dist


@dataclass(frozen=True, eq=False)
class Instance:
    """A W-TSP instance: distances, node weights and a fixed start city.

    Exactly one of ``coords`` (Euclidean plane) or ``matrix`` (explicit
    symmetric distances) is given.  ``metric`` asserts the triangle
    inequality; for explicit matrices it is audited on construction.
    ``notes`` carries non-fatal validation flags (for example a start weight
    other than 1).
    """

    weights: np.ndarray
    coords: np.ndarray | None = None
    matrix: np.ndarray | None = None
    start: int = 0
    metric: bool = True
    rounding: str = "none"
    name: str = ""
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        n = w.shape[0]
        if n == 0:
            raise ValidationError("instance must have at least one city")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and nonnegative")
        object.__setattr__(self, "weights", _frozen(w))
        if (self.coords is None) == (self.matrix is None):
            raise ValidationError("give exactly one of coords or matrix")
        if self.coords is not None:
            xy = np.array(self.coords, dtype=float)
            if xy.shape != (n, 2):
                raise ValidationError(f"coords shape {xy.shape} does not match {n} weights")
            if not np.all(np.isfinite(xy)):
                raise ValidationError("coordinates must be finite")
            object.__setattr__(self, "coords", _frozen(xy))
            if self.rounding not in ("none", "nint"):
                raise ValidationError(f"unknown rounding mode {self.rounding!r}")
        else:
            m = np.array(self.matrix, dtype=float)
            if m.shape != (n, n):
                raise ValidationError(f"matrix shape {m.shape} does not match {n} weights")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValidationError("distances must be finite and nonnegative")
            if np.any(np.diag(m) != 0):
                raise ValidationError("distance matrix must have a zero diagonal")
            if not np.array_equal(m, m.T):
                raise ValidationError("distance matrix must be symmetric")
            if self.metric and not audit_metric(m):
                raise NotMetricError("metric flag set but triangle inequality violated")
            object.__setattr__(self, "matrix", _frozen(m))
        if not 0 <= self.start < n:
            raise ValidationError(f"start city {self.start} out of range for n={n}")
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def from_coords(cls, coords, weights=None, **kw) -> "Instance":
        coords = np.asarray(coords, dtype=float)
        if weights is None:
            weights = np.ones(len(coords))
        return cls(weights=weights, coords=coords, **kw)

    @classmethod
    def from_matrix(cls, matrix, weights=None, metric: bool = True, **kw) -> "Instance":
        matrix = np.asarray(matrix, dtype=float)
        if weights is None:
            weights = np.ones(len(matrix))
        return cls(weights=weights, matrix=matrix, metric=metric, **kw)

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    @cached_property
    def distances(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return _frozen(euclidean_matrix(self.coords, self.rounding))

    def with_weights(self, weights) -> "Instance":
        return Instance(
            weights=weights,
            coords=self.coords,
            matrix=self.matrix,
            start=self.start,
            metric=self.metric,
            rounding=self.rounding,
            name=self.name,
        )

    def relabel(self, perm: Sequence[int]) -> "Instance":
        """Return the instance with new city ``k`` being old city ``perm[k]``."""
        p = np.asarray(perm, dtype=np.intp)
        if sorted(p.tolist()) != list(range(self.n)):
            raise ValidationError("relabeling must be a permutation")
        start = int(np.flatnonzero(p == self.start)[0])
        if self.coords is not None:
            return Instance(self.weights[p], coords=self.coords[p], start=start,
                            metric=self.metric, rounding=self.rounding, name=self.name)
        return Instance(self.weights[p], matrix=self.matrix[np.ix_(p, p)], start=start,
                        metric=self.metric, name=self.name)


@dataclass(frozen=True)
class CostReport:
    weighted: float
    tsp: float
    latency: float


def as_tour(tour: Sequence[int], n: int) -> np.ndarray:
    """Validate ``tour`` as a permutation of ``range(n)``; return an index array."""
    p = np.asarray(tour)
    if p.ndim != 1 or p.shape[0] != n:
        raise ValidationError(f"tour has {p.size} entries, instance has {n} cities")
    if p.dtype.kind not in "iu":
        if not np.all(np.mod(p, 1) == 0):
            raise ValidationError("tour entries must be integers")
        p = p.astype(np.intp)
    seen = np.zeros(n, dtype=bool)
    if np.any(p < 0) or np.any(p >= n):
        raise ValidationError("tour entry out of range")
    seen[p] = True
    if not seen.all():
        raise ValidationError("tour is not a permutation")
    return p.astype(np.intp, copy=False)


def weighted_cost(instance: Instance, tour: Sequence[int]) -> float:
    """Weighted tour cost: each edge length times the weight collected so far.

    ``d(p[n-1], p[0]) * omega[n-1] + sum_i d(p[i], p[i+1]) * omega[i]`` with
    ``omega`` the prefix sums of ``w`` along the tour.
    """
    p = as_tour(tour, instance.n)
    dist = instance.distances
    omega = np.cumsum(instance.weights[p])
    legs = dist[p, np.roll(p, -1)]
    return float(legs @ omega)


def tsp_path_cost(instance: Instance, tour: Sequence[int]) -> float:
    p = as_tour(tour, instance.n)
    return float(instance.distances[p[:-1], p[1:]].sum())


def tsp_cost(instance: Instance, tour: Sequence[int]) -> float:
    p = as_tour(tour, instance.n)
    return float(instance.distances[p, np.roll(p, -1)].sum())


def latency_cost(instance: Instance, tour: Sequence[int]) -> float:
    """Sum over cities of the path distance from the first city (no return leg)."""
    p = as_tour(tour, instance.n)
    n = instance.n
    legs = instance.distances[p[:-1], p[1:]]
    return float(legs @ np.arange(n - 1, 0, -1, dtype=float))


def prefix_weights(instance: Instance, tour: Sequence[int]) -> np.ndarray:
    p = as_tour(tour, instance.n)
    return np.cumsum(instance.weights[p])


def cost_report(instance: Instance, tour: Sequence[int]) -> CostReport:
    return CostReport(
        weighted=weighted_cost(instance, tour),
        tsp=tsp_cost(instance, tour),
        latency=latency_cost(instance, tour),
    )


def reverse_tour(tour: Sequence[int]) -> Tour:
    """Traverse the cycle the other way, keeping the first city in place."""
    t = tuple(int(c) for c in tour)
    return t[:1] + t[:0:-1]


def normalize_tour(tour: Sequence[int], start: int = 0) -> Tour:
    t = tuple(int(c) for c in tour)
    try:
        k = t.index(start)
    except ValueError:
        raise ValidationError(f"start city {start} not in tour") from None
    return t[k:] + t[:k]
