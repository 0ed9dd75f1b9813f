"""Randomized local search over permutations with the start city pinned first."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from .core import Instance, Tour, ValidationError, as_tour, normalize_tour, tsp_cost, weighted_cost

MUTATIONS = ("inversion", "exchange", "jump")
FITNESS = ("weighted", "tsp")
_BLOCK = 100_000


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFF_FFFF_FFFF_FFFF))


def derive_seed(base: int, index: int) -> int:
    """Stream splitting rule: ``base XOR index``."""
    return (int(base) ^ int(index)) & 0xFFFF_FFFF_FFFF_FFFF


def apply_move(tour: Sequence[int], kind: str, i: int, j: int) -> Tour:
    """Apply one move at 0-based positions ``i != j``.

    inversion reverses the segment between them, exchange swaps them, jump
    removes the city at ``i`` and reinserts it at ``j``.
    """
    t = list(tour)
    if i == j:
        return tuple(t)
    if kind == "inversion":
        a, b = min(i, j), max(i, j)
        t[a:b + 1] = t[a:b + 1][::-1]
    elif kind == "exchange":
        t[i], t[j] = t[j], t[i]
    elif kind == "jump":
        t.insert(j, t.pop(i))
    else:
        raise ValidationError(f"unknown mutation {kind!r}; expected one of {MUTATIONS}")
    return tuple(t)


def draw_positions(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """``size`` uniform pairs ``i < j`` of positions from ``1..n-1``.

    With ``i < j`` a jump always moves a city towards the end of the tour.
    """
    i = rng.integers(1, n, size=size)
    j = rng.integers(1, n - 1, size=size)
    j += j >= i
    return np.sort(np.stack([i, j], axis=1), axis=1).astype(np.int64)


def mutate(tour: Sequence[int], kind: str, rng: np.random.Generator) -> Tour:
    """Random move of the given kind; position 0 never moves."""
    if kind not in MUTATIONS:
        raise ValidationError(f"unknown mutation {kind!r}; expected one of {MUTATIONS}")
    n = len(tour)
    if n < 3:
        return tuple(int(c) for c in tour)
    i, j = draw_positions(rng, n, 1)[0]
    return apply_move(tour, kind, int(i), int(j))


@numba.njit(cache=True)
def _segment(cur, out, kind, lo, hi, i, j):
    """Write positions ``lo..hi`` of the moved tour into ``out[0..hi-lo]``."""
    m = hi - lo
    for k in range(m + 1):
        out[k] = cur[lo + k]
    if kind == 0:
        for k in range(m + 1):
            out[k] = cur[hi - k]
    elif kind == 1:
        out[0] = cur[hi]
        out[m] = cur[lo]
    elif i < j:
        for k in range(m):
            out[k] = cur[lo + k + 1]
        out[m] = cur[lo]
    else:
        for k in range(m):
            out[k + 1] = cur[lo + k]
        out[0] = cur[hi]


@numba.njit(cache=True)
def _window(dist, w, cur, omega, kind, i, j, weighted, seg, new_om):
    """New cost of the edges a move can touch, i.e. edges ``lo-1..hi``.

    A move between positions ``lo < hi`` leaves every edge outside
    ``lo-1..hi`` and every prefix weight outside ``lo..hi-1`` unchanged, so
    comparing this window against the parent's is an exact comparison of
    the two tours.  ``omega`` holds the parent's prefix weights (all ones for
    the TSP objective); the offspring's window goes to ``seg`` and ``new_om``.
    """
    n = cur.shape[0]
    lo = min(i, j)
    hi = max(i, j)
    after = cur[(hi + 1) % n]
    _segment(cur, seg, kind, lo, hi, i, j)
    om = omega[lo - 1]
    new = dist[cur[lo - 1], seg[0]] * om
    for k in range(hi - lo):
        if weighted:
            om += w[seg[k]]
        new_om[k] = om
        new += dist[seg[k], seg[k + 1]] * om
    new += dist[seg[hi - lo], after] * omega[hi]
    return new


@numba.njit(cache=True)
def _prefix_contrib(dist, cur, omega, csum, start):
    """``csum[k]`` = sum of weighted edge costs before position ``k``, rebuilt from ``start``."""
    n = cur.shape[0]
    for k in range(start, n):
        csum[k + 1] = csum[k] + dist[cur[k], cur[(k + 1) % n]] * omega[k]


@numba.njit(cache=True)
def _rls_block(dist, w, cur, omega, csum, draws, kind, weighted, offset, trace_at, trace_cost):
    """Run ``len(draws)`` evaluations; returns (cost, number of trace entries)."""
    n = cur.shape[0]
    seg = np.empty(n, dtype=cur.dtype)
    new_om = np.empty(n)
    nt = 0
    last = csum[n]
    for e in range(draws.shape[0]):
        i = draws[e, 0]
        j = draws[e, 1]
        lo = min(i, j)
        hi = max(i, j)
        old = csum[hi + 1] - csum[lo - 1]
        new = _window(dist, w, cur, omega, kind, i, j, weighted, seg, new_om)
        if new <= old:
            for k in range(hi - lo + 1):
                cur[lo + k] = seg[k]
            for k in range(hi - lo):
                omega[lo + k] = new_om[k]
            _prefix_contrib(dist, cur, omega, csum, lo - 1)
            if csum[n] < last:
                trace_at[nt] = offset + e + 1
                trace_cost[nt] = csum[n]
                nt += 1
                last = csum[n]
    return csum[n], nt


def move_delta(instance: Instance, tour: Sequence[int], kind: str, i: int, j: int,
               fitness: str = "weighted") -> float:
    """Cost change of one move as evaluated inside the search loop."""
    n = instance.n
    cur = np.array(as_tour(tour, n), dtype=np.int64)
    weighted = fitness == "weighted"
    w = np.ascontiguousarray(instance.weights)
    omega = np.cumsum(w[cur]) if weighted else np.ones(n)
    dist = np.ascontiguousarray(instance.distances)
    csum = np.zeros(n + 1)
    _prefix_contrib(dist, cur, omega, csum, 0)
    lo, hi = min(i, j), max(i, j)
    new = _window(dist, w, cur, omega, MUTATIONS.index(kind), i, j, weighted,
                  np.empty(n, np.int64), np.empty(n))
    return new - (csum[hi + 1] - csum[lo - 1])


@dataclass(frozen=True)
class RlsConfig:
    fitness: str = "weighted"
    mutation: str = "inversion"
    budget: int | None = None
    seed: int = 0
    record_trace: bool = False
    time_limit: float | None = None

    def __post_init__(self) -> None:
        if self.fitness not in FITNESS:
            raise ValidationError(f"fitness must be one of {FITNESS}")
        if self.mutation not in MUTATIONS:
            raise ValidationError(f"mutation must be one of {MUTATIONS}")
        if self.budget is not None and self.budget < 1:
            raise ValidationError("budget must be at least one evaluation")

    def resolved_budget(self, n: int) -> int:
        return self.budget if self.budget is not None else 1000 * n


@dataclass(frozen=True)
class RlsResult:
    best_tour: Tour
    best_cost: float
    evaluations_used: int
    trace: list[tuple[int, float]] | None = field(default=None)


def rls(instance: Instance, config: RlsConfig) -> RlsResult:
    """Randomized local search: mutate, keep the offspring if not worse.

    Every fitness evaluation, including the initial one, counts against the
    budget.  With ``time_limit`` set the run also stops at the first block
    boundary after that many seconds.
    """
    n = instance.n
    budget = config.resolved_budget(n)
    rng = make_rng(config.seed)
    weighted = config.fitness == "weighted"
    kind = MUTATIONS.index(config.mutation)
    dist = np.ascontiguousarray(instance.distances)
    w = np.ascontiguousarray(instance.weights)
    cur = np.array(normalize_tour(rng.permutation(n), instance.start), dtype=np.int64)
    omega = np.cumsum(w[cur]) if weighted else np.ones(n)
    csum = np.zeros(n + 1)
    _prefix_contrib(dist, cur, omega, csum, 0)
    trace = [(1, float(csum[n]))]
    used = 1
    deadline = None if config.time_limit is None else time.perf_counter() + config.time_limit
    if n >= 3:
        while used < budget:
            if deadline is not None and time.perf_counter() > deadline:
                break
            size = min(_BLOCK, budget - used)
            draws = draw_positions(rng, n, size)
            at = np.empty(size, dtype=np.int64)
            costs = np.empty(size)
            _, nt = _rls_block(dist, w, cur, omega, csum, draws, kind, weighted, used, at, costs)
            if config.record_trace:
                trace.extend(zip(at[:nt].tolist(), costs[:nt].tolist()))
            used += size
    else:
        used = budget
    tour = tuple(int(c) for c in cur)
    best = weighted_cost(instance, tour) if weighted else tsp_cost(instance, tour)
    return RlsResult(tour, best, used, trace if config.record_trace else None)


def perf(cost: float, best_known_cost: float) -> float:
    """Percentage deviation of ``cost`` from the best known cost."""
    if best_known_cost <= 0:
        raise ValidationError("best known cost must be positive")
    return (cost / best_known_cost - 1.0) * 100.0
