"""Exact solvers for small instances.

All three objectives share one subset dynamic program.  The cost of the edge
leaving the ``i``-th visited city depends only on the *set* of cities visited
so far (its total weight for W-TSP, its size for the latency problem), so the
state ``(visited set, current city)`` is sufficient.

The DP runs backwards ("cost to finish from here") so that the optimal tour
can be read off forwards, choosing the smallest next city among ties.  That
yields the lexicographically smallest optimal tour, the same tie-break the
brute-force enumeration uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import CapExceededError, Instance, Tour, weighted_cost

BRUTE_FORCE_CAP = 11
HELD_KARP_CAP = 22
_CHUNK = 50_000


@dataclass(frozen=True)
class ExactResult:
    tour: Tour
    cost: float
    nodes_expanded: int


def _tie_tol(dist: np.ndarray, total_weight: float) -> float:
    return 1e-9 * max(1.0, float(dist.max(initial=0.0)) * max(1.0, total_weight) * len(dist))


def brute_force_wtsp(instance: Instance, cap: int = BRUTE_FORCE_CAP) -> ExactResult:
    """Enumerate all ``(n-1)!`` tours from the start city."""
    n = instance.n
    if n > cap:
        raise CapExceededError(f"brute force refused: n={n} exceeds cap {cap}")
    s = instance.start
    if n <= 2:
        tour = (s,) + tuple(c for c in range(n) if c != s)
        return ExactResult(tour, weighted_cost(instance, tour), 1)
    dist = instance.distances
    w = instance.weights
    rest = [c for c in range(n) if c != s]
    perms = itertools.permutations(rest)
    best_cost, best_tour, seen = np.inf, None, 0
    tol = _tie_tol(dist, float(w.sum()))
    while True:
        chunk = list(itertools.islice(perms, _CHUNK))
        if not chunk:
            break
        seen += len(chunk)
        body = np.array(chunk, dtype=np.intp)
        p = np.hstack([np.full((len(body), 1), s, dtype=np.intp), body])
        omega = np.cumsum(w[p], axis=1)
        legs = dist[p, np.roll(p, -1, axis=1)]
        costs = np.einsum("ij,ij->i", legs, omega)
        k = int(np.argmin(costs))
        # chunks arrive in lexicographic order: only a strictly better cost
        # displaces the incumbent
        if costs[k] < best_cost - tol:
            k = int(np.flatnonzero(costs <= costs[k] + tol)[0])
            best_cost, best_tour = float(costs[k]), tuple(int(c) for c in p[k])
    return ExactResult(best_tour, best_cost, seen)


def _subset_dp(
    dist: np.ndarray,
    start: int,
    edge_mult: np.ndarray,
    close_mult: float,
    tol: float,
) -> tuple[Tour, float, int]:
    """Backward DP over subsets of the non-start cities.

    ``edge_mult[m]`` multiplies the edge leaving the current city when the
    visited set is ``{start} | m``; ``close_mult`` multiplies the return edge.
    """
    n = len(dist)
    others = np.array([c for c in range(n) if c != start], dtype=np.intp)
    k = n - 1
    full = (1 << k) - 1
    d_oo = dist[np.ix_(others, others)]
    d_so = dist[start, others]
    masks = np.arange(1 << k)
    popcount = np.zeros(1 << k, dtype=np.int64)
    for b in range(k):
        popcount += (masks >> b) & 1
    # finish[m, j]: cheapest completion with visited {start} | m, standing at j
    finish = np.full((1 << k, k), np.inf)
    finish[full, :] = close_mult * d_so
    for size in range(k - 1, 0, -1):
        layer = masks[popcount == size]
        for nxt in range(k):
            bit = 1 << nxt
            sel = layer[(layer & bit) == 0]
            if sel.size == 0:
                continue
            cand = edge_mult[sel, None] * d_oo[None, :, nxt] + finish[sel | bit, nxt][:, None]
            np.minimum(finish[sel], cand, out=cand)
            finish[sel] = cand
        # only cities inside the mask can be the current one
        inside = ((layer[:, None] >> np.arange(k)[None, :]) & 1).astype(bool)
        block = finish[layer]
        block[~inside] = np.inf
        finish[layer] = block
    first = edge_mult[0] * d_so + finish[1 << np.arange(k), np.arange(k)]
    best = float(first.min())

    tour = [start]
    j = int(np.flatnonzero(first <= best + tol)[0])
    mask = 1 << j
    tour.append(int(others[j]))
    while mask != full:
        free = [c for c in range(k) if not mask & (1 << c)]
        vals = np.array([edge_mult[mask] * d_oo[j, c] + finish[mask | (1 << c), c] for c in free])
        target = float(finish[mask, j])
        pick = free[int(np.flatnonzero(vals <= target + tol)[0])]
        mask |= 1 << pick
        j = pick
        tour.append(int(others[j]))
    return tuple(tour), best, int((1 << k) * k)


def _check_cap(n: int, cap: int) -> None:
    if n > cap:
        raise CapExceededError(f"subset DP refused: n={n} exceeds cap {cap}")


def _subset_weights(weights: np.ndarray, start: int) -> np.ndarray:
    others = [c for c in range(len(weights)) if c != start]
    k = len(others)
    acc = np.full(1 << k, float(weights[start]))
    for b, c in enumerate(others):
        # masks containing bit b, built incrementally
        idx = np.arange(1 << k)
        acc[(idx >> b) & 1 == 1] += weights[c]
    return acc


def held_karp_wtsp(instance: Instance, cap: int = HELD_KARP_CAP) -> ExactResult:
    n = instance.n
    _check_cap(n, cap)
    if n <= 2:
        return brute_force_wtsp(instance)
    dist, w, s = instance.distances, instance.weights, instance.start
    mult = _subset_weights(w, s)
    tour, cost, states = _subset_dp(dist, s, mult, float(w.sum()), _tie_tol(dist, float(w.sum())))
    return ExactResult(tour, cost, states)


def exact_tsp(instance: Instance, cap: int = HELD_KARP_CAP) -> ExactResult:
    """Shortest Hamiltonian cycle; ``cost`` is the cycle length."""
    unit_start = np.zeros(instance.n)
    unit_start[instance.start] = 1.0
    return held_karp_wtsp(instance.with_weights(unit_start), cap)


def exact_mlp(instance: Instance, cap: int = HELD_KARP_CAP) -> ExactResult:
    """Minimum latency path from the start city; ``cost`` is the total latency."""
    n = instance.n
    _check_cap(n, cap)
    s = instance.start
    if n <= 2:
        tour = (s,) + tuple(c for c in range(n) if c != s)
        cost = float(instance.distances[s, tour[-1]]) if n == 2 else 0.0
        return ExactResult(tour, cost, 1)
    k = n - 1
    masks = np.arange(1 << k)
    visited = np.ones(1 << k)
    for b in range(k):
        visited += (masks >> b) & 1
    mult = n - visited
    dist = instance.distances
    tour, cost, states = _subset_dp(dist, s, mult, 0.0, _tie_tol(dist, float(n)))
    return ExactResult(tour, cost, states)
