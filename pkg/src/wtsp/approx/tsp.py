"""Classical TSP tours used as building blocks: double tree and Christofides."""

from __future__ import annotations

import logging
from collections import defaultdict

import numpy as np

from ..core import Instance, NotMetricError, Tour, ValidationError

log = logging.getLogger(__name__)

EXACT_MATCHING_MAX = 12
TSP_MODES = ("double_tree", "christofides")


def minimum_spanning_tree(dist: np.ndarray, root: int = 0) -> np.ndarray:
    """Prim's algorithm on a dense matrix; returns ``parent`` (``-1`` at the root).

    Zero-length edges are legitimate tree edges here (copied cities), which
    is why the scipy sparse routine is not used.
    """
    n = len(dist)
    parent = np.full(n, -1, dtype=np.intp)
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[root] = 0.0
    for _ in range(n):
        cand = np.where(in_tree, np.inf, best)
        u = int(np.argmin(cand))
        in_tree[u] = True
        closer = ~in_tree & (dist[u] < best)
        best[closer] = dist[u, closer]
        parent[closer] = u
    return parent


def _children(parent: np.ndarray) -> dict[int, list[int]]:
    kids: dict[int, list[int]] = defaultdict(list)
    for v, p in enumerate(parent):
        if p >= 0:
            kids[int(p)].append(v)
    return kids


def double_tree_tour(instance: Instance) -> Tour:
    """Preorder walk of the MST from the start city (a 2-approximation)."""
    parent = minimum_spanning_tree(instance.distances, instance.start)
    kids = _children(parent)
    order, stack = [], [instance.start]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(kids[v]))
    return tuple(order)


def _exact_matching(nodes: list[int], dist: np.ndarray) -> list[tuple[int, int]]:
    m = len(nodes)
    sub = dist[np.ix_(nodes, nodes)]
    full = (1 << m) - 1
    cost = {full: 0.0}
    choice: dict[int, int] = {}
    # masks are "already matched" sets; fill from full downwards
    for mask in range(full - 1, -1, -1):
        if bin(mask).count("1") % 2:
            continue
        i = next(b for b in range(m) if not mask >> b & 1)
        best, arg = np.inf, -1
        for j in range(i + 1, m):
            if mask >> j & 1:
                continue
            c = sub[i, j] + cost[mask | 1 << i | 1 << j]
            if c < best:
                best, arg = c, j
        cost[mask] = best
        choice[mask] = arg
    pairs, mask = [], 0
    while mask != full:
        i = next(b for b in range(m) if not mask >> b & 1)
        j = choice[mask]
        pairs.append((nodes[i], nodes[j]))
        mask |= 1 << i | 1 << j
    return pairs


def _greedy_matching(nodes: list[int], dist: np.ndarray) -> list[tuple[int, int]]:
    idx = np.array(nodes)
    sub = dist[np.ix_(idx, idx)]
    iu, ju = np.triu_indices(len(nodes), k=1)
    order = np.argsort(sub[iu, ju], kind="stable")
    used = np.zeros(len(nodes), dtype=bool)
    pairs = []
    for e in order:
        a, b = iu[e], ju[e]
        if not used[a] and not used[b]:
            used[a] = used[b] = True
            pairs.append((nodes[a], nodes[b]))
    return pairs


def _euler_circuit(adj: dict[int, list[int]], start: int) -> list[int]:
    adj = {v: list(nb) for v, nb in adj.items()}
    stack, circuit = [start], []
    while stack:
        v = stack[-1]
        if adj.get(v):
            u = adj[v].pop()
            adj[u].remove(v)
            stack.append(u)
        else:
            circuit.append(stack.pop())
    return circuit[::-1]


def christofides_tour(instance: Instance) -> tuple[Tour, bool]:
    """Christofides' construction.

    Returns the tour and whether the matching was exact; with a greedy
    matching (more than ``EXACT_MATCHING_MAX`` odd vertices) the 1.5 bound
    no longer applies.
    """
    dist = instance.distances
    s = instance.start
    if instance.n <= 3:
        return (s,) + tuple(c for c in range(instance.n) if c != s), True
    parent = minimum_spanning_tree(dist, s)
    adj: dict[int, list[int]] = defaultdict(list)
    for v, p in enumerate(parent):
        if p >= 0:
            adj[v].append(int(p))
            adj[int(p)].append(v)
    odd = [v for v in range(instance.n) if len(adj[v]) % 2]
    exact = len(odd) <= EXACT_MATCHING_MAX
    pairs = _exact_matching(odd, dist) if exact else _greedy_matching(odd, dist)
    if not exact:
        log.debug("greedy matching on %d odd vertices", len(odd))
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort(reverse=True)
    walk = _euler_circuit(adj, s)
    seen: set[int] = set()
    tour = [c for c in walk if not (c in seen or seen.add(c))]
    return tuple(tour), exact


def tsp_subroutine(instance: Instance, mode: str = "christofides") -> Tour:
    """A Hamiltonian tour from the start city, built by ``mode``."""
    if not instance.metric:
        raise NotMetricError("TSP subroutine requires a metric instance")
    if mode == "double_tree":
        return double_tree_tour(instance)
    if mode == "christofides":
        return christofides_tour(instance)[0]
    raise ValidationError(f"unknown TSP mode {mode!r}; expected one of {TSP_MODES}")
