"""Families of closed tours through the start city, one per city count ``k``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import CapExceededError, Instance, Tour, ValidationError, tsp_cost
from .tsp import tsp_subroutine

EXACT_KTOUR_CAP = 12

EXACT, HEURISTIC, PHANTOM, SUBROUTINE = "exact", "heuristic", "phantom", "subroutine"


@dataclass
class KTourSet:
    """``tours[k]`` visits exactly ``k`` cities starting at the start city.

    ``lengths[k]`` is the length used for selection.  It equals the cycle
    length of ``tours[k]`` except for phantom entries, whose length is
    interpolated.
    """

    n: int
    tours: dict[int, Tour] = field(default_factory=dict)
    lengths: dict[int, float] = field(default_factory=dict)
    provenance: dict[int, str] = field(default_factory=dict)

    def add(self, k: int, tour: Tour, length: float, tag: str) -> None:
        if len(tour) != k or len(set(tour)) != k:
            raise ValidationError(f"tour for k={k} visits {len(set(tour))} distinct cities")
        self.tours[k] = tuple(tour)
        self.lengths[k] = float(length)
        self.provenance[k] = tag

    @property
    def guaranteed(self) -> bool:
        return all(tag in (EXACT, SUBROUTINE) for tag in self.provenance.values())


def _cycle_length(dist: np.ndarray, tour: Tour) -> float:
    if len(tour) < 2:
        return 0.0
    t = np.asarray(tour)
    return float(dist[t, np.roll(t, -1)].sum())


def _subset_tours(dist: np.ndarray, start: int, others: np.ndarray):
    """Shortest cycle through ``{start} | S`` for every subset ``S`` of ``others``.

    Returns ``(length, order)`` where ``order(mask)`` reconstructs the cycle.
    """
    k = len(others)
    if k == 0:
        return np.zeros(1), lambda mask: [start]
    size = 1 << k
    d_oo = dist[np.ix_(others, others)]
    d_so = dist[start, others]
    path = np.full((size, k), np.inf)
    parent = np.full((size, k), -1, dtype=np.int64)
    path[1 << np.arange(k), np.arange(k)] = d_so
    masks = np.arange(size)
    pop = np.zeros(size, dtype=np.int64)
    for b in range(k):
        pop += (masks >> b) & 1
    for layer_size in range(2, k + 1):
        layer = masks[pop == layer_size]
        for j in range(k):
            sel = layer[(layer >> j) & 1 == 1]
            prev = sel ^ (1 << j)
            cand = path[prev] + d_oo[None, :, j]
            arg = np.argmin(cand, axis=1)
            path[sel, j] = cand[np.arange(len(sel)), arg]
            parent[sel, j] = arg
    closed = path + d_so[None, :]
    last = np.argmin(closed, axis=1)
    length = closed[masks, last]
    length[0] = 0.0

    def order(mask: int) -> list[int]:
        if mask == 0:
            return [start]
        seq, j = [], int(last[mask])
        while mask:
            seq.append(int(others[j]))
            nxt = int(parent[mask, j])
            mask ^= 1 << j
            j = nxt
        return [start] + seq[::-1]

    return length, order


def _groups(instance: Instance, copymap: np.ndarray | None) -> dict[int, list[int]]:
    if copymap is None:
        return {c: [c] for c in range(instance.n)}
    groups: dict[int, list[int]] = {}
    for city, orig in enumerate(np.asarray(copymap)):
        groups.setdefault(int(orig), []).append(city)
    return groups


def exact_k_tours(instance: Instance, copymap=None, cap: int = EXACT_KTOUR_CAP) -> KTourSet:
    """Optimal ``k``-city tours through the start for every ``k``.

    With ``copymap`` (from weight expansion) the search runs over original
    cities: copies of one city sit at distance zero, so an optimal ``k``-tour
    takes whole groups and truncates the last one.
    """
    groups = _groups(instance, copymap)
    if len(groups) > cap:
        raise CapExceededError(f"exact k-tours refused: {len(groups)} cities exceed cap {cap}")
    dist = instance.distances
    s = instance.start
    s_group = next(g for g, members in groups.items() if s in members)
    reps = {g: members[0] for g, members in groups.items()}
    others = np.array([g for g in sorted(groups) if g != s_group], dtype=np.intp)
    keys = sorted(groups)
    pos = {g: i for i, g in enumerate(keys)}
    rep_idx = np.array([reps[g] for g in keys])
    rep_dist = dist[np.ix_(rep_idx, rep_idx)]
    length, order = _subset_tours(rep_dist, pos[s_group], np.array([pos[g] for g in others]))
    sizes = np.array([len(groups[g]) for g in others])
    masks = np.arange(len(length))
    capacity = np.full(len(length), len(groups[s_group]))
    for b, sz in enumerate(sizes):
        capacity += ((masks >> b) & 1) * sz

    result = KTourSet(instance.n)
    for k in range(1, instance.n + 1):
        ok = capacity >= k
        best = int(np.flatnonzero(ok)[np.argmin(length[ok])])
        seq = [s] + [c for c in groups[s_group] if c != s]
        for p in order(best)[1:]:
            seq.extend(groups[keys[p]])
        tour = tuple(seq[:k])
        result.add(k, tour, _cycle_length(dist, tour), EXACT)
    return result


def nearest_insertion_k_tours(instance: Instance) -> KTourSet:
    """Grow one tour by nearest insertion; the tour after ``k`` cities is ``T_k``."""
    dist = instance.distances
    n, s = instance.n, instance.start
    tour = [s]
    in_tour = np.zeros(n, dtype=bool)
    in_tour[s] = True
    to_tour = dist[s].copy()
    result = KTourSet(n)
    result.add(1, (s,), 0.0, HEURISTIC)
    length = 0.0
    for k in range(2, n + 1):
        cand = np.where(in_tour, np.inf, to_tour)
        c = int(np.argmin(cand))
        t = np.asarray(tour)
        nxt = np.roll(t, -1)
        extra = dist[t, c] + dist[c, nxt] - dist[t, nxt]
        at = int(np.argmin(extra))
        tour.insert(at + 1, c)
        length += float(extra[at])
        in_tour[c] = True
        np.minimum(to_tour, dist[c], out=to_tour)
        result.add(k, tuple(tour), length, HEURISTIC)
    return result


def good_k_tours(
    instance: Instance,
    mode: str = "exact",
    tsp_mode: str = "christofides",
    copymap=None,
) -> KTourSet:
    """``k``-tours for every ``k``; the ``n``-tour always comes from ``tsp_subroutine``."""
    if mode == EXACT:
        ktours = exact_k_tours(instance, copymap)
    elif mode == HEURISTIC:
        ktours = nearest_insertion_k_tours(instance)
    else:
        raise ValidationError(f"unknown k-tour mode {mode!r}")
    full = tsp_subroutine(instance, tsp_mode)
    ktours.add(instance.n, full, tsp_cost(instance, full), SUBROUTINE)
    return ktours


def fill_phantoms(ktours: KTourSet) -> KTourSet:
    """Fill missing ``k`` by interpolating lengths and truncating the next larger tour."""
    n = ktours.n
    if n not in ktours.tours:
        raise ValidationError("k-tour set has no n-tour")
    out = KTourSet(n, dict(ktours.tours), dict(ktours.lengths), dict(ktours.provenance))
    if 1 not in out.tours:
        start = ktours.tours[n][0]
        out.add(1, (start,), 0.0, EXACT)
    have = sorted(out.tours)
    for k in range(2, n):
        if k in out.tours:
            continue
        lo = max(h for h in have if h < k)
        hi = min(h for h in have if h > k)
        frac = (k - lo) / (hi - lo)
        length = (1 - frac) * out.lengths[lo] + frac * out.lengths[hi]
        out.add(k, out.tours[hi][:k], length, PHANTOM)
    return out
