"""Reducing integer weights to unit weights by copying cities."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..core import Instance, Tour, ValidationError, as_tour
from .concat import SweepParams, concat_approximation
from .ktours import good_k_tours

EXPANSION_CAP = 4000


def expand_weights(instance: Instance, cap: int = EXPANSION_CAP) -> tuple[Instance, np.ndarray]:
    """Replace city ``i`` by ``w(i)`` unit-weight copies at mutual distance zero.

    Returns the expanded instance and ``copymap`` with ``copymap[c]`` the
    original city of copy ``c``.  Copies of one city are numbered
    consecutively and the first copy of the start city is the new start.
    """
    w = instance.weights
    if np.any(w < 1) or np.any(w != np.round(w)):
        raise ValidationError("weight expansion needs integer weights >= 1")
    counts = w.astype(np.int64)
    if counts.sum() > cap:
        raise ValidationError(f"expansion to {counts.sum()} cities exceeds cap {cap}")
    copymap = np.repeat(np.arange(instance.n), counts)
    start = int(np.flatnonzero(copymap == instance.start)[0])
    ones = np.ones(len(copymap))
    if instance.coords is not None:
        expanded = Instance(ones, coords=instance.coords[copymap], start=start,
                            metric=instance.metric, rounding=instance.rounding)
    else:
        expanded = Instance(ones, matrix=instance.matrix[np.ix_(copymap, copymap)], start=start,
                            metric=instance.metric)
    copymap.setflags(write=False)
    return expanded, copymap


def block_substitute(tour: Sequence[int], copymap: np.ndarray) -> Tour:
    """Translate an original tour to the expanded instance (each city becomes its copy block)."""
    blocks: dict[int, list[int]] = {}
    for c, orig in enumerate(copymap):
        blocks.setdefault(int(orig), []).append(c)
    return tuple(c for city in tour for c in blocks[int(city)])


def collapse_tour(expanded_tour: Sequence[int], copymap: np.ndarray, original: Instance) -> Tour:
    """Translate an expanded tour back, placing each city at its last copy.

    The start city stays first.  On metric instances with ``w(start) = 1``
    the result never costs more than the expanded tour.
    """
    cm = np.asarray(copymap)
    p = as_tour(expanded_tour, len(cm))
    if cm.shape != (len(p),) or set(cm.tolist()) != set(range(original.n)):
        raise ValidationError("copymap inconsistent with tour or original instance")
    s = original.start
    if cm[p[0]] != s:
        raise ValidationError("expanded tour must begin with a copy of the start city")
    seen = {s}
    order = []
    for c in p[::-1]:
        city = int(cm[c])
        if city not in seen:
            seen.add(city)
            order.append(city)
    return (s,) + tuple(order[::-1])


def approximate_bounded_weights(
    instance: Instance,
    params: SweepParams | None = None,
    kmode: str = "exact",
    tsp_mode: str = "christofides",
) -> Tour:
    """Expand weights, run the unit-weight concatenation, collapse the result."""
    expanded, copymap = expand_weights(instance)
    ktours = good_k_tours(expanded, kmode, tsp_mode, copymap=copymap if kmode == "exact" else None)
    tour = concat_approximation(expanded, ktours, params)
    return collapse_tour(tour, copymap, instance)
