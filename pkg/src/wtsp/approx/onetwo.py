"""Orientation choice for tours, and the bookkeeping behind it on {1,2} distances."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..core import Instance, Tour, as_tour, reverse_tour, weighted_cost


def best_orientation(instance: Instance, tour: Sequence[int]) -> Tour:
    """The cheaper of ``tour`` and its reversal by weighted cost; ties keep ``tour``."""
    fwd = tuple(int(c) for c in tour)
    rev = reverse_tour(fwd)
    if weighted_cost(instance, rev) < weighted_cost(instance, fwd):
        return rev
    return fwd


def two_edge_addition(instance: Instance, tour: Sequence[int]) -> tuple[float, int]:
    """Extra unit-weight cost ``R`` caused by the 2-edges of ``tour``, and their count ``k``.

    The edge leaving position ``i`` (1-based, the closing edge at ``n``) carries
    weight ``i``; a 2-edge there adds ``i`` over a 1-edge.  The reversed tour
    moves every edge from position ``i`` to ``n + 1 - i`` (the closing edge
    becomes the first), so the reversal's addition is ``k (n + 1) - R``.
    """
    p = as_tour(tour, instance.n)
    legs = instance.distances[p, np.roll(p, -1)]
    twos = np.flatnonzero(np.isclose(legs, 2.0))
    return float((twos + 1).sum()), int(twos.size)
