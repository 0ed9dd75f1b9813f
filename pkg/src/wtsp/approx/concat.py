"""Concatenating k-tours into one tour for unit weights.

Appended subtours form a walk whose shortcut is a low-latency path ``pi``.
Reading that path backwards from the start gives a tour whose weighted cost
is ``L(pi) + c(pi)``, the quantity the selection rules control.  The cheaper
of the two orientations is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..core import Instance, Tour, ValidationError, weighted_cost
from .ktours import KTourSet, fill_phantoms
from .onetwo import best_orientation

B_MODES = ("grid", "random", "fixed")
SELECTORS = ("sweep", "shortest_path")


@dataclass(frozen=True)
class SweepParams:
    """Geometric sweep settings.

    ``scale`` divides all tour lengths before budgets ``2 b c**i`` are
    compared.  ``"auto"`` picks the unit so that the shortest nontrivial
    k-tour sits at the first budget, which makes the sweep independent of
    the instance's length units.
    """

    c: float = 3.59
    b_mode: str = "grid"
    b: float | None = None
    m: int = 64
    seed: int = 0
    selector: str = "sweep"
    scale: float | str = "auto"

    def __post_init__(self) -> None:
        if self.c <= 1:
            raise ValidationError("growth base c must exceed 1")
        if self.b_mode not in B_MODES:
            raise ValidationError(f"b_mode must be one of {B_MODES}")
        if self.b_mode == "fixed" and (self.b is None or self.b <= 0):
            raise ValidationError("fixed b_mode needs a positive b")
        if self.m < 1:
            raise ValidationError("grid size m must be positive")
        if self.selector not in SELECTORS:
            raise ValidationError(f"selector must be one of {SELECTORS}")

    def offsets(self) -> list[float]:
        """Values of ``b`` to try."""
        if self.b_mode == "fixed":
            return [float(self.b)]
        if self.b_mode == "random":
            u = np.random.Generator(np.random.PCG64(self.seed)).random()
            return [self.c**u]
        return [self.c ** (i / self.m) for i in range(self.m)]


def shortcut(walk: Iterable[int], instance: Instance) -> Tour:
    """Keep the first visit of every city."""
    seq = [int(c) for c in walk]
    if not seq or seq[0] != instance.start:
        raise ValidationError("walk must begin at the start city")
    seen: set[int] = set()
    tour = tuple(c for c in seq if not (c in seen or seen.add(c)))
    if len(tour) != instance.n or any(not 0 <= c < instance.n for c in tour):
        raise ValidationError("walk does not visit every city exactly")
    return tour


def _unit(lengths: dict[int, float], c: float, scale) -> float:
    if scale != "auto":
        return float(scale)
    positive = [v for v in lengths.values() if v > 0]
    if not positive:
        return 1.0
    return min(positive) / (2.0 * c)


def sweep_selection(lengths: dict[int, float], n: int, b: float, c: float, scale="auto") -> list[int]:
    """Indices ``k`` of the appended tours, ending with ``n``.

    Step ``i = 1, 2, ...`` picks the largest ``k`` with ``length <= 2 b c**i``
    while that budget stays strictly below the ``n``-tour's length.
    """
    unit = _unit(lengths, c, scale)
    norm = {k: v / unit for k, v in lengths.items()}
    ks = np.array(sorted(norm))
    vals = np.array([norm[k] for k in ks])
    chosen: list[int] = []
    i = 1
    while True:
        budget = 2.0 * b * c**i
        if not budget < norm[n]:
            break
        fits = ks[vals <= budget]
        if fits.size:
            chosen.append(int(fits.max()))
        i += 1
    chosen.append(n)
    return chosen


def shortest_path_selection(lengths: dict[int, float], n: int) -> list[int]:
    """Cheapest chain ``1 = k_0 < k_1 < ... < n`` with arc cost ``(n - (i+j)/2 + 1) c(T_j)``."""
    best = {1: 0.0}
    prev: dict[int, int] = {}
    for j in range(2, n + 1):
        if j not in lengths:
            continue
        cands = [(best[i] + (n - (i + j) / 2 + 1) * lengths[j], i) for i in best if i < j]
        best[j], prev[j] = min(cands)
    seq, k = [], n
    while k != 1:
        seq.append(k)
        k = prev[k]
    return seq[::-1]


def concat_tours(instance: Instance, ktours: KTourSet, selection: Sequence[int]) -> Tour:
    walk = [instance.start]
    for k in selection:
        walk.extend(ktours.tours[k])
    return best_orientation(instance, shortcut(walk, instance))


def concat_approximation(instance: Instance, ktours: KTourSet, params: SweepParams | None = None) -> Tour:
    params = params or SweepParams()
    n = instance.n
    if n not in ktours.tours:
        raise ValidationError("k-tour set is missing the n-tour")
    if not np.all(instance.weights == 1.0):
        raise ValidationError("concatenation expects unit weights; expand integer weights first")
    if n <= 2:
        return ktours.tours[n]
    full = fill_phantoms(ktours)
    if params.selector == "shortest_path":
        return concat_tours(instance, full, shortest_path_selection(full.lengths, n))
    best_tour, best_cost = None, np.inf
    for b in params.offsets():
        tour = concat_tours(instance, full, sweep_selection(full.lengths, n, b, params.c, params.scale))
        cost = weighted_cost(instance, tour)
        # strict: ties keep the lowest offset
        if cost < best_cost:
            best_tour, best_cost = tour, cost
    return best_tour
