"""Wilcoxon-Mann-Whitney rank-sum test and Bonferroni-adjusted pairwise comparisons."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import ValidationError

EXACT_MAX = 20
ALTERNATIVES = ("less", "greater", "two-sided")


@dataclass(frozen=True)
class MannWhitneyResult:
    u: float
    pvalue: float
    method: str


def _exact_sf(ranks2: np.ndarray, n: int, r_obs2: int, alternative: str) -> float:
    """Permutation p-value of the rank sum of the first sample.

    ``ranks2`` are doubled mid-ranks (integers), so ties are handled exactly:
    ``counts[k, s]`` counts subsets of size ``k`` with doubled rank sum ``s``.
    """
    total = int(ranks2.sum())
    counts = np.zeros((n + 1, total + 1))
    counts[0, 0] = 1.0
    for r in ranks2:
        r = int(r)
        for k in range(n - 1, -1, -1):
            counts[k + 1, r:] += counts[k, : total + 1 - r]
    dist = counts[n] / counts[n].sum()
    le = dist[: r_obs2 + 1].sum()
    ge = dist[r_obs2:].sum()
    if alternative == "less":
        return float(min(1.0, le))
    if alternative == "greater":
        return float(min(1.0, ge))
    return float(min(1.0, 2 * min(le, ge)))


def mann_whitney_u(x: Sequence[float], y: Sequence[float], alternative: str = "less",
                   method: str = "auto") -> MannWhitneyResult:
    """Test whether ``x`` tends to be smaller (``less``) or larger than ``y``.

    ``u`` counts pairs with ``x_i > y_j`` (ties count one half).  ``method``
    is ``exact`` (permutation distribution, ties included), ``normal``
    (tie-corrected, continuity-corrected) or ``auto``: exact when both
    samples have at most 20 values.
    """
    if alternative not in ALTERNATIVES:
        raise ValidationError(f"alternative must be one of {ALTERNATIVES}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = len(x), len(y)
    if n == 0 or m == 0:
        raise ValidationError("both samples must be nonempty")
    ranks = rankdata(np.concatenate([x, y]))
    r_x = float(ranks[:n].sum())
    u = r_x - n * (n + 1) / 2
    if method == "auto":
        method = "exact" if max(n, m) <= EXACT_MAX else "normal"
    if method == "exact":
        ranks2 = np.rint(2 * ranks).astype(np.int64)
        return MannWhitneyResult(u, _exact_sf(ranks2, n, int(round(2 * r_x)), alternative), "exact")
    if method != "normal":
        raise ValidationError(f"unknown method {method!r}")
    big_n = n + m
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float((tie_counts**3 - tie_counts).sum()) / (big_n * (big_n - 1))
    var = n * m / 12.0 * ((big_n + 1) - tie_term)
    if var <= 0:
        return MannWhitneyResult(u, 1.0, "normal")
    sd = math.sqrt(var)
    mu = n * m / 2.0

    def phi(z: float) -> float:
        return 0.5 * math.erfc(-z / math.sqrt(2))

    p_less = phi((u - mu + 0.5) / sd)
    p_greater = 1.0 - phi((u - mu - 0.5) / sd)
    if alternative == "less":
        p = p_less
    elif alternative == "greater":
        p = p_greater
    else:
        p = 2 * min(p_less, p_greater)
    return MannWhitneyResult(u, float(min(1.0, p)), "normal")


@dataclass(frozen=True)
class Comparison:
    better: str
    worse: str
    u: float
    pvalue: float
    p_adjusted: float
    significant: bool


def pairwise_superiority(groups: Mapping[str, Sequence[float]], alpha: float = 0.05,
                         method: str = "auto") -> list[Comparison]:
    """One-sided tests "A smaller than B" for every ordered pair, Bonferroni-adjusted.

    The adjustment multiplies each p-value by the number of ordered pairs
    and caps it at 1.
    """
    names = list(groups)
    for name in names:
        if len(groups[name]) == 0:
            raise ValidationError(f"group {name!r} is empty")
    pairs = list(itertools.permutations(names, 2))
    out = []
    for a, b in pairs:
        res = mann_whitney_u(groups[a], groups[b], "less", method)
        adj = min(1.0, res.pvalue * len(pairs))
        out.append(Comparison(a, b, res.u, res.pvalue, adj, adj < alpha))
    return out
