import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import mannwhitneyu

from wtsp.core import ValidationError
from wtsp.stats import mann_whitney_u, pairwise_superiority


def enumerate_p(x, y, alternative):
    """Permutation p-value by listing every split of the pooled sample."""
    pooled = np.r_[x, y]
    n = len(x)

    # wins[a, b]: 1 if a beats b, 1/2 on a tie
    wins = (pooled[:, None] > pooled[None, :]) + 0.5 * (pooled[:, None] == pooled[None, :])

    def u_of(idx):
        mask = np.zeros(len(pooled), dtype=bool)
        mask[list(idx)] = True
        return wins[np.ix_(mask, ~mask)].sum()

    u_obs = u_of(range(n))
    us = np.array([u_of(idx) for idx in itertools.combinations(range(len(pooled)), n)])
    le, ge = np.mean(us <= u_obs + 1e-12), np.mean(us >= u_obs - 1e-12)
    return {"less": le, "greater": ge, "two-sided": min(1.0, 2 * min(le, ge))}[alternative]


@pytest.mark.parametrize("alternative", ["less", "greater", "two-sided"])
def test_exact_matches_enumeration(alternative):
    rng = np.random.default_rng(0)
    for _ in range(40):
        n, m = rng.integers(1, 9, 2)
        # small integer values force ties
        x = rng.integers(0, 4, n).astype(float)
        y = rng.integers(0, 4, m).astype(float)
        res = mann_whitney_u(x, y, alternative, "exact")
        assert res.method == "exact"
        assert res.pvalue == pytest.approx(enumerate_p(x, y, alternative), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=15),
       st.lists(st.floats(-100, 100), min_size=1, max_size=15),
       st.sampled_from(["less", "greater", "two-sided"]))
def test_exact_matches_scipy_without_ties(x, y, alternative):
    if len(set(x + y)) < len(x + y):
        return
    ours = mann_whitney_u(x, y, alternative, "exact")
    ref = mannwhitneyu(x, y, alternative=alternative, method="exact")
    assert ours.u == ref.statistic
    assert ours.pvalue == pytest.approx(ref.pvalue, abs=1e-10)


def test_normal_matches_scipy_with_ties():
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = rng.integers(0, 10, 30).astype(float)
        y = rng.integers(0, 12, 35).astype(float)
        for alt in ("less", "greater", "two-sided"):
            ours = mann_whitney_u(x, y, alt)
            ref = mannwhitneyu(x, y, alternative=alt, method="asymptotic", use_continuity=True)
            assert ours.method == "normal"
            assert ours.pvalue == pytest.approx(ref.pvalue, abs=1e-12)


def test_auto_switch():
    x, y = np.arange(20.0), np.arange(20.0) + 0.5
    assert mann_whitney_u(x, y).method == "exact"
    assert mann_whitney_u(np.arange(21.0), y).method == "normal"


def test_all_tied():
    assert mann_whitney_u([1.0] * 25, [1.0] * 25).pvalue == 1.0
    assert mann_whitney_u([1.0] * 5, [1.0] * 5).pvalue == 1.0


def test_errors():
    with pytest.raises(ValidationError):
        mann_whitney_u([], [1.0])
    with pytest.raises(ValidationError):
        mann_whitney_u([1.0], [2.0], alternative="below")
    with pytest.raises(ValidationError):
        mann_whitney_u([1.0], [2.0], method="bootstrap")


class TestPairwise:
    def test_identical_groups(self):
        v = list(np.random.default_rng(2).normal(size=30))
        comps = pairwise_superiority({"a": v, "b": list(v)})
        assert not any(c.significant for c in comps)

    def test_separated_groups(self):
        a = list(np.arange(30.0))
        b = list(np.arange(30.0) + 100)
        comps = {(c.better, c.worse): c for c in pairwise_superiority({"a": a, "b": b})}
        assert comps["a", "b"].significant and comps["a", "b"].p_adjusted < 0.05
        assert not comps["b", "a"].significant

    def test_bonferroni_factor_and_cap(self):
        groups = {"a": [1.0, 2.0, 3.0], "b": [2.5, 3.5, 4.5], "c": [0.0, 5.0, 6.0]}
        comps = pairwise_superiority(groups)
        assert len(comps) == 6
        for c in comps:
            assert c.p_adjusted == min(1.0, 6 * c.pvalue)

    def test_empty_group(self):
        with pytest.raises(ValidationError):
            pairwise_superiority({"a": [1.0], "b": []})
