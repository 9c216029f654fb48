"""Coupling degree, contributions, overall level, coordination and bands."""
import math

import numpy as np
import pytest

from oracles import coupling_reference

from lct.coupling import (
    LEVELS,
    CouplingResult,
    ccd,
    ccd_series,
    classify,
    contributions,
    coupling_degree,
    overall_level,
)
from lct.errors import (
    BothZeroError,
    OutOfRangeError,
    RegionMismatchError,
    YearMismatchError,
)
from lct.index import EntropyWeights, IndexSeries


# -- coupling degree C ---------------------------------------------------------

def test_coupling_degree_equal_positive_pair_is_one():
    assert coupling_degree(0.5, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_coupling_degree_frozen_unbalanced_pair():
    assert coupling_degree(0.8, 0.2) == pytest.approx(0.31623, abs=5e-6)


def test_coupling_degree_extreme_pair_is_zero():
    assert coupling_degree(1.0, 0.0) == 0.0


def test_coupling_degree_rejects_out_of_range():
    with pytest.raises(OutOfRangeError):
        coupling_degree(-0.1, 0.5)
    with pytest.raises(OutOfRangeError):
        coupling_degree(0.5, 1.1)


def test_coupling_degree_both_zero_warns_and_returns_zero():
    with pytest.warns(RuntimeWarning):
        assert coupling_degree(0.0, 0.0) == 0.0


def test_coupling_degree_symmetry_and_bounds():
    rng = np.random.default_rng(21)
    for _ in range(500):
        u1, u2 = rng.uniform(0.001, 1.0, size=2)
        c = coupling_degree(u1, u2)
        assert 0.0 <= c <= 1.0
        assert c == pytest.approx(coupling_degree(u2, u1), abs=1e-15)


def test_coupling_degree_is_one_iff_equal():
    rng = np.random.default_rng(22)
    for _ in range(200):
        u = rng.uniform(0.001, 1.0)
        assert coupling_degree(u, u) == pytest.approx(1.0, abs=1e-12)
        v = rng.uniform(0.001, 1.0)
        if abs(u - v) > 1e-6:
            assert coupling_degree(u, v) < 1.0 - 1e-9


# -- contributions and overall level -----------------------------------------------

def test_contributions_frozen_pair():
    alpha, beta = contributions(0.8, 0.2)
    assert (alpha, beta) == pytest.approx((0.2, 0.8), abs=1e-15)


def test_contributions_weight_the_lagging_side():
    alpha, beta = contributions(0.9, 0.1)
    assert alpha < beta  # the strong side gets the small weight


def test_contributions_reject_double_zero():
    with pytest.raises(BothZeroError):
        contributions(0.0, 0.0)


def test_overall_level_frozen_pair():
    assert overall_level(0.8, 0.2) == pytest.approx(0.32, abs=1e-12)


def test_overall_level_equals_harmonic_mean():
    rng = np.random.default_rng(23)
    for _ in range(500):
        u1, u2 = rng.uniform(0.001, 1.0, size=2)
        t = overall_level(u1, u2)
        assert abs(t - 2.0 * u1 * u2 / (u1 + u2)) <= 1e-12


# -- classification -----------------------------------------------------------------

def test_level_table_is_complete_and_ordered():
    assert len(LEVELS) == 10
    assert [lv for _, lv, _, _ in LEVELS] == list(range(1, 11))
    uppers = [u for u, _, _, _ in LEVELS]
    assert uppers == sorted(uppers)
    assert uppers[-1] == 1.0


def test_classify_named_examples():
    assert classify(0.25) == (3, "Moderate imbalance", "imbalance")
    assert classify(0.5) == (6, "Barely coordination", "coordination")
    assert classify(1.0) == (10, "Super coordination", "coordination")


def test_classify_band_edges_follow_decimal_spelling():
    assert classify(0.1)[0] == 2
    assert classify(0.3)[0] == 4  # 10*0.3 rounds below 3; edges, not int(10*d)
    assert classify(0.9)[0] == 10
    assert classify(0.0)[0] == 1
    edges = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    for k, edge in enumerate(edges):
        assert classify(edge)[0] == k + 2


def test_classify_rejects_out_of_range():
    with pytest.raises(OutOfRangeError):
        classify(-0.01)
    with pytest.raises(OutOfRangeError):
        classify(1.01)


# -- full ccd -----------------------------------------------------------------------

def test_ccd_balanced_midpoint():
    result = ccd(0.5, 0.5)
    assert result.c == pytest.approx(1.0, abs=1e-15)
    assert result.t == pytest.approx(0.5, abs=1e-15)
    assert result.d == pytest.approx(0.70711, abs=5e-6)
    assert result.level == 8
    assert result.level_name == "Mediocre coordination"


def test_ccd_perfect_pair():
    result = ccd(1.0, 1.0)
    assert result.d == pytest.approx(1.0, abs=1e-15)
    assert result.level == 10
    assert result.condition == "coordination"


def test_ccd_frozen_unbalanced_pair():
    result = ccd(0.8, 0.2)
    assert result.d == pytest.approx(0.31811, abs=5e-6)
    assert result.level == 4
    assert result.level_name == "Slight imbalance"
    assert result.condition == "imbalance"


def test_ccd_degenerate_zero_pair():
    result = ccd(0.0, 0.0)
    assert result.degenerate
    assert (result.c, result.t, result.d) == (0.0, 0.0, 0.0)
    assert (result.alpha, result.beta) == (0.5, 0.5)
    assert result.level == 1


def test_ccd_matches_reference_chain():
    rng = np.random.default_rng(24)
    for _ in range(300):
        u1, u2 = rng.uniform(0.001, 1.0, size=2)
        ref = coupling_reference(u1, u2)
        result = ccd(u1, u2)
        for name in ("c", "alpha", "beta", "t", "d"):
            assert getattr(result, name) == pytest.approx(ref[name], rel=1e-12)
        assert 0.0 <= result.d <= 1.0


def test_ccd_d_is_between_harmonic_mean_and_coupling():
    # D = sqrt(C*T) is a geometric mean, so it sits between its factors.
    rng = np.random.default_rng(25)
    for _ in range(200):
        u1, u2 = rng.uniform(0.001, 1.0, size=2)
        r = ccd(u1, u2)
        assert min(r.c, r.t) - 1e-12 <= r.d <= max(r.c, r.t) + 1e-12


# -- series pairing ------------------------------------------------------------------

def series(region, years, values):
    return IndexSeries(
        region=region,
        years=tuple(years),
        values=np.asarray(values, dtype=float),
        weights=EntropyWeights(
            weights=np.array([1.0]),
            entropies=np.array([0.5]),
            contributions=np.zeros((len(values), 1)),
        ),
        method="improved",
    )


def test_ccd_series_pairs_years():
    te = series("a", (2000, 2001), [0.5, 0.8])
    tcde = series("a", (2000, 2001), [0.5, 0.2])
    results = ccd_series(te, tcde)
    assert len(results) == 2
    assert results[0].d == pytest.approx(0.70711, abs=5e-6)
    assert results[1].d == pytest.approx(0.31811, abs=5e-6)


def test_ccd_series_identical_series_are_fully_coupled():
    te = series("a", (2000, 2001, 2002), [0.3, 0.5, 0.9])
    results = ccd_series(te, te)
    for r, u in zip(results, (0.3, 0.5, 0.9)):
        assert r.c == pytest.approx(1.0, abs=1e-12)
        assert r.d == pytest.approx(math.sqrt(u), rel=1e-12)


def test_ccd_series_rejects_region_and_year_mismatch():
    te = series("a", (2000, 2001), [0.5, 0.8])
    with pytest.raises(RegionMismatchError):
        ccd_series(te, series("b", (2000, 2001), [0.5, 0.8]))
    with pytest.raises(YearMismatchError):
        ccd_series(te, series("a", (2000, 2002), [0.5, 0.8]))


def test_coupling_result_is_frozen():
    result = ccd(0.4, 0.6)
    with pytest.raises(AttributeError):
        result.d = 0.0
    assert isinstance(result, CouplingResult)
