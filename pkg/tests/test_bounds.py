import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from codedcache.bounds import (
    LinearBound,
    achievable_curves,
    achievable_envelope,
    all_bounds,
    comparison_table_row,
    cutset_bound,
    envelope_curve,
    exact_segments,
    bridge_rate,
    lower_envelope,
    theorem1_bound,
    theorem2_bound,
    theorem2_valid,
)
from codedcache.model import CaseTag, DomainError, NetworkConfig

from oracles import brute_envelope

F = Fraction
ALL = [(n, k) for k in range(1, 13) for n in range(1, k + 1)]


def cfg(n, k):
    return NetworkConfig(n, k)


class TestTheoremBounds:
    @pytest.mark.parametrize(
        "n,k,abc", [(3, 4, (8, 4, 11)), (4, 4, (12, 4, 15)), (4, 6, (18, 6, 23)), (4, 5, (15, 5, 19)), (5, 6, (24, 6, 29))]
    )
    def test_first(self, n, k, abc):
        assert theorem1_bound(cfg(n, k)).coefficients == abc

    @pytest.mark.parametrize("n,k,abc", [(2, 4, (8, 6, 11)), (2, 5, (15, 10, 19)), (3, 7, (35, 14, 41))])
    def test_second(self, n, k, abc):
        assert theorem2_bound(cfg(n, k)).coefficients == abc

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            theorem1_bound(cfg(2, 4))
        with pytest.raises(DomainError):
            theorem2_bound(cfg(3, 4))

    def test_single_file_coefficients(self):
        b = theorem2_bound(cfg(1, 3))
        assert b.coefficients == (3, 6, 5) and b.b > 0
        # ... but the inequality fails at the achievable point (M, R) = (1, 0)
        assert b.a * 1 + b.b * 0 < b.c
        assert not theorem2_valid(cfg(1, 3))
        assert "theorem2" not in {x.origin for x in all_bounds(cfg(1, 3))}

    def test_boundary_collapse(self):
        # at odd-K boundary the second form equals the first
        for n, k in [(2, 3), (3, 5), (4, 7)]:
            assert theorem2_bound(cfg(n, k), override=True).same_inequality(theorem1_bound(cfg(n, k)))

    def test_linear_bound_validation(self):
        with pytest.raises(DomainError):
            LinearBound(1, 0, 1)
        assert LinearBound(8, 4, 11).normalized().coefficients == (2, 1, F(11, 4))


class TestCutset:
    def test_examples(self):
        assert lower_envelope(cutset_bound(cfg(3, 4)), F(3, 8)) == F(15, 8)
        assert lower_envelope(cutset_bound(cfg(2, 4)), F(0)) == 2

    @pytest.mark.parametrize("n,k", [(n, k) for n, k in ALL if n >= 2 and (n, k) != (2, 2)])
    def test_table_column(self, n, k):
        m = F(n, k * (n - 1))
        assert lower_envelope(cutset_bound(cfg(n, k)), m) == n - F(n * n, (n - 1) * k)

    def test_table_column_disagrees_at_22(self):
        # the s = 1 cut dominates there (recorded discrepancy)
        assert lower_envelope(cutset_bound(cfg(2, 2)), F(1)) == F(1, 2)
        assert comparison_table_row(cfg(2, 2)).cut_set == 0


class TestAchievable:
    def test_bridge_points_34(self):
        bridge = next(c for c in achievable_curves(cfg(3, 4)) if c.name == "bridge")
        assert bridge.breakpoints == ((F(1, 4), F(9, 4)), (F(3, 8), F(2)))
        assert bridge.note == ""

    def test_24(self):
        c = cfg(2, 4)
        bridge = next(x for x in achievable_curves(c) if x.name == "bridge")
        assert bridge.note == "optimal only for Case I"
        assert bridge_rate(c, F(1, 2)) == F(5, 4)
        # the best achievable point at M = 1/2 is the memory-sharing value
        assert achievable_envelope(c).evaluate(F(1, 2)) == F(11, 9)

    def test_yu_points_34(self):
        yu = next(x for x in achievable_curves(cfg(3, 4)) if x.name == "yu")
        assert yu.breakpoints == ((0, 3), (F(3, 4), F(3, 2)), (F(3, 2), F(2, 3)), (F(9, 4), F(1, 4)), (3, 0))

    @pytest.mark.parametrize("n,k", ALL)
    def test_curves_convex(self, n, k):
        for c in achievable_curves(cfg(n, k)) + [achievable_envelope(cfg(n, k))]:
            assert c.is_convex_nonincreasing(), c.name
        env = envelope_curve(all_bounds(cfg(n, k)), F(0), F(n))
        assert env.is_convex_nonincreasing()


class TestEnvelope:
    def test_examples(self):
        c = cfg(3, 4)
        assert lower_envelope([theorem1_bound(c)] + cutset_bound(c), F(3, 8)) == 2
        c = cfg(2, 4)
        assert lower_envelope([theorem2_bound(c)] + cutset_bound(c), F(1, 2)) == F(7, 6)
        b = LinearBound(1, 2, 3)
        assert envelope_curve([b], F(0), F(1)).breakpoints == ((0, F(3, 2)), (1, 1))

    def test_random_sets_against_grid(self):
        rng = random.Random(20261014)
        for _ in range(100):
            bounds = [
                LinearBound(F(rng.randint(0, 20), rng.randint(1, 6)), F(rng.randint(1, 9), rng.randint(1, 4)), F(rng.randint(-5, 30), rng.randint(1, 5)))
                for _ in range(rng.randint(1, 7))
            ]
            hi = F(rng.randint(1, 8))
            curve = envelope_curve(bounds, F(0), hi)
            grid = [hi * F(j, 64) for j in range(65)]
            triples = [b.coefficients for b in bounds]
            for m in grid:
                assert curve.evaluate(m) == brute_envelope(triples, m) == lower_envelope(bounds, m)
            assert curve.is_convex_nonincreasing() or any(b.a < 0 for b in bounds)

    @given(st.lists(st.tuples(st.fractions(0, 10), st.fractions(F(1, 10), 5), st.fractions(-5, 10)), min_size=1, max_size=6), st.fractions(0, 3))
    def test_envelope_curve_exact_anywhere(self, coeffs, m):
        bounds = [LinearBound(*c) for c in coeffs]
        assert envelope_curve(bounds, F(0), F(3)).evaluate(m) == brute_envelope(coeffs, m)


class TestSegments:
    def test_34(self):
        segs = exact_segments(cfg(3, 4))
        seg = next(s for s in segs if (s.lo, s.hi) == (F(1, 4), F(3, 8)))
        assert seg.status == "exact" and seg.line == (F(11, 4), F(-2))
        assert seg.lower_origin.startswith("theorem1") or "theorem1" in seg.lower_origin

    def test_24_bracket(self):
        segs = exact_segments(cfg(2, 4))
        seg = next(s for s in segs if (s.lo, s.hi) == (F(1, 4), F(1, 2)))
        assert seg.status == "gap"
        assert seg.lower == (F(11, 6), F(-4, 3))
        assert seg.upper == (F(16, 9), F(-10, 9))
        # the alternative slope -5/9 does not pass through the marked point (1/4, 3/2)
        assert F(16, 9) - F(5, 9) * F(1, 4) != F(3, 2)

    @pytest.mark.parametrize("n,k", ALL)
    def test_mn_range_exact(self, n, k):
        lo = F(n * (k - 1), k)
        for s in exact_segments(cfg(n, k)):
            if s.lo >= lo:
                assert s.status == "exact"
                assert s.line == (1, F(-1, n))

    @pytest.mark.parametrize("n,k", [(n, k) for n, k in ALL if cfg(n, k).case == CaseTag.CASE_I and n >= 2])
    def test_case1_exact_ranges(self, n, k):
        segs = exact_segments(cfg(n, k))
        hi = F(n, k * (n - 1))
        for s in segs:
            if s.hi <= hi:
                assert s.status == "exact", (s.lo, s.hi)


@pytest.mark.parametrize("n,k", [(n, k) for k in range(1, 9) for n in range(1, k + 1)])
def test_sandwich_grid(n, k):
    c = cfg(n, k)
    bounds = all_bounds(c)
    up = achievable_envelope(c)
    segs = exact_segments(c)
    for j in range(0, 4 * k * n + 1):
        m = F(j, 4 * k)
        lo = lower_envelope(bounds, m)
        assert lo <= up.evaluate(m)
        for s in segs:
            if s.status == "exact" and s.lo <= m <= s.hi:
                assert lo == up.evaluate(m)


@pytest.mark.parametrize("n,k", [(n, k) for n, k in ALL if cfg(n, k).case == CaseTag.CASE_I and n >= 2])
def test_first_bound_meets_bridge_line(n, k):
    c = cfg(n, k)
    b = theorem1_bound(c)
    lo, hi = F(1, k), F(n, k * (n - 1))
    for j in range(11):
        m = lo + (hi - lo) * F(j, 10)
        assert b.rate_at(m) == bridge_rate(c, m)


@pytest.mark.parametrize("n,k", [(n, k) for n, k in ALL if n >= 2])
def test_comparison_rows(n, k):
    c = cfg(n, k)
    row = comparison_table_row(c)
    m = F(n, k * (n - 1))
    cut = n - F(n * n, (n - 1) * k)
    assert row.memory == m and row.cut_set == cut
    if c.case == CaseTag.CASE_I:
        assert row.new_bound == cut + F(1, k * (n - 1))
        assert row.prior_best == cut + F(1, k * (n - 1)) * (n - k + F(k, n))
        assert row.new_bound - row.cut_set == F(1, k * (n - 1))
    else:
        assert row.new_bound == n - F(n * n, k * (n - 1)) + F(2, k * (n - 1) * (k + 3 - 2 * n))
    assert row.computed_new_bound == row.new_bound
    assert row.new_bound > row.cut_set


def test_comparison_examples():
    assert comparison_table_row(cfg(3, 4)).new_bound == 2
    assert comparison_table_row(cfg(2, 4)).new_bound == F(7, 6)
    with pytest.raises(DomainError):
        comparison_table_row(cfg(1, 3))
