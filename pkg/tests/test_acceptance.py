"""Acceptance checks, one group per criterion; the run ends with a PASS/FAIL line for each.

Run alone with ``pytest tests/test_acceptance.py -v`` (or ``python tests/test_acceptance.py``).
"""

import time
from fractions import Fraction
from math import comb

import pytest

from codedcache.bounds import (
    achievable_envelope,
    all_bounds,
    comparison_table_row,
    exact_segments,
    lower_envelope,
    theorem1_bound,
    theorem2_bound,
)
from codedcache.lp import DualCertificate, build_problem, solve_min_rate, verify_certificate
from codedcache.model import CaseTag, NetworkConfig, covering_demands, demand_family
from codedcache.proof import verify_chain
from codedcache.proof.builders import build_theorem1_chain, build_theorem2_chain, lemma1_chain
from codedcache.proof.convert import chain_to_certificate
from codedcache.schemes import mn_memory, simulate

import test_bounds
import test_model

F = Fraction
SIM_SET = [(2, 3), (2, 4), (3, 4), (2, 5), (3, 5), (4, 6)]
UP_TO_7 = [(n, k) for k in range(1, 8) for n in range(1, k + 1)]


def cfg(n, k):
    return NetworkConfig(n, k)


# ---------------------------------------------------------------- 1


@pytest.mark.criterion(1)
def test_lemma_coefficients_from_theorems():
    t0 = time.perf_counter()
    first = theorem1_bound(cfg(3, 4)).coefficients
    second = theorem2_bound(cfg(2, 4)).coefficients
    assert time.perf_counter() - t0 < 0.05
    assert first == (8, 4, 11) and all(isinstance(v, Fraction) for v in first)
    assert second == (8, 6, 11)


# ---------------------------------------------------------------- 2


@pytest.mark.criterion(2)
def test_exact_tradeoff_segment_34():
    t0 = time.perf_counter()
    c = cfg(3, 4)
    segs = exact_segments(c)
    seg = next(s for s in segs if (s.lo, s.hi) == (F(1, 4), F(3, 8)))
    up = achievable_envelope(c)
    assert time.perf_counter() - t0 < 1
    assert seg.status == "exact" and seg.line == (F(11, 4), F(-2))
    assert (seg.lo, seg.line[0] + seg.line[1] * seg.lo) == (F(1, 4), F(9, 4))
    assert (seg.hi, seg.line[0] + seg.line[1] * seg.hi) == (F(3, 8), F(2))
    assert up.evaluate(F(1, 4)) == F(9, 4) and up.evaluate(F(3, 8)) == 2


# ---------------------------------------------------------------- 3


@pytest.mark.criterion(3)
def test_comparison_table_closed_forms():
    t0 = time.perf_counter()
    checked = 0
    for k in range(2, 13):
        for n in range(2, k + 1):
            c = cfg(n, k)
            row = comparison_table_row(c)
            m = F(n, k * (n - 1))
            cut = n - F(n * n, (n - 1) * k)
            assert row.memory == m and row.cut_set == cut
            if c.case == CaseTag.CASE_I:
                assert row.new_bound == cut + F(1, k * (n - 1))
                assert row.new_bound - row.cut_set == F(1, k * (n - 1))
            else:
                assert row.new_bound == n - F(n * n, k * (n - 1)) + F(2, k * (n - 1) * (k + 3 - 2 * n))
            assert row.computed_new_bound == row.new_bound
            checked += 1
    assert checked == 66
    assert time.perf_counter() - t0 < 1


# ---------------------------------------------------------------- 4


@pytest.mark.criterion(4)
def test_scheme_decoding_and_rates():
    t0 = time.perf_counter()
    runs = 0
    for n, k in SIM_SET:
        c = cfg(n, k)
        demands = covering_demands(c)
        for d in demands:
            rep = simulate(c, "chen", d, seed=runs)
            assert rep.decode_ok and rep.measured_rate == n - F(n, k)
            runs += 1
        for t in range(k + 1):
            want = F(comb(k, t + 1) - comb(k - n, t + 1), comb(k, t))
            for d in demands:
                rep = simulate(c, "yu", d, t=t, seed=runs)
                assert rep.decode_ok and rep.measured_rate == want
                runs += 1
    assert time.perf_counter() - t0 < 30


# ---------------------------------------------------------------- 5


@pytest.mark.criterion(5)
def test_lp_sandwich_24():
    t0 = time.perf_counter()
    c = cfg(2, 4)
    problem = build_problem(c, demand_family(c))
    values = {}
    for m in (F(0), F(1, 4), F(1, 2)):
        sol = solve_min_rate(problem, m)
        again = DualCertificate.from_json(sol.certificate.to_json())
        assert verify_certificate(problem, again).rate_at(m) == sol.value
        values[m] = sol.value
    assert time.perf_counter() - t0 < 600
    assert values[F(0)] == 2 and values[F(1, 4)] == F(3, 2)
    assert F(7, 6) <= values[F(1, 2)] <= F(11, 9)


# ---------------------------------------------------------------- 6


@pytest.mark.criterion(6)
def test_theorem_chains_up_to_7():
    t0 = time.perf_counter()
    for n, k in UP_TO_7:
        c = cfg(n, k)
        if c.case == CaseTag.CASE_I:
            assert verify_chain(build_theorem1_chain(c)).coefficients == theorem1_bound(c).coefficients
        elif n >= 2:
            assert verify_chain(build_theorem2_chain(c)).coefficients == theorem2_bound(c).coefficients
    assert time.perf_counter() - t0 < 60


SINGLE_FILE_REASON = (
    "build_theorem2_chain cannot verify for N=1 Case II: the claimed bound (e.g. 3M + 6R >= 5 at (1,3)) "
    "is violated by the achievable point (M, R) = (1, 0), so no valid chain exists; the chain stops at the "
    "case-2 reduction, whose MONO step needs a second file"
)


@pytest.mark.criterion(6)
@pytest.mark.xfail(strict=True, reason=SINGLE_FILE_REASON)
def test_theorem_chains_single_file_case2():
    for n, k in UP_TO_7:
        c = cfg(n, k)
        if c.case == CaseTag.CASE_II and n == 1:
            b = theorem2_bound(c)
            assert verify_chain(build_theorem2_chain(c)).coefficients == b.coefficients


@pytest.mark.criterion(6)
def test_single_file_claim_is_false():
    # evidence for the expected failure above: every such claim fails at (M, R) = (N, 0) = (1, 0)
    for n, k in UP_TO_7:
        c = cfg(n, k)
        if c.case == CaseTag.CASE_II and n == 1:
            b = theorem2_bound(c)
            assert b.a * 1 + b.b * 0 < b.c


# ---------------------------------------------------------------- 7


@pytest.mark.criterion(7)
def test_lemma_chain_as_certificate():
    c = cfg(3, 4)
    problem = build_problem(c, demand_family(c))
    cert = chain_to_certificate(lemma1_chain(), problem)
    assert verify_certificate(problem, cert).coefficients == (8, 4, 11)


@pytest.mark.criterion(7)
def test_simulated_points_above_every_bound():
    violations = []
    points = 0
    for n, k in UP_TO_7:
        c = cfg(n, k)
        bounds = all_bounds(c)
        sims = [("chen", None, F(1, k))] + [("yu", t, mn_memory(c, t)) for t in range(k + 1)]
        for scheme, t, m in sims:
            for d in demand_family(c):
                rep = simulate(c, scheme, d, t=t)
                assert rep.decode_ok and rep.memory == m
                points += 1
                for b in bounds:
                    if b.a * m + b.b * rep.measured_rate < b.c:
                        violations.append((c, scheme, t, d, b))
    assert points > 500 and violations == []


@pytest.mark.criterion(7)
def test_achievable_above_bounds_on_grid():
    for k in range(1, 9):
        for n in range(1, k + 1):
            c = cfg(n, k)
            bounds, up = all_bounds(c), achievable_envelope(c)
            for j in range(4 * k * n + 1):
                m = F(j, 4 * k)
                assert lower_envelope(bounds, m) <= up.evaluate(m)


@pytest.mark.criterion(7)
def test_lp_values_between_bounds_and_schemes(lp_24):
    _, sols = lp_24
    c = cfg(2, 4)
    up = achievable_envelope(c)
    for m, sol in sols.items():
        assert lower_envelope(all_bounds(c), m) <= sol.value <= up.evaluate(m)
    assert sols[F(1, 4)].value <= simulate(c, "chen", demand_family(c)[0]).measured_rate


# ---------------------------------------------------------------- 8


@pytest.mark.criterion(8)
def test_set_family_identities_up_to_20():
    for n, k in test_model.CASE1:
        test_model.test_case1_identities(n, k)
    for n, k in test_model.CASE2:
        test_model.test_case2_identities(n, k)
    assert max(k for _, k in test_model.CASE1 + test_model.CASE2) == 20


@pytest.mark.criterion(8)
def test_target_user_property_up_to_20():
    for n, k in test_model.CASE1 + test_model.CASE2:
        test_model.test_target_user_requests_last_file(n, k)


@pytest.mark.criterion(8)
def test_envelope_against_brute_force():
    test_bounds.TestEnvelope().test_random_sets_against_grid()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
