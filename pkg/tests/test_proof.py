import json
from dataclasses import replace
from fractions import Fraction

import pytest

from codedcache.bounds import LinearBound, theorem1_bound, theorem2_bound
from codedcache.lp import build_problem, verify_certificate
from codedcache.lp.ground import GroundSet
from codedcache.model import CaseTag, Demand, DomainError, NetworkConfig, demand_family
from codedcache.proof import (
    ChainError,
    EntropyExpression,
    ProofChain,
    ProofStep,
    StepError,
    apply_step,
    from_json,
    from_transcript,
    replay,
    to_json,
    to_transcript,
    verify_chain,
)
from codedcache.proof.builders import (
    PremiseError,
    ProofContext,
    build_theorem1_chain,
    build_theorem2_chain,
    lemma1_chain,
    lemma2_chain,
    macro_case2_reduction,
    macro_lemma_repeated,
    macro_sum_decrement,
    macro_sum_increment,
    opening_coefficients,
    symmetric_relabelling,
    theorem1_opening,
    theorem2_opening,
)
from codedcache.proof.convert import ConversionError, chain_to_certificate

from conftest import scheme_entropy_vector

F = Fraction
SMALL = [(n, k) for k in range(1, 8) for n in range(1, k + 1)]
CASE1 = [(n, k) for n, k in SMALL if NetworkConfig(n, k).case == CaseTag.CASE_I]
CASE2 = [(n, k) for n, k in SMALL if NetworkConfig(n, k).case == CaseTag.CASE_II and n >= 2]
CASE2_N1 = [(n, k) for n, k in SMALL if NetworkConfig(n, k).case == CaseTag.CASE_II and n == 1]


def ground_34():
    cfg = NetworkConfig(3, 4)
    return GroundSet(cfg, tuple(demand_family(cfg)))


def expr(*terms):
    e = EntropyExpression()
    for mask, coef in terms:
        e.add(mask, F(coef))
    return e


# ------------------------------------------------------------------ rules


class TestRules:
    def test_submod(self):
        gs = ground_34()
        a, b = gs.z(1) | gs.w(1), gs.z(1) | gs.w(2)
        out = apply_step(expr((a, 1), (b, 2)), ProofStep("SUBMOD", (a, b)), gs)
        assert out == expr((b, 1), (a | b, 1), (gs.z(1), 1))

    def test_submod_errors(self):
        gs = ground_34()
        a = gs.z(1)
        with pytest.raises(StepError, match="two different"):
            apply_step(expr((a, 1)), ProofStep("SUBMOD", (a, a)), gs)
        with pytest.raises(StepError, match=r"H\{Z2\} has coefficient 0, need 1"):
            apply_step(expr((a, 1)), ProofStep("SUBMOD", (a, gs.z(2))), gs)
        with pytest.raises(StepError, match="need 2"):
            apply_step(expr((a, 1), (gs.z(2), 1)), ProofStep("SUBMOD", (a, gs.z(2)), 2), gs)

    def test_decode(self):
        gs = ground_34()
        x = gs.x(Demand((1, 2, 3, 1)))
        s = gs.z(2) | x
        out = apply_step(expr((s, 1)), ProofStep("DECODE", (s,), user=2, demand=(1, 2, 3, 1)), gs)
        assert out == expr((s | gs.w(2), 1))
        with pytest.raises(StepError, match="Z1 not in"):
            apply_step(expr((s, 1)), ProofStep("DECODE", (s,), user=1, demand=(1, 2, 3, 1)), gs)
        with pytest.raises(StepError, match="already in"):
            t = s | gs.w(2)
            apply_step(expr((t, 1)), ProofStep("DECODE", (t,), user=2, demand=(1, 2, 3, 1)), gs)
        with pytest.raises(StepError, match="not one of the listed demands|not listed|unlisted|no broadcast"):
            apply_step(expr((s, 1)), ProofStep("DECODE", (s,), user=2, demand=(3, 2, 1, 1)), gs)
        with pytest.raises(StepError, match="needs a user"):
            ProofStep("DECODE", (s,))

    def test_fileclose_and_floor(self):
        gs = ground_34()
        s = gs.all_files | gs.z(1)
        out = apply_step(expr((s, 2)), ProofStep("FILECLOSE", (s,), 2), gs)
        assert out == expr((gs.all_files, 2))
        out = apply_step(out, ProofStep("CONST_FLOOR", (gs.all_files,), 2), gs)
        assert out.is_constant() and out.constant == 6
        with pytest.raises(StepError, match="does not contain every file"):
            apply_step(expr((gs.w(1) | gs.z(1), 1)), ProofStep("FILECLOSE", (gs.w(1) | gs.z(1),)), gs)
        with pytest.raises(StepError, match="not a pure file subset"):
            apply_step(expr((gs.z(1), 1)), ProofStep("CONST_FLOOR", (gs.z(1),)), gs)

    def test_mono(self):
        gs = ground_34()
        s = gs.z(1) | gs.z(2)
        assert apply_step(expr((s, 1)), ProofStep("MONO", (s, gs.z(1))), gs) == expr((gs.z(1), 1))
        with pytest.raises(StepError, match="is not a subset"):
            apply_step(expr((s, 1)), ProofStep("MONO", (s, gs.z(3))), gs)

    def test_symm(self):
        gs = ground_34()
        x1 = gs.x(Demand((1, 2, 3, 1)))
        s = gs.w(1) | gs.w(2) | x1
        out = apply_step(expr((s, 1)), ProofStep("SYMM", (s,), perm=(2, 3, 4, 1)), gs)
        assert out == expr((gs.w(1) | gs.w(2) | gs.x(Demand((1, 1, 2, 3))), 1))
        with pytest.raises(StepError, match="unlisted demand"):
            apply_step(expr((s, 1)), ProofStep("SYMM", (s,), perm=(2, 1, 3, 4)), gs)
        with pytest.raises(StepError, match="unchanged"):
            apply_step(expr((gs.w(1), 1)), ProofStep("SYMM", (gs.w(1),), perm=(2, 1, 3, 4)), gs)
        with pytest.raises(StepError, match="SYMM"):
            apply_step(expr((s, 1)), ProofStep("SYMM", (s,), perm=(1, 1, 2, 3)), gs)

    def test_step_validation(self):
        with pytest.raises(StepError, match="unknown rule"):
            ProofStep("CHAIN", (1,))
        with pytest.raises(StepError, match="takes 2 subset"):
            ProofStep("SUBMOD", (1,))
        with pytest.raises(StepError, match="positive"):
            ProofStep("MONO", (3, 1), weight=0)


# ------------------------------------------------------------------ lemma chains


class TestLemmaChains:
    def test_lemma1(self):
        ch = lemma1_chain()
        assert len(ch.steps) == 31
        assert verify_chain(ch).coefficients == (8, 4, 11)
        assert ch.start_coefficients() == (8, 4)

    def test_lemma2(self):
        ch = lemma2_chain()
        assert len(ch.steps) == 33
        assert verify_chain(ch).coefficients == (8, 6, 11)

    def test_lemma_matches_theorem(self):
        assert verify_chain(lemma1_chain()).same_inequality(theorem1_bound(NetworkConfig(3, 4)))
        assert verify_chain(lemma2_chain()).same_inequality(theorem2_bound(NetworkConfig(2, 4)))

    def test_wrong_claim(self):
        ch = lemma1_chain()
        ch.claimed = LinearBound(8, 4, 12)
        with pytest.raises(ChainError, match="proves .* but claims"):
            verify_chain(ch)

    @pytest.mark.parametrize("drop", [0, 5, 17, 30])
    def test_deleted_step(self, drop):
        ch = lemma1_chain()
        ch.steps = ch.steps[:drop] + ch.steps[drop + 1:]
        with pytest.raises(ChainError) as info:
            verify_chain(ch)
        msg = str(info.value)
        if msg.startswith("step"):
            assert int(msg.split()[1]) >= drop + 1
        else:
            assert "not a constant" in msg or "claims" in msg

    def test_weight_change_detected(self):
        ch = lemma2_chain()
        ch.steps[3] = replace(ch.steps[3], weight=F(2))
        with pytest.raises(ChainError, match="step 4"):
            verify_chain(ch)


# ------------------------------------------------------------------ theorem chains


@pytest.mark.parametrize("n,k", CASE1)
def test_first_chain(n, k):
    cfg = NetworkConfig(n, k)
    bound = verify_chain(build_theorem1_chain(cfg))
    assert bound.coefficients == (k * (n - 1), k, k * n - 1)


@pytest.mark.parametrize("n,k", CASE2)
def test_second_chain(n, k):
    cfg = NetworkConfig(n, k)
    chain = build_theorem2_chain(cfg)
    bound = verify_chain(chain)
    assert bound.coefficients == theorem2_bound(cfg).coefficients
    assert chain.start_coefficients() == (bound.a, bound.b)


@pytest.mark.parametrize("n,k", [(2, 3), (3, 5), (4, 7)])
def test_second_chain_at_boundary(n, k):
    cfg = NetworkConfig(n, k)
    assert verify_chain(build_theorem2_chain(cfg)).same_inequality(theorem1_bound(cfg))


@pytest.mark.parametrize("n,k", CASE2_N1)
def test_second_chain_single_file_fails(n, k):
    with pytest.raises(ChainError, match="MONO"):
        verify_chain(build_theorem2_chain(NetworkConfig(n, k)))


def test_case_checks():
    with pytest.raises(DomainError, match="override"):
        build_theorem1_chain(NetworkConfig(2, 4))
    with pytest.raises(DomainError, match="override"):
        build_theorem2_chain(NetworkConfig(4, 5))
    # even-K boundary: offered, but the base demand has no consistent shape
    with pytest.raises(DomainError, match="no consistent length"):
        build_theorem2_chain(NetworkConfig(3, 4))


def test_opening_coefficients():
    for n, k in CASE1:
        cfg = NetworkConfig(n, k)
        assert opening_coefficients(theorem1_opening(cfg)) == (k * (n - 1), k)
    for n, k in CASE2:
        cfg = NetworkConfig(n, k)
        b = theorem2_bound(cfg)
        assert opening_coefficients(theorem2_opening(cfg)) == (b.a, b.b)


# ------------------------------------------------------------------ serialisation


@pytest.mark.parametrize("make", [lemma1_chain, lemma2_chain, lambda: build_theorem2_chain(NetworkConfig(2, 5))])
def test_transcript_roundtrip(make):
    ch = make()
    text = to_transcript(ch)
    again = from_transcript(text)
    assert again.steps == ch.steps and again.start == ch.start
    assert verify_chain(again).coefficients == verify_chain(ch).coefficients
    assert to_transcript(again) == text
    data = json.loads(json.dumps(to_json(ch)))
    assert from_json(data).steps == ch.steps


def test_transcript_tampering():
    text = to_transcript(lemma1_chain())
    lines = text.splitlines()
    step_lines = [i for i, l in enumerate(lines) if l.split()[0] in ("SUBMOD", "DECODE", "MONO", "SYMM")]
    del lines[step_lines[3]]
    with pytest.raises(ChainError, match=r"step \d+"):
        verify_chain(from_transcript("\n".join(lines)))
    with pytest.raises(ChainError, match="transcript line"):
        from_transcript(text.replace("w=1", "w=abc", 1))
    with pytest.raises(ChainError, match="lacks GROUND"):
        from_transcript("# empty\n")


# ------------------------------------------------------------------ soundness of replay


def assert_monotone(chain, h):
    exprs = replay(chain)
    vals = [e.value(h) for e in exprs]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == chain.claimed.c


class TestReplaySoundness:
    @pytest.mark.parametrize("scheme,t", [("chen", None), ("yu", 1), ("yu", 2), ("yu", 0)])
    def test_lemma1_on_schemes(self, scheme, t):
        cfg = NetworkConfig(3, 4)
        assert_monotone(lemma1_chain(), scheme_entropy_vector(cfg, demand_family(cfg), scheme, t))

    @pytest.mark.parametrize("scheme,t", [("chen", None), ("yu", 1), ("yu", 2)])
    def test_lemma2_on_schemes(self, scheme, t):
        cfg = NetworkConfig(2, 4)
        assert_monotone(lemma2_chain(), scheme_entropy_vector(cfg, demand_family(cfg), scheme, t))

    def test_lemma2_on_lp_solutions(self, lp_24):
        problem, sols = lp_24
        chain = lemma2_chain()
        assert tuple(chain.gs.labels) == tuple(problem.gs.labels)
        for m, sol in sols.items():
            assert_monotone(chain, sol.x)
            # the start expression is at most the claimed left-hand side
            assert chain.start_expression().value(sol.x) <= 8 * m + 6 * sol.rate

    @pytest.mark.parametrize("n,k", [(2, 3), (3, 4), (2, 5), (4, 5)])
    def test_theorem_chains_on_schemes(self, n, k):
        cfg = NetworkConfig(n, k)
        chain = build_theorem1_chain(cfg) if cfg.case == CaseTag.CASE_I else build_theorem2_chain(cfg)
        demands = list(chain.gs.demands)
        for scheme, t in (("chen", None), ("yu", 1)):
            assert_monotone(chain, scheme_entropy_vector(cfg, demands, scheme, t))


# ------------------------------------------------------------------ macros


class TestMacros:
    def ctx34(self):
        return ProofContext.for_family(NetworkConfig(3, 4), CaseTag.CASE_I)

    def test_lemma_repeated_premise(self):
        ctx = self.ctx34()
        with pytest.raises(PremiseError, match="must lie outside S and T"):
            macro_lemma_repeated(ctx, frozenset({3}), frozenset({1}), 1)
        steps = macro_lemma_repeated(ctx, frozenset({1, 2}), frozenset({1, 4}), 1)
        assert [s.rule for s in steps] == ["SUBMOD", "DECODE", "FILECLOSE"]

    def test_lemma_repeated_value(self):
        ctx = self.ctx34()
        S, T = frozenset({1, 2}), frozenset({1, 4})
        t = ctx.target(1)
        e = expr((ctx.fz(S | {t}), 1), (ctx.fz(T, 1), 1))
        for step in macro_lemma_repeated(ctx, S, T, 1):
            e = apply_step(e, step, ctx.gs)
        assert e == expr((ctx.fz(S & T), 1), (ctx.gs.all_files, 1))

    def test_sum_increment_premise(self):
        ctx = self.ctx34()
        with pytest.raises(PremiseError, match="premise fails at i=1"):
            macro_sum_increment(ctx, [frozenset({1, 2}), frozenset({1, 2})], [1, 2])
        with pytest.raises(PremiseError, match="2 sets for 1"):
            macro_sum_increment(ctx, [frozenset(), frozenset()], [1])

    def test_sum_decrement_premise(self):
        ctx = ProofContext.for_family(NetworkConfig(2, 5), CaseTag.CASE_II)
        with pytest.raises(PremiseError, match="premise fails"):
            macro_sum_decrement(ctx, [frozenset({1}), frozenset({1})], [4, 5])

    def test_case2_reduction_premises(self):
        ctx = ProofContext.for_family(NetworkConfig(2, 4), CaseTag.CASE_II)
        # d_1 = (1,2,1,1): user 2 requests W_2
        with pytest.raises(PremiseError, match="user 2 of B requests W_2"):
            macro_case2_reduction(ctx, frozenset(), frozenset({2}), frozenset({1}), 1)
        with pytest.raises(PremiseError, match=r"do not request file\(s\) \[2\]"):
            macro_case2_reduction(ctx, frozenset(), frozenset({3}), frozenset({1}), 1)
        assert macro_case2_reduction(ctx, frozenset({1}), frozenset(), frozenset({2}), 1) == []

    def test_symmetric_relabelling(self):
        ctx = self.ctx34()
        perm = symmetric_relabelling(ctx, frozenset(), 1, 4)
        assert perm == (2, 3, 4, 1)
        ctx2 = ProofContext.for_family(NetworkConfig(2, 4), CaseTag.CASE_II)
        perm = symmetric_relabelling(ctx2, frozenset({1}), 1, 3)
        assert perm[0] == 1


# ------------------------------------------------------------------ chains as LP certificates


class TestConversion:
    def test_lemma1_certificate(self, family_34):
        problem = build_problem(*family_34)
        cert = chain_to_certificate(lemma1_chain(), problem)
        assert verify_certificate(problem, cert).coefficients == (8, 4, 11)

    def test_lemma2_certificate(self, lp_24):
        problem, _ = lp_24
        cert = chain_to_certificate(lemma2_chain(), problem)
        assert verify_certificate(problem, cert).coefficients == (8, 6, 11)

    @pytest.mark.parametrize("n,k", [(2, 3), (3, 3), (2, 4)])
    def test_theorem_certificates(self, n, k):
        cfg = NetworkConfig(n, k)
        chain = build_theorem1_chain(cfg) if cfg.case == CaseTag.CASE_I else build_theorem2_chain(cfg)
        problem = build_problem(cfg, list(chain.gs.demands))
        cert = chain_to_certificate(chain, problem)
        assert verify_certificate(problem, cert).coefficients == verify_chain(chain).coefficients

    def test_symmetry_needed(self, family_34):
        problem = build_problem(*family_34, symmetry=False)
        with pytest.raises(ConversionError, match="same orbit"):
            chain_to_certificate(lemma1_chain(), problem)

    def test_ground_set_mismatch(self, lp_24):
        problem, _ = lp_24
        with pytest.raises(ConversionError, match="different ground sets"):
            chain_to_certificate(lemma1_chain(), problem)
