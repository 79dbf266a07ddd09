"""Chain builders: macros for the recurring argument patterns and full chains.

Every macro is a pure function returning a list of :class:`ProofStep`; the
:class:`ChainBuilder` applies steps as they are emitted so that a broken
premise is reported at the step that needs it.  The cache/user sets come from
:mod:`codedcache.model`; the builders only wire them together.

Conventions: ``F`` is the file set W_1..W_{N-1}; ``d_l`` is the l-th demand of
the cyclic family; ``target(l)`` is the user requesting W_N in d_l.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..bounds import LinearBound, theorem1_bound, theorem2_bound
from ..lp.ground import GroundSet, popcount
from ..model import (
    CaseTag,
    Demand,
    DomainError,
    NetworkConfig,
    UserSet,
    apply_user_permutation,
    case2_i_sets,
    case2_j_sets,
    cycle_permutation,
    demand_family,
    lemma5_cover_set,
    set_family_case1,
    target_user_index,
)
from .chain import ChainError, ProofChain, SYMM_NOTE
from .expression import EntropyExpression, ProofStep, StepError, apply_step

PROOF_CAP = 64


class PremiseError(ChainError):
    """A macro was invoked with sets that violate its premise."""


# ------------------------------------------------------------ context


@dataclass(frozen=True)
class ProofContext:
    cfg: NetworkConfig
    gs: GroundSet
    family: Tuple[Demand, ...]  # d_1..d_K (index l-1)

    @classmethod
    def for_family(cls, cfg: NetworkConfig, case: CaseTag, override: bool = True) -> "ProofContext":
        fam = tuple(demand_family(cfg, case, override=override))
        return cls(cfg, GroundSet(cfg, fam, PROOF_CAP), fam)

    def d(self, l: int) -> Demand:
        return self.family[l - 1]

    def target(self, l: int) -> int:
        return target_user_index(self.cfg, l)

    @property
    def F(self) -> int:
        return self.gs.files_but_last

    def Z(self, users: Iterable[int]) -> int:
        return self.gs.caches(users)

    def X(self, l: int) -> int:
        return self.gs.x(self.d(l))

    def fz(self, users: Iterable[int], l: Optional[int] = None) -> int:
        """Mask of H(W_[N-1], Z_users[, X_{d_l}])."""
        m = self.F | self.Z(users)
        return m | self.X(l) if l is not None else m


def _fmt(users: Iterable[int]) -> str:
    return "{" + ",".join(str(u) for u in sorted(users)) + "}"


# ------------------------------------------------------------ builder


class ChainBuilder:
    def __init__(self, gs: GroundSet, title: str = ""):
        self.gs = gs
        self.title = title
        self.start: Dict[int, Fraction] = {}
        self.steps: List[ProofStep] = []
        self.expr = EntropyExpression()

    def add_start(self, mask: int, coef: Fraction = Fraction(1)) -> None:
        if popcount(mask) != 1:
            raise ChainError("start terms are single caches or broadcasts")
        self.start[mask] = self.start.get(mask, Fraction(0)) + Fraction(coef)
        self.expr.add(mask, Fraction(coef))

    def emit(self, step: ProofStep) -> None:
        try:
            self.expr = apply_step(self.expr, step, self.gs)
        except StepError as exc:
            raise ChainError(f"step {len(self.steps) + 1} ({step.rule} # {step.tag}): {exc}") from None
        self.steps.append(step)

    def extend(self, steps: Iterable[ProofStep]) -> None:
        for s in steps:
            self.emit(s)

    def floor_constants(self, tag: str = "unit file entropies") -> None:
        for mask, coef in sorted(self.expr.terms.items()):
            if self.gs.is_pure_files(mask) and coef > 0:
                self.emit(ProofStep("CONST_FLOOR", (mask,), coef, tag=tag))

    def chain(self, claimed: LinearBound) -> ProofChain:
        return ProofChain(self.gs, dict(self.start), list(self.steps), claimed, self.title)


# ------------------------------------------------------------ small patterns


def gather(ctx: ProofContext, users: Iterable[int], l: Optional[int], weight: Fraction = Fraction(1), tag: str = "") -> Tuple[List[ProofStep], int]:
    """Merge H(Z_u) (u in users) and H(X_{d_l}) into H(Z_users, X_{d_l}) by submodularity."""
    steps: List[ProofStep] = []
    acc = ctx.X(l) if l is not None else 0
    for u in sorted(users):
        z = ctx.gs.z(u)
        if acc:
            steps.append(ProofStep("SUBMOD", (acc, z), weight, tag=tag or "gather caches and broadcast"))
        acc |= z
    return steps, acc


def decode_all(ctx: ProofContext, mask: int, users: Iterable[int], l: int, weight: Fraction = Fraction(1), tag: str = "") -> Tuple[List[ProofStep], int]:
    """Add the files requested in d_l by ``users`` (each at most once)."""
    steps: List[ProofStep] = []
    d = ctx.d(l)
    for u in sorted(users):
        wf = ctx.gs.w(d[u])
        if mask & wf:
            continue
        steps.append(ProofStep("DECODE", (mask,), weight, user=u, demand=d.requests, tag=tag or "decodability"))
        mask |= wf
    return steps, mask


def decoded_block(ctx: ProofContext, users: UserSet, l: int, tag: str) -> List[ProofStep]:
    """(N-1)M + R >= H(Z_U, X_{d_l}) = H(W_[N-1], Z_U, X_{d_l}) for a block U requesting W_1..W_{N-1}."""
    g, mask = gather(ctx, users, l, tag=f"{tag}: merge")
    dec, mask = decode_all(ctx, mask, users, l, tag=f"{tag}: decode")
    if mask != ctx.fz(users, l):
        raise PremiseError(f"{tag}: users {_fmt(users)} do not request exactly W_1..W_{ctx.cfg.N - 1} in d_{l}")
    return g + dec


# ------------------------------------------------------------ lemma macros


def macro_lemma_repeated(ctx: ProofContext, S: UserSet, T: UserSet, l: int, tag: str = "") -> List[ProofStep]:
    """H(F, Z_S, Z_t) + H(F, Z_T, X_{d_l}) >= H(F, Z_{S n T}) + N with t = target(l)."""
    t = ctx.target(l)
    if t in S or t in T:
        raise PremiseError(f"lemma-repeated: user {t} (requests W_{ctx.cfg.N} in d_{l}) must lie outside S and T")
    tag = tag or f"lemma-repeated l={l}"
    left = ctx.fz(S | {t})
    right = ctx.fz(T, l)
    union = left | right
    return [
        ProofStep("SUBMOD", (left, right), tag=f"{tag}: submodularity"),
        ProofStep("DECODE", (union,), user=t, demand=ctx.d(l).requests, tag=f"{tag}: user {t} decodes W_{ctx.cfg.N}"),
        ProofStep("FILECLOSE", (union | ctx.gs.w(ctx.cfg.N),), tag=f"{tag}: function of the files"),
    ]


def _telescope(ctx: ProofContext, carry: UserSet, blocks: Sequence[Tuple[UserSet, int]], tag: str) -> Tuple[List[ProofStep], UserSet]:
    """Chain lemma-repeated over ``blocks`` [(T, l)], carrying H(F, Z_carry)."""
    steps: List[ProofStep] = []
    for T, l in blocks:
        t = ctx.target(l)
        if t not in carry:
            raise PremiseError(f"{tag}: carried set {_fmt(carry)} lacks user {t} needed for d_{l}")
        steps += macro_lemma_repeated(ctx, carry - {t}, T, l, tag=f"{tag} l={l}")
        carry = (carry - {t}) & T
    return steps, carry


def macro_sum_increment(
    ctx: ProofContext, sets: Sequence[UserSet], indices: Sequence[int], strict: bool = True, tag: str = "sum-increment"
) -> Tuple[List[ProofStep], UserSet]:
    """H(F,Z_{S_l}) + sum_{i>l} H(F,Z_{S_i},X_{d_i}) >= (j-l)N + H(F, Z_{S_j}).

    ``sets[k]`` is S at demand index ``indices[k]``.  With ``strict`` the
    premise S_i = S_{i+1} u {target(i+1)} is checked for every i; otherwise
    only the weaker lemma-repeated premise is needed and the carried set is
    S_l n S_{l+1} n ... (which equals S_j under the strict premise).
    Returns the steps and the final carried set.
    """
    if len(sets) != len(indices):
        raise PremiseError(f"{tag}: {len(sets)} sets for {len(indices)} demand indices")
    if strict:
        for k in range(len(sets) - 1):
            t = ctx.target(indices[k + 1])
            if sets[k] != sets[k + 1] | {t} or t in sets[k + 1]:
                raise PremiseError(
                    f"{tag}: premise fails at i={indices[k]}: S_i={_fmt(sets[k])} != S_(i+1) u {{{t}}} = {_fmt(sets[k + 1] | {t})}"
                )
    blocks = [(sets[k], indices[k]) for k in range(1, len(sets))]
    return _telescope(ctx, frozenset(sets[0]), blocks, tag)


def macro_sum_decrement(
    ctx: ProofContext, sets: Sequence[UserSet], indices: Sequence[int], tag: str = "sum-decrement"
) -> Tuple[List[ProofStep], UserSet]:
    """H(F,Z_{T_j},Z_{target(j)}) + sum_{i=l..j} H(F,Z_{T_i},X_{d_i}) >= (j-l+1)N + H(F,Z_{T_l}).

    ``sets[k]`` is T at demand index ``indices[k]``; premise
    T_{i+1} = T_i u {target(i)}.  The carried term H(F, Z_{T_j u target(j)})
    must already be present.
    """
    if len(sets) != len(indices) or not sets:
        raise PremiseError(f"{tag}: need one demand index per set and at least one set")
    for k in range(len(sets) - 1):
        t = ctx.target(indices[k])
        if sets[k + 1] != sets[k] | {t} or t in sets[k]:
            raise PremiseError(
                f"{tag}: premise fails at i={indices[k]}: T_(i+1)={_fmt(sets[k + 1])} != T_i u {{{t}}} = {_fmt(sets[k] | {t})}"
            )
    start = frozenset(sets[-1]) | {ctx.target(indices[-1])}
    blocks = [(sets[k], indices[k]) for k in reversed(range(len(sets)))]
    steps, carry = _telescope(ctx, start, blocks, tag)
    return steps, carry


def decrement_start(ctx: ProofContext, sets: Sequence[UserSet], indices: Sequence[int]) -> UserSet:
    return frozenset(sets[-1]) | {ctx.target(indices[-1])}


def macro_case2_reduction(ctx: ProofContext, A: UserSet, B: UserSet, C: UserSet, l: int, tag: str = "") -> List[ProofStep]:
    """H(F,Z_A,X) + sum_{b in B} H(Z_b) + |B| H(X) + |B| H(Z_C) >= H(F,Z_{A u B},X) + |B| N, X = X_{d_l}.

    Premises: every user of B requests W_1 in d_l; the users of C together
    request W_2..W_N.
    """
    tag = tag or f"case-2 reduction l={l}"
    d = ctx.d(l)
    n = ctx.cfg.N
    for b in sorted(B):
        if d[b] != 1:
            raise PremiseError(f"{tag}: user {b} of B requests W_{d[b]}, not W_1, in d_{l}")
    missing = set(range(2, n + 1)) - {d[c] for c in C}
    if missing:
        raise PremiseError(f"{tag}: users {_fmt(C)} do not request file(s) {sorted(missing)} in d_{l}")
    if not B:
        return []
    gs = ctx.gs
    w1, x = gs.w(1), ctx.X(l)
    nb = Fraction(len(B))
    steps: List[ProofStep] = []
    singles = []
    for b in sorted(B):
        steps.append(ProofStep("SUBMOD", (gs.z(b), x), tag=f"{tag}: merge Z{b} with X"))
        steps.append(ProofStep("DECODE", (gs.z(b) | x,), user=b, demand=d.requests, tag=f"{tag}: user {b} decodes W_1"))
        singles.append(w1 | gs.z(b) | x)
    acc = singles[0]
    for s in singles[1:]:
        steps.append(ProofStep("SUBMOD", (acc, s), tag=f"{tag}: join the W_1 terms"))
        acc |= s
    a_term = ctx.fz(A, l)
    steps.append(ProofStep("SUBMOD", (a_term, acc), tag=f"{tag}: absorb Z_B"))
    inter = a_term & acc
    if inter != w1 | x:
        steps.append(ProofStep("MONO", (inter, w1 | x), tag=f"{tag}: drop caches"))
    zc = ctx.Z(C)
    steps.append(ProofStep("SUBMOD", (w1 | x, zc), nb, tag=f"{tag}: merge Z_C"))
    dec, mask = decode_all(ctx, w1 | x | zc, C, l, nb, tag=f"{tag}: C decodes")
    steps += dec
    steps.append(ProofStep("FILECLOSE", (mask,), nb, tag=f"{tag}: function of the files"))
    return steps


# ------------------------------------------------------------ symmetry


def symmetric_relabelling(ctx: ProofContext, fixed: UserSet, src: int, dst: int) -> Tuple[int, ...]:
    """A user permutation mapping d_src to d_dst and the set ``fixed`` onto itself.

    Cyclic shifts are preferred (they preserve the whole demand family); the
    fallback fixes ``fixed`` pointwise, which needs d_src and d_dst to agree
    on it.
    """
    k = ctx.cfg.K
    a, b = ctx.d(src), ctx.d(dst)
    for step in range(1, k):
        p = cycle_permutation(k, step)
        if apply_user_permutation(a, p) == b and {p[u - 1] for u in fixed} == set(fixed):
            return p
    for u in fixed:
        if a[u] != b[u]:
            raise PremiseError(f"symmetry: user {u} requests W_{a[u]} in d_{src} but W_{b[u]} in d_{dst}")
    perm = [0] * k
    for u in fixed:
        perm[u - 1] = u
    free_src = [u for u in range(1, k + 1) if u not in fixed]
    free_dst = list(free_src)
    for f in range(1, ctx.cfg.N + 1):
        us = [u for u in free_src if a[u] == f]
        vs = [v for v in free_dst if b[v] == f]
        if len(us) != len(vs):
            raise PremiseError(f"symmetry: d_{src} and d_{dst} differ in how often W_{f} is requested outside {_fmt(fixed)}")
        for u, v in zip(us, vs):
            perm[u - 1] = v
    return tuple(perm)


def symm_step(ctx: ProofContext, users: UserSet, src: int, dst: int, tag: str) -> ProofStep:
    perm = symmetric_relabelling(ctx, users, src, dst)
    return ProofStep("SYMM", (ctx.fz(users, src),), perm=perm, tag=tag)


# ------------------------------------------------------------ opening decompositions


@dataclass(frozen=True)
class OpeningBlock:
    """``weight`` copies of sum_{u in users} H(Z_u) [+ H(X_{d_l})]."""

    users: UserSet
    demand: Optional[int]
    weight: int = 1
    role: str = ""


def theorem1_opening(cfg: NetworkConfig) -> List[OpeningBlock]:
    """K(N-1)M + KR split into K blocks of (N-1)M + R."""
    n, k = cfg.N, cfg.K
    out = []
    for i in range(1, n + 1):
        s = set_family_case1(cfg, i, override=True)
        out.append(OpeningBlock(s.A | s.B, i, 1, f"A_{i} u B_{i}"))
        if i <= k - n:
            out.append(OpeningBlock(s.C | s.E, i, 1, f"C_{i} u E"))
    return out


def theorem2_opening(cfg: NetworkConfig) -> List[OpeningBlock]:
    n, k = cfg.N, cfg.K
    out = []
    for i in range(1, n + 1):
        s = case2_i_sets(cfg, i, override=True)
        out.append(OpeningBlock(s.A | s.B, i, 1, f"A_{i} u B_{i}"))
        out.append(OpeningBlock(s.G, None, 1, f"G_{i} caches"))
        if s.G:
            out.append(OpeningBlock(lemma5_cover_set(cfg, i, override=True), i, len(s.G), f"|G_{i}| x (I'_{i}, X_{i})"))
        if i <= n - 1:
            out.append(OpeningBlock(s.B | s.F, i, 1, f"B_{i} u F_{i}"))
    for j in range(2 * n, k + 1):
        s = case2_j_sets(cfg, j, override=True)
        out.append(OpeningBlock(s.P, j, 1, f"P_{j}"))
        out.append(OpeningBlock(s.Q, None, 1, f"Q_{j} caches"))
        if s.Q:
            out.append(OpeningBlock(s.S, j, len(s.Q), f"|Q_{j}| x (S_{j}, X_{j})"))
    return out


def opening_coefficients(blocks: Sequence[OpeningBlock]) -> Tuple[int, int]:
    a = sum(b.weight * len(b.users) for b in blocks)
    r = sum(b.weight for b in blocks if b.demand is not None)
    return a, r


def _seed(b: ChainBuilder, ctx: ProofContext, blocks: Sequence[OpeningBlock]) -> None:
    for blk in blocks:
        for u in blk.users:
            b.add_start(ctx.gs.z(u), blk.weight)
        if blk.demand is not None:
            b.add_start(ctx.X(blk.demand), blk.weight)


# ------------------------------------------------------------ theorem chains


def build_theorem1_chain(cfg: NetworkConfig, override: bool = False) -> ProofChain:
    if cfg.case != CaseTag.CASE_I and not override:
        raise DomainError(f"{cfg} is {cfg.case.value}; the first converse chain needs Case I (override available)")
    n, k = cfg.N, cfg.K
    ctx = ProofContext.for_family(cfg, CaseTag.CASE_I)
    S = {i: set_family_case1(cfg, i, override=True) for i in range(1, n + 1)}
    E = S[1].E
    b = ChainBuilder(ctx.gs, f"K(N-1)M + KR >= KN - 1 for ({n},{k})")
    _seed(b, ctx, theorem1_opening(cfg))
    # opening blocks -> H(W_[N-1], Z_U, X_{d_i})
    for blk in theorem1_opening(cfg):
        b.extend(decoded_block(ctx, blk.users, blk.demand, f"block {blk.role}, d_{blk.demand}"))
    # exchange: (A u B) and (C u E) -> (A u E) and (B u C)
    for i in range(1, k - n + 1):
        s = S[i]
        b.emit(ProofStep("SUBMOD", (ctx.fz(s.A | s.B, i), ctx.fz(s.C | s.E, i)), tag=f"exchange at d_{i}"))
    # carried term H(F, Z_{A_1 u E})
    b.emit(ProofStep("MONO", (ctx.fz(S[1].A | E, 1), ctx.fz(S[1].A | E)), tag="drop X_{d_1}"))
    first = list(range(1, k - n + 1)) or [1]
    steps, carry = macro_sum_increment(ctx, [S[i].A | E for i in first], first, strict=True, tag="sum-increment (A_i u E)")
    b.extend(steps)
    second = list(range(max(k - n + 1, 2), n + 1))
    steps, carry = macro_sum_increment(
        ctx, [carry] + [S[i].A | S[i].B for i in second], [first[-1]] + second, strict=False, tag="sum-increment (A_i u B_i)"
    )
    b.extend(steps)
    if carry != E:
        raise ChainError(f"carried set {_fmt(carry)} differs from E={_fmt(E)}")
    # the B_i u C_i terms: drop C_i, then move to d_{N+i}
    for i in range(1, k - n + 1):
        s = S[i]
        if s.C:
            b.emit(ProofStep("MONO", (ctx.fz(s.B | s.C, i), ctx.fz(s.B, i)), tag=f"drop Z_C at d_{i}"))
        b.emit(symm_step(ctx, s.B, i, n + i, f"symmetry: B_{i} requests the same files in d_{i} and d_{n + i}"))
    if k > n:
        sets = [S[i].B for i in range(1, k - n + 1)]
        ids = [n + i for i in range(1, k - n + 1)]
        if decrement_start(ctx, sets, ids) != carry:
            raise ChainError("decrement does not start from the carried set")
        steps, carry = macro_sum_decrement(ctx, sets, ids, tag="sum-decrement (B_i)")
        b.extend(steps)
    b.floor_constants()
    return b.chain(theorem1_bound(cfg))


def build_theorem2_chain(cfg: NetworkConfig, override: bool = False) -> ProofChain:
    if cfg.case != CaseTag.CASE_II and not (override or cfg.is_boundary):
        raise DomainError(f"{cfg} is {cfg.case.value}; the second converse chain needs Case II (override available)")
    n, k = cfg.N, cfg.K
    ctx = ProofContext.for_family(cfg, CaseTag.CASE_II)
    I = {i: case2_i_sets(cfg, i, override=True) for i in range(1, n + 1)}
    J = {j: case2_j_sets(cfg, j, override=True) for j in range(2 * n, k + 1)}
    opening = theorem2_opening(cfg)
    b = ChainBuilder(ctx.gs, f"second converse chain for ({n},{k})")
    _seed(b, ctx, opening)
    # part 1: blocks, reductions, exchanges
    for i in range(1, n + 1):
        s = I[i]
        b.extend(decoded_block(ctx, s.A | s.B, i, f"block A_{i} u B_{i}, d_{i}"))
        if i <= n - 1:
            b.extend(decoded_block(ctx, s.B | s.F, i, f"block B_{i} u F_{i}, d_{i}"))
    for i in range(1, n + 1):
        s = I[i]
        cover = lemma5_cover_set(cfg, i, override=True)
        if s.G:
            g, _ = gather(ctx, cover, None, Fraction(len(s.G)), tag=f"merge Z_I'_{i}")
            b.extend(g)
        b.extend(macro_case2_reduction(ctx, s.A | s.B, s.G, cover, i, tag=f"case-2 reduction (A_{i} u B_{i}, G_{i})"))
        if i <= n - 1:
            b.emit(ProofStep("SUBMOD", (ctx.fz(s.A | s.B | s.G, i), ctx.fz(s.B | s.F, i)), tag=f"exchange at d_{i}"))
    b.emit(ProofStep("MONO", (ctx.fz(I[1].L, 1), ctx.fz(I[1].L)), tag="drop X_{d_1}"))
    ids = list(range(1, n + 1))
    steps, carry = macro_sum_increment(ctx, [I[i].L for i in ids], ids, strict=True, tag="sum-increment (L_i)")
    b.extend(steps)
    for i in range(1, n):
        b.emit(symm_step(ctx, I[i].B, i, n + i, f"symmetry: B_{i} requests the same files in d_{i} and d_{n + i}"))
    # part 2: P/Q/S reductions
    for j in range(2 * n, k + 1):
        s = J[j]
        b.extend(decoded_block(ctx, s.P, j, f"block P_{j}, d_{j}"))
        if s.Q:
            g, _ = gather(ctx, s.S, None, Fraction(len(s.Q)), tag=f"merge Z_S_{j}")
            b.extend(g)
        b.extend(macro_case2_reduction(ctx, s.P, s.Q, s.S, j, tag=f"case-2 reduction (P_{j}, Q_{j})"))
    # splice: two decrements
    sets = [J[j].T for j in range(2 * n, k + 1)]
    jids = list(range(2 * n, k + 1))
    if jids:  # empty at the odd-K boundary K = 2N - 1
        if decrement_start(ctx, sets, jids) != carry:
            raise ChainError(f"T_K u target(K) differs from the carried set {_fmt(carry)}")
        steps, carry = macro_sum_decrement(ctx, sets, jids, tag="sum-decrement (T_j)")
        b.extend(steps)
    if n >= 2:
        sets = [I[i].B for i in range(1, n)]
        bids = [n + i for i in range(1, n)]
        if decrement_start(ctx, sets, bids) != carry:
            raise ChainError(f"B_(N-1) u target(2N-1) differs from the carried set {_fmt(carry)}")
        steps, carry = macro_sum_decrement(ctx, sets, bids, tag="sum-decrement (B_i)")
        b.extend(steps)
    b.floor_constants()
    return b.chain(theorem2_bound(cfg, override=True))


# ------------------------------------------------------------ hand transcriptions


def lemma1_chain() -> ProofChain:
    """The (3,4) chain for 8M + 4R >= 11, line by line (files A,B,C = W1,W2,W3)."""
    from ..model import make_config

    cfg = make_config(3, 4)
    ctx = ProofContext.for_family(cfg, CaseTag.CASE_I)
    gs = ctx.gs
    z, w = gs.z, gs.w
    X = ctx.X  # d1=(A,B,C,A) d2=(B,C,A,A) d3=(C,A,A,B) d4=(A,A,B,C)
    AB = w(1) | w(2)
    b = ChainBuilder(gs, "8M + 4R >= 11 for the (3,4) network")
    for user, c in ((1, 2), (2, 2), (3, 1), (4, 3)):
        b.add_start(z(user), c)
    for l, c in ((1, 2), (2, 1), (3, 1)):
        b.add_start(X(l), c)
    S = lambda *ms: ProofStep("SUBMOD", ms, tag="submodularity")  # noqa: E731
    D = lambda m, u, l: ProofStep("DECODE", (m,), user=u, demand=ctx.d(l).requests, tag="decodability")  # noqa: E731
    C = lambda m: ProofStep("FILECLOSE", (m,), tag="function of the files")  # noqa: E731
    M = lambda m, s: ProofStep("MONO", (m, s), tag="drop variables")  # noqa: E731
    for users, l in (((1, 2), 1), ((2, 4), 1), ((1, 4), 2), ((3, 4), 3)):
        steps, mask = gather(ctx, users, l, tag="submodularity")
        b.extend(steps)
        for u in users:
            b.emit(D(mask, u, l))
            mask |= w(ctx.d(l)[u])
    b.emit(S(AB | z(1) | z(2) | X(1), AB | z(2) | z(4) | X(1)))
    b.emit(M(AB | z(1) | z(2) | z(4) | X(1), AB | z(1) | z(2) | z(4)))
    b.emit(S(AB | z(1) | z(2) | z(4), AB | z(1) | z(4) | X(2)))
    b.emit(D(AB | z(1) | z(2) | z(4) | X(2), 2, 2))
    b.emit(C(gs.all_files | z(1) | z(2) | z(4) | X(2)))
    b.emit(S(AB | z(1) | z(4), AB | z(3) | z(4) | X(3)))
    b.emit(D(AB | z(1) | z(3) | z(4) | X(3), 1, 3))
    b.emit(C(gs.all_files | z(1) | z(3) | z(4) | X(3)))
    b.emit(M(AB | z(2) | X(1), AB | X(1)))
    b.emit(ProofStep("SYMM", (AB | X(1),), perm=(2, 3, 4, 1), tag="symmetry: (A,B,C,A) -> (A,A,B,C)"))
    b.emit(S(AB | X(4), AB | z(4)))
    b.emit(D(AB | z(4) | X(4), 4, 4))
    b.emit(C(gs.all_files | z(4) | X(4)))
    b.floor_constants()
    return b.chain(LinearBound(8, 4, 11, "lemma_1_34"))


def lemma2_chain() -> ProofChain:
    """The (2,4) chain for 8M + 6R >= 11 (files A,B = W1,W2)."""
    from ..model import make_config

    cfg = make_config(2, 4)
    ctx = ProofContext.for_family(cfg, CaseTag.CASE_II)
    gs = ctx.gs
    z, w = gs.z, gs.w
    X = ctx.X  # d1=(A,B,A,A) d2=(B,A,A,A) d3=(A,A,A,B) d4=(A,A,B,A)
    A = w(1)
    b = ChainBuilder(gs, "8M + 6R >= 11 for the (2,4) network")
    for user, c in ((1, 2), (2, 1), (3, 2), (4, 3)):
        b.add_start(z(user), c)
    for l, c in ((1, 3), (2, 2), (4, 1)):
        b.add_start(X(l), c)
    S = lambda *ms: ProofStep("SUBMOD", ms, tag="submodularity")  # noqa: E731
    D = lambda m, u, l: ProofStep("DECODE", (m,), user=u, demand=ctx.d(l).requests, tag="decodability")  # noqa: E731
    C = lambda m: ProofStep("FILECLOSE", (m,), tag="function of the files")  # noqa: E731
    for u, l in ((1, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 4)):
        b.emit(S(z(u), X(l)))
        b.emit(D(z(u) | X(l), u, l))
    b.emit(S(A | z(1) | X(1), A | z(3) | X(1)))
    b.emit(S(A | z(1) | z(3) | X(1), A | z(4) | X(1)))
    b.emit(S(A | z(3) | X(2), A | z(4) | X(2)))
    b.emit(ProofStep("SYMM", (A | X(1),), perm=(3, 4, 1, 2), tag="symmetry: (A,B,A,A) -> (A,A,A,B)"))
    b.emit(S(A | X(1), z(2)))
    b.emit(S(A | X(2), z(1)))
    b.emit(D(A | z(2) | X(1), 2, 1))
    b.emit(D(A | z(1) | X(2), 1, 2))
    b.emit(C(gs.all_files | z(2) | X(1)))
    b.emit(C(gs.all_files | z(1) | X(2)))
    b.emit(S(A | z(1) | z(3) | z(4) | X(1), A | z(3) | z(4) | X(2)))
    b.emit(D(A | z(1) | z(3) | z(4) | X(1) | X(2), 1, 2))
    b.emit(C(gs.all_files | z(1) | z(3) | z(4) | X(1) | X(2)))
    b.emit(S(A | z(3) | z(4), A | z(4) | X(4)))
    b.emit(D(A | z(3) | z(4) | X(4), 3, 4))
    b.emit(C(gs.all_files | z(3) | z(4) | X(4)))
    b.emit(S(A | z(4), A | X(3)))
    b.emit(D(A | z(4) | X(3), 4, 3))
    b.emit(C(gs.all_files | z(4) | X(3)))
    b.floor_constants()
    return b.chain(LinearBound(8, 6, 11, "lemma_2_24"))
