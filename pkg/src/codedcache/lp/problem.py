"""Constraint generation for the entropy LP.

Every constraint is a linear form

    sum_S coeff_S * H(S) + m * M + r * R - const   (>= 0  or  == 0)

over subset bitmasks of a :class:`GroundSet`.  Ids are content hashes of the
canonical text of the form, so they are stable across runs and platforms.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..model import Demand, NetworkConfig, apply_user_permutation
from ..rational import format_rational
from .ground import GroundSet, bits

GE = ">="
EQ = "=="

KINDS = (
    "elemental",
    "file_independence",
    "function_closure",
    "decode",
    "cache_size",
    "broadcast_size",
    "symmetry",
)


@dataclass(frozen=True)
class Constraint:
    id: str
    kind: str
    sense: str
    terms: Tuple[Tuple[int, Fraction], ...]
    m: Fraction = Fraction(0)
    r: Fraction = Fraction(0)
    const: Fraction = Fraction(0)

    def text(self, gs: GroundSet) -> str:
        return canonical_text(gs, self.kind, self.sense, self.terms, self.m, self.r, self.const)

    def value(self, h: Dict[int, Fraction], m: Fraction, r: Fraction) -> Fraction:
        total = self.m * m + self.r * r - self.const
        for mask, coef in self.terms:
            total += coef * h.get(mask, Fraction(0))
        return total

    def satisfied(self, h: Dict[int, Fraction], m: Fraction, r: Fraction) -> bool:
        v = self.value(h, m, r)
        return v == 0 if self.sense == EQ else v >= 0


def canonical_text(gs, kind, sense, terms, m, r, const) -> str:
    body = " ".join(f"{format_rational(c)}*H{gs.label(s)}" for s, c in sorted(terms, key=lambda t: gs.label(t[0])))
    return f"{kind}: {body} {format_rational(m)}*M {format_rational(r)}*R {sense} {format_rational(const)}"


def make_constraint(gs: GroundSet, kind: str, sense: str, terms: Dict[int, Fraction], m=0, r=0, const=0) -> Constraint:
    clean = {s: Fraction(c) for s, c in terms.items() if s != 0 and c != 0}
    tup = tuple(sorted(clean.items()))
    text = canonical_text(gs, kind, sense, tup, Fraction(m), Fraction(r), Fraction(const))
    cid = hashlib.sha256(text.encode()).hexdigest()[:16]
    return Constraint(cid, kind, sense, tup, Fraction(m), Fraction(r), Fraction(const))


# ------------------------------------------------------------ shannon


def elemental_inequalities(gs: GroundSet) -> Tuple[List[Constraint], Dict[tuple, Constraint]]:
    """Monotonicity of the full set plus conditional two-variable submodularity.

    Returns the list and an index keyed by ``("mono", i)`` and
    ``("submod", i, j, cond_mask)`` (i < j, variable indices).
    """
    n, full = gs.n, gs.full
    out: List[Constraint] = []
    index: Dict[tuple, Constraint] = {}
    one = Fraction(1)
    for i in range(n):
        c = make_constraint(gs, "elemental", GE, {full: one, full & ~(1 << i): -one})
        out.append(c)
        index[("mono", i)] = c
    for i in range(n):
        for j in range(i + 1, n):
            rest = full & ~((1 << i) | (1 << j))
            sub = rest
            while True:
                terms: Dict[int, Fraction] = {}
                for s, coef in ((sub | 1 << i, 1), (sub | 1 << j, 1), (sub | 1 << i | 1 << j, -1), (sub, -1)):
                    if s:
                        terms[s] = terms.get(s, Fraction(0)) + coef
                c = make_constraint(gs, "elemental", GE, terms)
                out.append(c)
                index[("submod", i, j, sub)] = c
                if sub == 0:
                    break
                sub = (sub - 1) & rest
    return out, index


def problem_constraints(cfg: NetworkConfig, gs: GroundSet) -> Tuple[List[Constraint], Dict[tuple, Constraint]]:
    out: List[Constraint] = []
    index: Dict[tuple, Constraint] = {}
    one = Fraction(1)
    for a in range(1, 1 << cfg.N):
        c = make_constraint(gs, "file_independence", EQ, {a: one}, const=bin(a).count("1"))
        out.append(c)
        index[("file", a)] = c
    c = make_constraint(gs, "function_closure", EQ, {gs.full: one}, const=cfg.N)
    out.append(c)
    index[("closure",)] = c
    for l in range(1, cfg.K + 1):
        for d in gs.demands:
            base = gs.z(l) | gs.x(d)
            c = make_constraint(gs, "decode", EQ, {base | gs.w(d[l]): one, base: -one})
            out.append(c)
            index[("decode", l, d.requests)] = c
    for l in range(1, cfg.K + 1):
        c = make_constraint(gs, "cache_size", GE, {gs.z(l): -one}, m=1)
        out.append(c)
        index[("cache", l)] = c
    for d in gs.demands:
        c = make_constraint(gs, "broadcast_size", GE, {gs.x(d): -one}, r=1)
        out.append(c)
        index[("broadcast", d.requests)] = c
    return out, index


# ------------------------------------------------------------ symmetry


@dataclass(frozen=True)
class SymmetryGroup:
    """User (and optionally file) relabellings that map the listed demands onto themselves."""

    user_perms: Tuple[Tuple[int, ...], ...]
    file_perms: Tuple[Optional[Tuple[int, ...]], ...]
    var_maps: Tuple[Tuple[int, ...], ...]  # variable index -> image index, per element

    def __len__(self) -> int:
        return len(self.var_maps)

    def contains_user_perm(self, perm: Sequence[int]) -> bool:
        return tuple(perm) in set(self.user_perms)


def stabilizer(gs: GroundSet, file_symmetry: bool = False) -> SymmetryGroup:
    k, n_files = gs.cfg.K, gs.cfg.N
    listed = {d.requests for d in gs.demands}
    file_options = list(permutations(range(1, n_files + 1))) if file_symmetry else [None]
    users, files, maps = [], [], []
    for perm in permutations(range(1, k + 1)):
        for fp in file_options:
            ok = True
            for d in gs.demands:
                img = apply_user_permutation(d, perm).requests
                if fp is not None:
                    img = tuple(fp[r - 1] for r in img)
                if img not in listed:
                    ok = False
                    break
            if not ok:
                continue
            vm = [0] * gs.n
            for i in range(gs.n):
                vm[i] = bits(gs.permute(1 << i, perm, fp))[0]
            users.append(tuple(perm))
            files.append(fp)
            maps.append(tuple(vm))
    return SymmetryGroup(tuple(users), tuple(files), tuple(maps))


def apply_var_map(mask: int, vm: Sequence[int]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << vm[i]
        mask >>= 1
        i += 1
    return out


def orbit_representatives(gs: GroundSet, group: SymmetryGroup) -> List[int]:
    """rep[S] = smallest mask in the orbit of S (rep[0] = 0)."""
    rep = list(range(1 << gs.n))
    for s in range(1, 1 << gs.n):
        best = s
        for vm in group.var_maps:
            img = apply_var_map(s, vm)
            if img < best:
                best = img
        rep[s] = best
    return rep


def symmetry_constraints(gs: GroundSet, rep: Sequence[int]) -> Tuple[List[Constraint], Dict[tuple, Constraint]]:
    out, index = [], {}
    one = Fraction(1)
    for s in range(1, 1 << gs.n):
        if rep[s] != s:
            c = make_constraint(gs, "symmetry", EQ, {s: one, rep[s]: -one})
            out.append(c)
            index[("sym", s)] = c
    return out, index


# ------------------------------------------------------------ problem


@dataclass
class LpProblem:
    cfg: NetworkConfig
    gs: GroundSet
    constraints: List[Constraint]
    index: Dict[tuple, Constraint]
    group: SymmetryGroup
    rep: List[int]
    symmetry: bool
    by_id: Dict[str, Constraint] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.by_id = {c.id: c for c in self.constraints}

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for c in self.constraints:
            out[c.kind] = out.get(c.kind, 0) + 1
        return out

    def sym_form(self, s: int) -> Optional[Constraint]:
        """The row H(S) - H(rep S) == 0, or None when S is its own representative."""
        return self.index.get(("sym", s))

    def to_json(self) -> dict:
        return {
            "ground_set": self.gs.to_json(),
            "symmetry": self.symmetry,
            "group_order": len(self.group),
            "objective": "minimize R with M fixed",
            "counts": self.counts(),
        }


def build_problem(
    cfg: NetworkConfig,
    demands: Sequence[Demand],
    symmetry: bool = True,
    file_symmetry: bool = False,
    cap: int = 12,
) -> LpProblem:
    gs = GroundSet(cfg, tuple(demands), cap)
    elem, eidx = elemental_inequalities(gs)
    prob, pidx = problem_constraints(cfg, gs)
    constraints = elem + prob
    index = {**eidx, **pidx}
    if symmetry:
        group = stabilizer(gs, file_symmetry)
        rep = orbit_representatives(gs, group)
        sym, sidx = symmetry_constraints(gs, rep)
        constraints += sym
        index.update(sidx)
    else:
        group = SymmetryGroup(((tuple(range(1, cfg.K + 1))),), (None,), (tuple(range(gs.n)),))
        rep = list(range(1 << gs.n))
    return LpProblem(cfg, gs, constraints, index, group, rep, symmetry)
