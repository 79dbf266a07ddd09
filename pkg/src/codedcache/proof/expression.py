"""Entropy expressions and the six inference rules of the chain checker.

An expression is ``sum_S coef_S * H(S) + constant``.  Each rule rewrites the
expression so that, for every entropy vector of the caching model, the new
value is at most the old one (or equal).  A chain that starts from the cache
and broadcast size terms and ends in a constant therefore proves a linear
bound ``a*M + b*R >= c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from ..lp.ground import GroundSet, popcount
from ..model import Demand, apply_user_permutation, check_permutation, DomainError

RULES = ("SUBMOD", "DECODE", "FILECLOSE", "SYMM", "MONO", "CONST_FLOOR")

_ARITY = {"SUBMOD": 2, "MONO": 2, "DECODE": 1, "FILECLOSE": 1, "SYMM": 1, "CONST_FLOOR": 1}


class StepError(ValueError):
    pass


@dataclass
class EntropyExpression:
    terms: Dict[int, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)

    def copy(self) -> "EntropyExpression":
        return EntropyExpression(dict(self.terms), self.constant)

    def add(self, mask: int, coef: Fraction) -> None:
        if mask == 0:  # H(empty set) = 0
            return
        v = self.terms.get(mask, Fraction(0)) + coef
        if v == 0:
            self.terms.pop(mask, None)
        else:
            self.terms[mask] = v

    def take(self, mask: int, weight: Fraction, gs: GroundSet, what: str) -> None:
        have = self.terms.get(mask, Fraction(0))
        if have < weight:
            raise StepError(f"{what}: term H{gs.label(mask)} has coefficient {have}, need {weight}")
        self.add(mask, -weight)

    def is_constant(self) -> bool:
        return not self.terms

    def value(self, h: Mapping[int, Fraction]) -> Fraction:
        return self.constant + sum((c * h[s] for s, c in self.terms.items()), Fraction(0))

    def render(self, gs: GroundSet) -> str:
        parts = [f"{c}*H{gs.label(s)}" for s, c in sorted(self.terms.items(), key=lambda t: gs.label(t[0]))]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EntropyExpression) and self.terms == other.terms and self.constant == other.constant


@dataclass(frozen=True)
class ProofStep:
    rule: str
    sets: Tuple[int, ...]
    weight: Fraction = Fraction(1)
    user: Optional[int] = None
    demand: Optional[Tuple[int, ...]] = None
    perm: Optional[Tuple[int, ...]] = None
    tag: str = ""

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise StepError(f"unknown rule {self.rule!r}")
        if len(self.sets) != _ARITY[self.rule]:
            raise StepError(f"{self.rule} takes {_ARITY[self.rule]} subset(s), got {len(self.sets)}")
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight <= 0:
            raise StepError(f"step weight must be positive, got {self.weight}")
        if self.rule == "DECODE" and (self.user is None or self.demand is None):
            raise StepError("DECODE needs a user and a demand")
        if self.rule == "SYMM" and self.perm is None:
            raise StepError("SYMM needs a permutation")


def result_sets(step: ProofStep, gs: GroundSet) -> Tuple[int, ...]:
    """Subsets produced by ``step`` (for building chains without replaying)."""
    if step.rule == "SUBMOD":
        s, t = step.sets
        return (s | t, s & t)
    if step.rule == "MONO":
        return (step.sets[1],)
    if step.rule == "DECODE":
        d = Demand(step.demand)
        return (step.sets[0] | gs.w(d[step.user]),)
    if step.rule == "FILECLOSE":
        return (gs.all_files,)
    if step.rule == "SYMM":
        return (gs.permute(step.sets[0], step.perm),)
    return ()


def apply_step(expr: EntropyExpression, step: ProofStep, gs: GroundSet) -> EntropyExpression:
    out = expr.copy()
    w = step.weight
    rule = step.rule
    if rule == "SUBMOD":
        s, t = step.sets
        if s == t:
            raise StepError("SUBMOD needs two different subsets")
        if s == 0 or t == 0:
            raise StepError("SUBMOD on the empty set")
        out.take(s, w, gs, "SUBMOD")
        out.take(t, w, gs, "SUBMOD")
        out.add(s | t, w)
        out.add(s & t, w)
    elif rule == "MONO":
        s, sub = step.sets
        if sub & ~s:
            raise StepError(f"MONO: H{gs.label(sub)} is not a subset of H{gs.label(s)}")
        out.take(s, w, gs, "MONO")
        out.add(sub, w)
    elif rule == "DECODE":
        (s,) = step.sets
        d = Demand(step.demand)
        d.validate(gs.cfg)
        l = step.user
        if not 1 <= l <= gs.cfg.K:
            raise StepError(f"DECODE: user {l} outside 1..{gs.cfg.K}")
        try:
            xd = gs.x(d)
        except DomainError as exc:
            raise StepError(f"DECODE: {exc}") from None
        if not s & gs.z(l):
            raise StepError(f"DECODE: Z{l} not in H{gs.label(s)}")
        if not s & xd:
            raise StepError(f"DECODE: X{d} not in H{gs.label(s)}")
        wf = gs.w(d[l])
        if s & wf:
            raise StepError(f"DECODE: W{d[l]} already in H{gs.label(s)}")
        out.take(s, w, gs, "DECODE")
        out.add(s | wf, w)
    elif rule == "FILECLOSE":
        (s,) = step.sets
        if s & gs.all_files != gs.all_files:
            raise StepError(f"FILECLOSE: H{gs.label(s)} does not contain every file")
        if s == gs.all_files:
            raise StepError("FILECLOSE: term is already H(W_[N])")
        out.take(s, w, gs, "FILECLOSE")
        out.add(gs.all_files, w)
    elif rule == "SYMM":
        (s,) = step.sets
        try:
            check_permutation(step.perm, gs.cfg.K)
        except DomainError as exc:
            raise StepError(f"SYMM: {exc}") from None
        img = gs.permute(s, step.perm)
        if img is None:
            raise StepError(f"SYMM: permutation {list(step.perm)} maps a broadcast of H{gs.label(s)} to an unlisted demand")
        if img == s:
            raise StepError("SYMM: permutation leaves the term unchanged")
        out.take(s, w, gs, "SYMM")
        out.add(img, w)
    elif rule == "CONST_FLOOR":
        (s,) = step.sets
        if not gs.is_pure_files(s):
            raise StepError(f"CONST_FLOOR: H{gs.label(s)} is not a pure file subset")
        out.take(s, w, gs, "CONST_FLOOR")
        out.constant += w * popcount(s)
    return out
