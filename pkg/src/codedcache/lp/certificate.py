"""Dual certificates: multipliers over LP constraints and their exact recombination.

The helpers in this module also express standard Shannon facts (conditional
mutual information, monotonicity, nonnegativity) as exact combinations of
elemental rows, which is how both solver output and proof chains are turned
into certificates that only reference constraints listed in the problem.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from ..bounds import LinearBound
from ..rational import format_rational, parse_rational
from .ground import bits
from .problem import EQ, GE, Constraint, LpProblem


class CertificateError(ValueError):
    pass


@dataclass
class DualCertificate:
    multipliers: Dict[str, Fraction] = field(default_factory=dict)
    implied: Optional[LinearBound] = None

    def add(self, cid: str, weight: Fraction) -> None:
        if weight == 0:
            return
        total = self.multipliers.get(cid, Fraction(0)) + Fraction(weight)
        if total == 0:
            self.multipliers.pop(cid, None)
        else:
            self.multipliers[cid] = total

    def add_row(self, row: Optional[Constraint], weight: Fraction) -> None:
        if row is not None:
            self.add(row.id, weight)

    def merge(self, other: "DualCertificate", scale: Fraction = Fraction(1)) -> None:
        for cid, w in other.multipliers.items():
            self.add(cid, w * scale)

    def to_json(self) -> dict:
        out = {"multipliers": [[cid, format_rational(w)] for cid, w in sorted(self.multipliers.items())]}
        if self.implied is not None:
            out["implied"] = self.implied.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DualCertificate":
        cert = cls({cid: parse_rational(w) for cid, w in data["multipliers"]})
        if "implied" in data:
            imp = data["implied"]
            cert.implied = LinearBound(
                parse_rational(imp["a"]), parse_rational(imp["b"]), parse_rational(imp["c"]), imp.get("origin", "certificate")
            )
        return cert

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def recombine(problem: LpProblem, cert: DualCertificate) -> Tuple[Dict[int, Fraction], Fraction, Fraction, Fraction]:
    """Exact sum of multiplier * form; returns (entropy residual, a, b, c)."""
    resid: Dict[int, Fraction] = {}
    a = b = c = Fraction(0)
    for cid, w in cert.multipliers.items():
        row = problem.by_id.get(cid)
        if row is None:
            raise CertificateError(f"constraint id {cid} is not part of the problem")
        if row.sense == GE and w < 0:
            raise CertificateError(f"negative multiplier {w} on inequality {cid} ({row.kind})")
        for s, coef in row.terms:
            resid[s] = resid.get(s, Fraction(0)) + w * coef
        a += w * row.m
        b += w * row.r
        c += w * row.const
    return {s: v for s, v in resid.items() if v != 0}, a, b, c


def verify_certificate(problem: LpProblem, cert: DualCertificate) -> LinearBound:
    resid, a, b, c = recombine(problem, cert)
    if resid:
        s = min(resid, key=lambda x: (bin(x).count("1"), x))
        raise CertificateError(
            f"invalid certificate: residual coefficient {format_rational(resid[s])} on H{problem.gs.label(s)}"
            f" ({len(resid)} nonzero entropy terms remain)"
        )
    if b <= 0:
        raise CertificateError(f"certificate has no positive rate coefficient (b={b})")
    return LinearBound(a, b, c, "certificate")


# ------------------------------------------------- Shannon decompositions


def cmi(problem: LpProblem, a_vars: Iterable[int], b_vars: Iterable[int], cond: int, weight: Fraction, cert: DualCertificate) -> None:
    """Add ``weight`` * I(A; B | C) >= 0 as elemental rows (chain rule).

    ``a_vars``/``b_vars`` are variable indices, ``cond`` a mask.
    """
    a_list, b_list = list(a_vars), list(b_vars)
    for ia, x in enumerate(a_list):
        prefix_a = 0
        for y in a_list[:ia]:
            prefix_a |= 1 << y
        for ib, y in enumerate(b_list):
            prefix_b = 0
            for z in b_list[:ib]:
                prefix_b |= 1 << z
            k = cond | prefix_a | prefix_b
            i, j = min(x, y), max(x, y)
            if i == j:
                raise CertificateError("I(A;B|C) needs disjoint A and B")
            cert.add_row(problem.index[("submod", i, j, k)], weight)


def submod_combination(problem: LpProblem, s: int, t: int, weight: Fraction, cert: DualCertificate) -> None:
    """weight * [H(S) + H(T) - H(S u T) - H(S n T)] >= 0."""
    cmi(problem, bits(s & ~t), bits(t & ~s), s & t, weight, cert)


def mono_combination(problem: LpProblem, s: int, sub: int, weight: Fraction, cert: DualCertificate) -> None:
    """weight * [H(S) - H(S')] >= 0 for S' a subset of S."""
    if sub & ~s:
        raise CertificateError("monotonicity needs S' to be a subset of S")
    full = problem.gs.full
    v = s
    for i in reversed(bits(s & ~sub)):
        # H(V) - H(V-i) = [H(full) - H(full-i)] + I(i; full\V | V-i)
        cert.add_row(problem.index[("mono", i)], weight)
        cmi(problem, [i], bits(full & ~v), v & ~(1 << i), weight, cert)
        v &= ~(1 << i)


def nonneg_combination(problem: LpProblem, s: int, weight: Fraction, cert: DualCertificate) -> None:
    """weight * H(S) >= 0."""
    mono_combination(problem, s, 0, weight, cert)
