"""Proof chains: start expression, ordered steps, claimed bound; replay and I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..bounds import LinearBound
from ..lp.ground import GroundSet, popcount
from ..model import Demand, NetworkConfig
from ..rational import format_rational, parse_rational
from .expression import EntropyExpression, ProofStep, StepError, apply_step

SYMM_NOTE = (
    "SYMM steps use the general user-permutation form "
    "H(W_A,Z_B,X_d) = H(W_A,Z_pi(B),X_pi(d)) of the symmetric-scheme property"
)


class ChainError(ValueError):
    pass


@dataclass
class ProofChain:
    gs: GroundSet
    start: Dict[int, Fraction]  # single-variable masks (Z_l or X_d) -> coefficient
    steps: List[ProofStep]
    claimed: LinearBound
    title: str = ""

    def start_expression(self) -> EntropyExpression:
        expr = EntropyExpression()
        for s, c in self.start.items():
            expr.add(s, Fraction(c))
        return expr

    def start_coefficients(self) -> Tuple[Fraction, Fraction]:
        a = b = Fraction(0)
        for s, c in self.start.items():
            if popcount(s) != 1:
                raise ChainError(f"start term H{self.gs.label(s)} is not a single cache or broadcast")
            if s & self.gs.cache_bits:
                a += c
            elif s & self.gs.broadcast_bits:
                b += c
            else:
                raise ChainError(f"start term H{self.gs.label(s)} is a file, not a cache or broadcast")
            if c <= 0:
                raise ChainError(f"start coefficient of H{self.gs.label(s)} must be positive")
        return a, b


def replay(chain: ProofChain) -> List[EntropyExpression]:
    """All intermediate expressions, starting with the start expression."""
    exprs = [chain.start_expression()]
    for idx, step in enumerate(chain.steps):
        try:
            exprs.append(apply_step(exprs[-1], step, chain.gs))
        except StepError as exc:
            raise ChainError(f"step {idx + 1} ({step.rule}{' # ' + step.tag if step.tag else ''}): {exc}") from None
    return exprs


def verify_chain(chain: ProofChain) -> LinearBound:
    a, b = chain.start_coefficients()
    final = replay(chain)[-1]
    if not final.is_constant():
        raise ChainError(f"final expression is not a constant; leftover terms: {final.render(chain.gs)}")
    got = LinearBound(a, b, final.constant, chain.claimed.origin)
    if got.coefficients != chain.claimed.coefficients:
        raise ChainError(f"chain proves {got} but claims {chain.claimed}")
    return got


# ------------------------------------------------------------ transcript


def _step_text(step: ProofStep, gs: GroundSet) -> str:
    parts = [step.rule] + [gs.label(s) for s in step.sets]
    if step.user is not None:
        parts.append(f"user={step.user}")
    if step.demand is not None:
        parts.append("demand=" + str(Demand(step.demand)))
    if step.perm is not None:
        parts.append("perm=" + ",".join(str(p) for p in step.perm))
    parts.append(f"w={format_rational(step.weight)}")
    line = " ".join(parts)
    if step.tag:
        line += f" # {step.tag}"
    return line


def to_transcript(chain: ProofChain) -> str:
    gs = chain.gs
    lines = []
    if chain.title:
        lines.append(f"# {chain.title}")
    lines.append(f"# note: {SYMM_NOTE}")
    lines.append(f"GROUND n={gs.cfg.N} k={gs.cfg.K} demands=" + ";".join(str(d) for d in gs.demands))
    start = " ".join(f"{gs.labels[s.bit_length() - 1]}:{format_rational(c)}" for s, c in sorted(chain.start.items()))
    lines.append(f"START {start}")
    cl = chain.claimed
    lines.append(f"CLAIM {format_rational(cl.a)} {format_rational(cl.b)} {format_rational(cl.c)} origin={cl.origin}")
    lines.extend(_step_text(s, gs) for s in chain.steps)
    return "\n".join(lines) + "\n"


def _parse_tuple(text: str) -> Tuple[int, ...]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    return tuple(int(v) for v in body.split(",") if v.strip())


def from_transcript(text: str, cap: int = 64) -> ProofChain:
    gs: Optional[GroundSet] = None
    start: Dict[int, Fraction] = {}
    claimed: Optional[LinearBound] = None
    title = ""
    steps: List[ProofStep] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if not title and not line.startswith("# note:"):
                title = line[1:].strip()
            continue
        body, _, tag = line.partition("#")
        toks = body.split()
        head = toks[0]
        try:
            if head == "GROUND":
                kv = dict(t.split("=", 1) for t in toks[1:])
                cfg = NetworkConfig(int(kv["n"]), int(kv["k"]))
                demands = [Demand(_parse_tuple(d)) for d in kv["demands"].split(";")]
                gs = GroundSet(cfg, tuple(demands), cap)
            elif head == "START":
                for t in toks[1:]:
                    name, _, coef = t.rpartition(":")
                    start[gs.parse_label("{" + name + "}")] = parse_rational(coef)
            elif head == "CLAIM":
                origin = "claimed"
                nums = []
                for t in toks[1:]:
                    if t.startswith("origin="):
                        origin = t.split("=", 1)[1]
                    else:
                        nums.append(parse_rational(t))
                claimed = LinearBound(*nums, origin=origin)
            else:
                sets, kw = [], {}
                for t in toks[1:]:
                    if t.startswith("{"):
                        sets.append(gs.parse_label(t))
                    else:
                        key, _, val = t.partition("=")
                        kw[key] = val
                steps.append(
                    ProofStep(
                        rule=head,
                        sets=tuple(sets),
                        weight=parse_rational(kw.get("w", "1")),
                        user=int(kw["user"]) if "user" in kw else None,
                        demand=_parse_tuple(kw["demand"]) if "demand" in kw else None,
                        perm=_parse_tuple(kw["perm"]) if "perm" in kw else None,
                        tag=tag.strip(),
                    )
                )
        except (KeyError, ValueError, AttributeError, TypeError) as exc:
            raise ChainError(f"transcript line {lineno}: {exc}") from None
    if gs is None or claimed is None:
        raise ChainError("transcript lacks GROUND or CLAIM line")
    return ProofChain(gs, start, steps, claimed, title)


def to_json(chain: ProofChain) -> dict:
    gs = chain.gs
    return {
        "title": chain.title,
        "note": SYMM_NOTE,
        "ground_set": {"n": gs.cfg.N, "k": gs.cfg.K, "demands": [list(d.requests) for d in gs.demands]},
        "start": {gs.labels[s.bit_length() - 1]: format_rational(c) for s, c in sorted(chain.start.items())},
        "claimed": chain.claimed.to_json(),
        "steps": [
            {
                "rule": s.rule,
                "sets": [gs.label(m) for m in s.sets],
                "weight": format_rational(s.weight),
                **({"user": s.user} if s.user is not None else {}),
                **({"demand": list(s.demand)} if s.demand is not None else {}),
                **({"perm": list(s.perm)} if s.perm is not None else {}),
                "tag": s.tag,
            }
            for s in chain.steps
        ],
    }


def from_json(data: dict, cap: int = 64) -> ProofChain:
    g = data["ground_set"]
    gs = GroundSet(NetworkConfig(g["n"], g["k"]), tuple(Demand(tuple(d)) for d in g["demands"]), cap)
    start = {gs.parse_label("{" + name + "}"): parse_rational(c) for name, c in data["start"].items()}
    cl = data["claimed"]
    claimed = LinearBound(parse_rational(cl["a"]), parse_rational(cl["b"]), parse_rational(cl["c"]), cl.get("origin", "claimed"))
    steps = [
        ProofStep(
            rule=s["rule"],
            sets=tuple(gs.parse_label(m) for m in s["sets"]),
            weight=parse_rational(s["weight"]),
            user=s.get("user"),
            demand=tuple(s["demand"]) if "demand" in s else None,
            perm=tuple(s["perm"]) if "perm" in s else None,
            tag=s.get("tag", ""),
        )
        for s in data["steps"]
    ]
    return ProofChain(gs, start, steps, claimed, data.get("title", ""))
