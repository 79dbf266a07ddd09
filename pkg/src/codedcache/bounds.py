"""Closed-form lower bounds, achievable curves and the envelopes built from them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .model import CaseTag, DomainError, NetworkConfig
from .rational import format_line, format_rational
from .schemes import chen_rate, lower_hull, yu_rate

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class LinearBound:
    """a*M + b*R >= c with b > 0."""

    a: Fraction
    b: Fraction
    c: Fraction
    origin: str = "derived"

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.b <= 0:
            raise DomainError(f"rate coefficient must be positive, got b={self.b}")

    def rate_at(self, m: Fraction) -> Fraction:
        return (self.c - self.a * Fraction(m)) / self.b

    def normalized(self) -> "LinearBound":
        return LinearBound(self.a / self.b, Fraction(1), self.c / self.b, self.origin)

    @property
    def coefficients(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c)

    def same_inequality(self, other: "LinearBound") -> bool:
        """Equal up to positive scaling."""
        n1, n2 = self.normalized(), other.normalized()
        return (n1.a, n1.c) == (n2.a, n2.c)

    def to_json(self) -> dict:
        return {
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "c": format_rational(self.c),
            "origin": self.origin,
        }

    def __str__(self) -> str:
        return f"{format_rational(self.a)}M + {format_rational(self.b)}R >= {format_rational(self.c)}"


@dataclass(frozen=True)
class TradeoffCurve:
    """Piecewise-linear R(M) through ``breakpoints``; ``provenance[i]`` labels
    the segment between breakpoints i and i+1."""

    name: str
    breakpoints: Tuple[Point, ...]
    provenance: Tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self) -> None:
        pts = tuple((Fraction(m), Fraction(r)) for m, r in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise DomainError(f"curve {self.name}: breakpoints must have increasing M")
        if not self.provenance:
            object.__setattr__(self, "provenance", tuple(self.name for _ in pts[1:]))

    @property
    def domain(self) -> Tuple[Fraction, Fraction]:
        return self.breakpoints[0][0], self.breakpoints[-1][0]

    def evaluate(self, m: Fraction) -> Fraction:
        m = Fraction(m)
        lo, hi = self.domain
        if m < lo or m > hi:
            raise DomainError(f"curve {self.name}: M={m} outside [{lo}, {hi}]")
        pts = self.breakpoints
        for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
            if x1 <= m <= x2:
                return y1 + (y2 - y1) * (m - x1) / (x2 - x1)
        return pts[0][1]

    def slopes(self) -> List[Fraction]:
        pts = self.breakpoints
        return [(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(pts, pts[1:])]

    def is_convex_nonincreasing(self) -> bool:
        s = self.slopes()
        return all(v <= 0 for v in s) and all(a <= b for a, b in zip(s, s[1:]))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "breakpoints": [[format_rational(m), format_rational(r)] for m, r in self.breakpoints],
            "provenance": list(self.provenance),
            "note": self.note,
        }


# ------------------------------------------------------------- bounds


def theorem1_bound(cfg: NetworkConfig) -> LinearBound:
    n, k = cfg.N, cfg.K
    if cfg.case != CaseTag.CASE_I:
        raise DomainError(f"Theorem 1 needs ceil((K+1)/2)={cfg.threshold} <= N, got {cfg}")
    return LinearBound(k * (n - 1), k, k * n - 1, "theorem1")


def theorem2_bound(cfg: NetworkConfig, override: bool = False) -> LinearBound:
    n, k = cfg.N, cfg.K
    if cfg.case != CaseTag.CASE_II and not (override and cfg.is_boundary):
        raise DomainError(f"Theorem 2 needs N < ceil((K+1)/2)={cfg.threshold}, got {cfg}")
    a = Fraction(k * (n * (k + 3) - 2 * (n * n + 1)), 2)
    b = Fraction(k * (k + 3 - 2 * n), 2)
    c = Fraction(n * k * (k - 2 * n + 3) - 2, 2)
    return LinearBound(a, b, c, "theorem2")


def cutset_bound(cfg: NetworkConfig) -> List[LinearBound]:
    out = []
    for s in range(1, min(cfg.N, cfg.K) + 1):
        out.append(LinearBound(Fraction(s, cfg.N // s), 1, s, f"cutset({s})"))
    return out


# Evaluated prior bounds that the comparison/example tables print as lines.
_REFERENCE_LINES: Dict[Tuple[int, int], List[LinearBound]] = {
    # (3,4) table, "max{(3-3M),(8/3-2M)}": the second line is a prior result.
    (3, 4): [LinearBound(2, 1, Fraction(8, 3), "external_reference")],
}


def reference_bounds(cfg: NetworkConfig) -> List[LinearBound]:
    return list(_REFERENCE_LINES.get((cfg.N, cfg.K), []))


def all_bounds(cfg: NetworkConfig, include_reference: bool = True) -> List[LinearBound]:
    """Every lower bound this package evaluates for ``cfg``.

    Theorem 2 is included in Case II only for N >= 2: with a single file the
    inequality is violated by full caching (M, R) = (1, 0), see the notes in
    ``theorem2_valid``.
    """
    out = cutset_bound(cfg)
    if cfg.case == CaseTag.CASE_I:
        out.append(theorem1_bound(cfg))
    elif theorem2_valid(cfg):
        out.append(theorem2_bound(cfg))
    if include_reference:
        out.extend(reference_bounds(cfg))
    return out


def theorem2_valid(cfg: NetworkConfig) -> bool:
    """Whether Theorem 2's inequality holds as a bound on all achievable pairs.

    For N = 1 it does not: a*1 + b*0 < c at the achievable point (1, 0).
    """
    return cfg.case == CaseTag.CASE_II and cfg.N >= 2


def lower_envelope(bounds: Sequence[LinearBound], m: Fraction) -> Fraction:
    if not bounds:
        raise DomainError("empty bound set")
    return max(b.rate_at(m) for b in bounds)


def _line_points(bounds: Sequence[LinearBound], lo: Fraction, hi: Fraction) -> List[Fraction]:
    xs = {Fraction(lo), Fraction(hi)}
    for i, p in enumerate(bounds):
        for q in bounds[i + 1 :]:
            sp, sq = -p.a / p.b, -q.a / q.b
            if sp != sq:
                x = (q.c / q.b - p.c / p.b) / (sp - sq)
                if lo < x < hi:
                    xs.add(x)
    return sorted(xs)


def envelope_curve(bounds: Sequence[LinearBound], lo: Fraction, hi: Fraction, name: str = "lower_envelope") -> TradeoffCurve:
    """max over bounds as an explicit piecewise-linear curve on [lo, hi]."""
    xs = _line_points(bounds, lo, hi)
    pts = [(x, lower_envelope(bounds, x)) for x in xs]
    pts = _drop_collinear(pts)
    prov = []
    for (x1, _), (x2, _) in zip(pts, pts[1:]):
        mid = (x1 + x2) / 2
        val = lower_envelope(bounds, mid)
        prov.append("+".join(sorted({b.origin for b in bounds if b.rate_at(mid) == val})))
    return TradeoffCurve(name, tuple(pts), tuple(prov))


def _drop_collinear(pts: List[Point]) -> List[Point]:
    out: List[Point] = []
    for p in pts:
        while len(out) >= 2:
            (x1, y1), (x2, y2) = out[-2], out[-1]
            if (y2 - y1) * (p[0] - x1) == (p[1] - y1) * (x2 - x1):
                out.pop()
            else:
                break
        out.append(p)
    return out


# --------------------------------------------------------- achievable


def bridge_rate(cfg: NetworkConfig, m: Fraction) -> Fraction:
    return Fraction(cfg.K * cfg.N - 1, cfg.K) - (cfg.N - 1) * Fraction(m)


def achievable_points(cfg: NetworkConfig) -> List[Tuple[Fraction, Fraction, str]]:
    n, k = cfg.N, cfg.K
    pts = [(Fraction(0), Fraction(n), "chen"), (Fraction(1, k), chen_rate(cfg), "chen")]
    for t in range(k + 1):
        pts.append((Fraction(n * t, k), yu_rate(cfg, t), f"yu(t={t})"))
    if n >= 2:
        m_hi = Fraction(n, k * (n - 1))
        pts.append((m_hi, bridge_rate(cfg, m_hi), "bridge"))
    return pts


def achievable_curves(cfg: NetworkConfig) -> List[TradeoffCurve]:
    n, k = cfg.N, cfg.K
    curves = [
        TradeoffCurve("chen", ((0, n), (Fraction(1, k), chen_rate(cfg)))),
        TradeoffCurve("mn", ((Fraction(n * (k - 1), k), Fraction(1, k)), (n, 0))),
        TradeoffCurve(
            "yu",
            tuple((Fraction(n * t, k), yu_rate(cfg, t)) for t in range(k + 1)),
            tuple(f"yu(t={t}..{t + 1})" for t in range(k)),
        ),
    ]
    if n >= 2:
        lo, hi = Fraction(1, k), Fraction(n, k * (n - 1))
        note = "" if cfg.case == CaseTag.CASE_I else "optimal only for Case I"
        curves.append(TradeoffCurve("bridge", ((lo, bridge_rate(cfg, lo)), (hi, bridge_rate(cfg, hi))), note=note))
    return curves


def achievable_envelope(cfg: NetworkConfig) -> TradeoffCurve:
    """Memory-sharing (lower convex hull) of every achievable point above."""
    labelled = achievable_points(cfg)
    hull = lower_hull([(m, r) for m, r, _ in labelled])
    prov = []
    for p, q in zip(hull, hull[1:]):
        src_p = sorted({s for m, r, s in labelled if (m, r) == p})
        src_q = sorted({s for m, r, s in labelled if (m, r) == q})
        prov.append(f"{'/'.join(src_p)} -- {'/'.join(src_q)}")
    return TradeoffCurve("achievable_envelope", tuple(hull), tuple(prov))


# ---------------------------------------------------------- segments


@dataclass(frozen=True)
class Segment:
    lo: Fraction
    hi: Fraction
    status: str  # "exact" | "gap"
    lower: Tuple[Fraction, Fraction]  # (intercept, slope)
    upper: Tuple[Fraction, Fraction]
    lower_origin: str
    upper_origin: str

    @property
    def line(self) -> Tuple[Fraction, Fraction]:
        return self.lower

    def to_json(self) -> dict:
        return {
            "interval": [format_rational(self.lo), format_rational(self.hi)],
            "status": self.status,
            "lower": format_line(*self.lower),
            "upper": format_line(*self.upper),
            "lower_origin": self.lower_origin,
            "upper_origin": self.upper_origin,
        }


def _line_through(x1: Fraction, y1: Fraction, x2: Fraction, y2: Fraction) -> Tuple[Fraction, Fraction]:
    slope = (y2 - y1) / (x2 - x1)
    return (y1 - slope * x1, slope)


def natural_breakpoints(cfg: NetworkConfig) -> List[Fraction]:
    n, k = cfg.N, cfg.K
    xs = {Fraction(0), Fraction(1, k), Fraction(n * (k - 1), k), Fraction(n)}
    if n >= 2:
        xs.add(Fraction(n, k * (n - 1)))
    return sorted(x for x in xs if 0 <= x <= n)


def exact_segments(cfg: NetworkConfig) -> List[Segment]:
    n = Fraction(cfg.N)
    bounds = all_bounds(cfg)
    low = envelope_curve(bounds, Fraction(0), n)
    up = achievable_envelope(cfg)
    xs = set(natural_breakpoints(cfg))
    xs.update(m for m, _ in low.breakpoints)
    xs.update(m for m, _ in up.breakpoints)
    xs = sorted(x for x in xs if 0 <= x <= n)
    out = []
    for x1, x2 in zip(xs, xs[1:]):
        l1, l2 = low.evaluate(x1), low.evaluate(x2)
        u1, u2 = up.evaluate(x1), up.evaluate(x2)
        status = "exact" if (l1, l2) == (u1, u2) else "gap"
        mid = (x1 + x2) / 2
        lo_origin = "+".join(sorted({b.origin for b in bounds if b.rate_at(mid) == low.evaluate(mid)}))
        up_origin = next(
            (p for (a, _), (b, _), p in zip(up.breakpoints, up.breakpoints[1:], up.provenance) if a <= mid <= b),
            "",
        )
        out.append(
            Segment(x1, x2, status, _line_through(x1, l1, x2, l2), _line_through(x1, u1, x2, u2), lo_origin, up_origin)
        )
    return out


# ---------------------------------------------------- comparison table


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    k: int
    case: str
    memory: Fraction
    cut_set: Fraction
    prior_best: Fraction  # strongest earlier bound printed in the table column
    new_bound: Fraction
    computed_cutset: Fraction
    computed_new_bound: Fraction

    def to_json(self) -> dict:
        out = {"n": self.n, "k": self.k, "case": self.case}
        for key in (
            "memory", "cut_set", "prior_best", "new_bound", "computed_cutset", "computed_new_bound",
        ):
            out[key] = format_rational(getattr(self, key))
        return out


def comparison_table_row(cfg: NetworkConfig, case: Optional[CaseTag] = None) -> ComparisonRow:
    """Closed-form comparison entries at M = N/(K(N-1)), plus the same quantities recomputed
    from the bound implementations (``computed_*``)."""
    n, k = cfg.N, cfg.K
    if n == 1:
        raise DomainError("comparison table needs N >= 2 (M = N/(K(N-1)) is undefined for N = 1)")
    tag = CaseTag(case) if case is not None else cfg.case
    m = Fraction(n, k * (n - 1))
    cut = n - Fraction(n * n, (n - 1) * k)
    if tag == CaseTag.CASE_I:
        prior = cut + Fraction(1, k * (n - 1)) * (n - k + Fraction(k, n))
        new = cut + Fraction(1, k * (n - 1))
        computed_new = theorem1_bound(cfg).rate_at(m)
    else:
        prior = cut
        new = n - Fraction(n * n, k * (n - 1)) + Fraction(2, k * (n - 1) * (k + 3 - 2 * n))
        computed_new = theorem2_bound(cfg, override=True).rate_at(m)
    return ComparisonRow(
        n=n, k=k, case=tag.value, memory=m, cut_set=cut, prior_best=prior, new_bound=new,
        computed_cutset=lower_envelope(cutset_bound(cfg), m), computed_new_bound=computed_new,
    )
