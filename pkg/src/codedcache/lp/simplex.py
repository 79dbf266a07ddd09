"""Exact two-phase tableau simplex over Fractions with Bland's rule.

Problem form: minimise c.x subject to rows (coeffs, sense, rhs) with
sense in {">=", "<=", "=="} and x >= 0.  Returns an optimal vertex together
with row duals y (y >= 0 on ">=" rows, y <= 0 on "<=" rows) satisfying
c - A^T y >= 0 componentwise, so that y.b equals the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

Row = Tuple[Dict[int, Fraction], str, Fraction]


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction]
    x: Optional[List[Fraction]]
    y: Optional[List[Fraction]]
    pivots: int


class _Tableau:
    def __init__(self, rows: List[List[Fraction]], rhs: List[Fraction], basis: List[int]):
        self.a = rows
        self.b = rhs
        self.basis = basis

    def pivot(self, r: int, col: int) -> None:
        a, b = self.a, self.b
        prow = a[r]
        inv = 1 / prow[col]
        if inv != 1:
            a[r] = prow = [v * inv for v in prow]
            b[r] *= inv
        nz = [(j, v) for j, v in enumerate(prow) if v]
        for i in range(len(a)):
            if i == r:
                continue
            f = a[i][col]
            if f:
                row = a[i]
                for j, v in nz:
                    row[j] -= f * v
                b[i] -= f * b[r]
        self.basis[r] = col


def _reduced_costs(tab: _Tableau, cost: List[Fraction]) -> Tuple[List[Fraction], Fraction]:
    ncol = len(cost)
    red = list(cost)
    obj = Fraction(0)
    for i, bv in enumerate(tab.basis):
        cb = cost[bv]
        if cb:
            row = tab.a[i]
            for j in range(ncol):
                if row[j]:
                    red[j] -= cb * row[j]
            obj += cb * tab.b[i]
    return red, obj


def _run(tab: _Tableau, cost: List[Fraction], allowed: List[bool], max_pivots: int) -> Tuple[str, int]:
    pivots = 0
    while True:
        red, _ = _reduced_costs(tab, cost)
        enter = next((j for j, v in enumerate(red) if v < 0 and allowed[j]), None)
        if enter is None:
            return "optimal", pivots
        best = None
        for i, row in enumerate(tab.a):
            if row[enter] > 0:
                ratio = tab.b[i] / row[enter]
                key = (ratio, tab.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", pivots
        tab.pivot(best[1], enter)
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("pivot limit exceeded")


def solve_lp(c: Sequence[Fraction], rows: Sequence[Row], nvars: int, max_pivots: int = 10**6) -> SimplexResult:
    m = len(rows)
    flips: List[int] = []
    dense: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    senses: List[str] = []
    for coeffs, sense, b in rows:
        b = Fraction(b)
        sign = 1
        if b < 0:
            sign = -1
            b = -b
            sense = {">=": "<=", "<=": ">=", "==": "=="}[sense]
        row = [Fraction(0)] * nvars
        for j, v in coeffs.items():
            row[j] = Fraction(v) * sign
        dense.append(row)
        rhs.append(b)
        senses.append(sense)
        flips.append(sign)
    # columns: structural | surplus/slack per inequality | identity column per row
    slack_col: Dict[int, int] = {}
    ncol = nvars
    for i, s in enumerate(senses):
        if s != "==":
            slack_col[i] = ncol
            ncol += 1
    ident_col = {}
    for i in range(m):
        if senses[i] == "<=":
            ident_col[i] = slack_col[i]  # slack doubles as the identity column
        else:
            ident_col[i] = ncol
            ncol += 1
    artificial = [False] * ncol
    table = []
    for i in range(m):
        row = dense[i] + [Fraction(0)] * (ncol - nvars)
        if senses[i] == ">=":
            row[slack_col[i]] = Fraction(-1)
            row[ident_col[i]] = Fraction(1)
            artificial[ident_col[i]] = True
        elif senses[i] == "<=":
            row[slack_col[i]] = Fraction(1)
        else:
            row[ident_col[i]] = Fraction(1)
            artificial[ident_col[i]] = True
        table.append(row)
    tab = _Tableau(table, rhs, [ident_col[i] for i in range(m)])
    pivots = 0
    if any(artificial):
        cost1 = [Fraction(1) if artificial[j] else Fraction(0) for j in range(ncol)]
        status, p = _run(tab, cost1, [True] * ncol, max_pivots)
        pivots += p
        _, obj = _reduced_costs(tab, cost1)
        if obj != 0:
            return SimplexResult("infeasible", None, None, None, pivots)
        # drive zero-valued artificials out of the basis where possible
        for i, bv in enumerate(tab.basis):
            if artificial[bv]:
                col = next((j for j in range(ncol) if not artificial[j] and tab.a[i][j] != 0), None)
                if col is not None:
                    tab.pivot(i, col)
                    pivots += 1
    cost2 = [Fraction(c[j]) if j < nvars else Fraction(0) for j in range(ncol)]
    allowed = [not artificial[j] for j in range(ncol)]
    # a redundant row may keep an artificial basic at zero; it must stay there
    status, p = _run(tab, cost2, allowed, max_pivots)
    pivots += p
    if status == "unbounded":
        return SimplexResult("unbounded", None, None, None, pivots)
    red, obj = _reduced_costs(tab, cost2)
    x = [Fraction(0)] * ncol
    for i, bv in enumerate(tab.basis):
        x[bv] = tab.b[i]
    # identity column of row i has cost 0 and A-column e_i: reduced cost = -y_i
    y = [(-red[ident_col[i]]) * flips[i] for i in range(m)]
    return SimplexResult("optimal", obj, x[:nvars], y, pivots)
