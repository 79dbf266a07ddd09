"""min R at fixed M over the Shannon cone with the caching constraints.

The LP is first reduced by the symmetry group: every subset is replaced by
its orbit representative (this is exactly what the listed symmetry equalities
say), and duplicate rows are merged.  The reduced LP is solved either

* ``exact``: the rational Bland simplex of :mod:`.simplex`, or
* ``float``: HiGHS dual simplex, whose primal vertex and duals are then
  rationalised and re-verified in exact arithmetic (primal feasibility, dual
  feasibility, equal objectives); if that verification fails the exact
  simplex is run instead.

``auto`` picks ``exact`` for small reduced LPs and ``float`` otherwise.
Either way the reported value is certified exactly by a primal vertex and a
dual certificate over the original (unreduced) constraints.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..bounds import LinearBound
from .certificate import DualCertificate, CertificateError, nonneg_combination, verify_certificate
from .problem import EQ, GE, LpProblem
from .simplex import solve_lp


class LpStatusError(RuntimeError):
    """Infeasible or unbounded LP: always a modelling bug for this problem."""


@dataclass
class ReducedLp:
    reps: List[int]  # column j -> representative mask (last column is R)
    col: Dict[int, int]
    rows: List[Tuple[Tuple[Tuple[int, Fraction], ...], str, Fraction, Fraction, Fraction]]
    # (coeffs over columns, sense, r-coefficient, const, m-coefficient)
    source: List[str]  # representative original constraint id per row

    @property
    def ncols(self) -> int:
        return len(self.reps) + 1

    @property
    def r_col(self) -> int:
        return len(self.reps)


def reduce_problem(problem: LpProblem) -> ReducedLp:
    rep = problem.rep
    reps = sorted({rep[s] for s in range(1, 1 << problem.gs.n)})
    col = {s: j for j, s in enumerate(reps)}
    r_col = len(reps)
    seen: Dict[tuple, int] = {}
    rows, source = [], []
    for c in problem.constraints:
        if c.kind == "symmetry":
            continue
        acc: Dict[int, Fraction] = {}
        for s, coef in c.terms:
            j = col[rep[s]]
            acc[j] = acc.get(j, Fraction(0)) + coef
        if c.r:
            acc[r_col] = acc.get(r_col, Fraction(0)) + c.r
        coeffs = tuple(sorted((j, v) for j, v in acc.items() if v != 0))
        if not coeffs and c.m == 0:
            continue
        key = (coeffs, c.sense, c.const, c.m)
        if key in seen:
            continue
        seen[key] = len(rows)
        rows.append((coeffs, c.sense, Fraction(0), c.const, c.m))
        source.append(c.id)
    return ReducedLp(reps, col, rows, source)


@dataclass
class LpSolution:
    value: Fraction
    m: Fraction
    x: Dict[int, Fraction]  # entropy of every nonempty subset
    rate: Fraction
    certificate: DualCertificate
    implied: LinearBound
    method: str
    pivots: int = 0
    seconds: float = 0.0
    reduced_size: Tuple[int, int] = (0, 0)

    def to_json(self) -> dict:
        from ..rational import format_rational

        return {
            "m": format_rational(self.m),
            "value": format_rational(self.value),
            "method": self.method,
            "implied": self.implied.to_json(),
            "reduced_rows": self.reduced_size[0],
            "reduced_cols": self.reduced_size[1],
        }


def _rhs(row, m: Fraction) -> Fraction:
    return row[3] - row[4] * m


def _check_primal(red: ReducedLp, x: List[Fraction], m: Fraction) -> bool:
    if any(v < 0 for v in x):
        return False
    for coeffs, sense, _, const, mc in red.rows:
        lhs = sum((v * x[j] for j, v in coeffs), Fraction(0))
        rhs = const - mc * m
        if sense == EQ and lhs != rhs:
            return False
        if sense == GE and lhs < rhs:
            return False
    return True


def _check_dual(red: ReducedLp, y: List[Fraction], m: Fraction) -> Optional[Fraction]:
    g = [Fraction(0)] * red.ncols
    for yi, (coeffs, sense, _, _, _) in zip(y, red.rows):
        if sense == GE and yi < 0:
            return None
        if yi:
            for j, v in coeffs:
                g[j] += yi * v
    cost = [Fraction(0)] * red.ncols
    cost[red.r_col] = Fraction(1)
    if any(gj > cj for gj, cj in zip(g, cost)):
        return None
    return sum((yi * _rhs(row, m) for yi, row in zip(y, red.rows)), Fraction(0))


def _solve_exact(red: ReducedLp, m: Fraction):
    cost = [Fraction(0)] * red.ncols
    cost[red.r_col] = Fraction(1)
    rows = [(dict(coeffs), sense, _rhs((coeffs, sense, r, const, mc), m)) for coeffs, sense, r, const, mc in red.rows]
    res = solve_lp(cost, rows, red.ncols)
    if res.status != "optimal":
        raise LpStatusError(f"LP is {res.status}")
    return res.x, res.y, res.value, res.pivots


def _rationalize(values, limit: int) -> List[Fraction]:
    out = []
    for v in values:
        q = Fraction(float(v)).limit_denominator(limit)
        out.append(q)
    return out


def _solve_float(red: ReducedLp, m: Fraction, presolve: bool = True):
    import numpy as np
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    ub_r, ub_c, ub_v, ub_b, ub_idx = [], [], [], [], []
    eq_r, eq_c, eq_v, eq_b, eq_idx = [], [], [], [], []
    for i, row in enumerate(red.rows):
        coeffs, sense = row[0], row[1]
        rhs = float(_rhs(row, m))
        if sense == GE:
            k = len(ub_idx)
            for j, v in coeffs:
                ub_r.append(k)
                ub_c.append(j)
                ub_v.append(-float(v))
            ub_b.append(-rhs)
            ub_idx.append(i)
        else:
            k = len(eq_idx)
            for j, v in coeffs:
                eq_r.append(k)
                eq_c.append(j)
                eq_v.append(float(v))
            eq_b.append(rhs)
            eq_idx.append(i)
    n = red.ncols
    cost = np.zeros(n)
    cost[red.r_col] = 1.0
    a_ub = coo_matrix((ub_v, (ub_r, ub_c)), shape=(len(ub_idx), n)).tocsr() if ub_idx else None
    a_eq = coo_matrix((eq_v, (eq_r, eq_c)), shape=(len(eq_idx), n)).tocsr() if eq_idx else None
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=np.array(ub_b) if ub_idx else None,
        A_eq=a_eq,
        b_eq=np.array(eq_b) if eq_idx else None,
        bounds=[(0, None)] * n,
        method="highs-ds",
        options={"presolve": presolve},
    )
    if res.status == 2:
        raise LpStatusError("LP is infeasible")
    if res.status == 3:
        raise LpStatusError("LP is unbounded")
    if res.status != 0:
        return None
    y = [0.0] * len(red.rows)
    for k, i in enumerate(ub_idx):
        y[i] = -float(res.ineqlin.marginals[k])
    for k, i in enumerate(eq_idx):
        y[i] = float(res.eqlin.marginals[k])
    return res.x, y


def _certificate_from_duals(problem: LpProblem, red: ReducedLp, y: List[Fraction]) -> DualCertificate:
    cert = DualCertificate()
    for yi, cid in zip(y, red.source):
        cert.add(cid, yi)
    # residual over original subsets, moved onto orbit representatives
    resid: Dict[int, Fraction] = {}
    for cid, w in cert.multipliers.items():
        for s, coef in problem.by_id[cid].terms:
            resid[s] = resid.get(s, Fraction(0)) + w * coef
    rep_resid: Dict[int, Fraction] = {}
    for s, v in resid.items():
        if v == 0:
            continue
        r = problem.rep[s]
        if r != s:
            cert.add_row(problem.sym_form(s), -v)
        rep_resid[r] = rep_resid.get(r, Fraction(0)) + v
    for r, v in rep_resid.items():
        if v > 0:
            raise CertificateError(f"dual residual {v} > 0 on H{problem.gs.label(r)}")
        if v < 0:
            nonneg_combination(problem, r, -v, cert)
    return cert


def _trivial_certificate(problem: LpProblem) -> DualCertificate:
    """R >= H(X_d) >= 0."""
    cert = DualCertificate()
    d = problem.gs.demands[0]
    cert.add_row(problem.index[("broadcast", d.requests)], Fraction(1))
    nonneg_combination(problem, problem.gs.x(d), Fraction(1), cert)
    return cert


def solve_min_rate(problem: LpProblem, m: Fraction, method: str = "auto", exact_limit: int = 400) -> LpSolution:
    t0 = time.time()
    m = Fraction(m)
    red = reduce_problem(problem)
    if method == "auto":
        method = "exact" if len(red.rows) * red.ncols <= exact_limit * 50 else "float"
    used = method
    pivots = 0
    x = y = None
    value = None
    if method == "float":
        # presolved duals may sit inside a degenerate optimal face and then do
        # not rationalise; the unpresolved run returns a basic dual solution
        for presolve in (True, False):
            got = _solve_float(red, m, presolve=presolve)
            if got is None:
                continue
            xf, yf = got
            for limit in (10**3, 10**4, 10**6):
                xq = _rationalize(xf, limit)
                yq = _rationalize(yf, limit)
                if not _check_primal(red, xq, m):
                    continue
                dval = _check_dual(red, yq, m)
                if dval is not None and dval == xq[red.r_col]:
                    x, y, value = xq, yq, dval
                    break
            if value is not None:
                break
        if value is None:
            used = "exact (float verification failed)"
    if value is None:
        x, y, value, pivots = _solve_exact(red, m)
        if _check_dual(red, y, m) != value or not _check_primal(red, x, m):
            raise RuntimeError("internal error: exact simplex output failed verification")
    cert = _certificate_from_duals(problem, red, y)
    try:
        implied = verify_certificate(problem, cert)
    except CertificateError:
        if value != 0:
            raise
        cert = _trivial_certificate(problem)
        implied = verify_certificate(problem, cert)
    if implied.rate_at(m) != value:
        if value == 0:
            cert = _trivial_certificate(problem)
            implied = verify_certificate(problem, cert)
        else:
            raise RuntimeError(f"certificate implies {implied.rate_at(m)} at m={m}, LP value {value}")
    cert.implied = implied
    xs = {s: x[red.col[problem.rep[s]]] for s in range(1, 1 << problem.gs.n)}
    return LpSolution(
        value=value,
        m=m,
        x=xs,
        rate=x[red.r_col],
        certificate=cert,
        implied=implied,
        method=used,
        pivots=pivots,
        seconds=time.time() - t0,
        reduced_size=(len(red.rows), red.ncols),
    )
