#!/usr/bin/env python3
"""Sweep the Shannon-type LP over a memory grid and compare it with the bounds.

For each M the script prints the LP minimum rate, the envelope of the
closed-form lower bounds and the best achievable rate, and (optionally)
writes the exact dual certificate of every point so that
``codedcache lp --verify FILE`` can re-check it later.

    python scripts/lp_oracle.py --n 2 --k 4 --grid 0,1/4,1/2,1 --certificates certs/
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List

from codedcache.bounds import achievable_envelope, all_bounds, lower_envelope
from codedcache.lp import build_problem, solve_min_rate
from codedcache.model import NetworkConfig, demand_family
from codedcache.rational import format_rational, parse_rational
from codedcache.schemas import header


@dataclass
class OracleConfig:
    n: int = 2
    k: int = 4
    grid: List[Fraction] = field(default_factory=lambda: [Fraction(0), Fraction(1, 4), Fraction(1, 2)])
    symmetry: bool = True
    cap: int = 12
    certificates: str = ""


def parse_args(argv=None) -> OracleConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=OracleConfig.n)
    p.add_argument("--k", type=int, default=OracleConfig.k)
    p.add_argument("--grid", default="0,1/4,1/2", help="comma-separated memory values (p/q)")
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("--cap", type=int, default=OracleConfig.cap)
    p.add_argument("--certificates", default="", help="directory for certificate JSON files")
    a = p.parse_args(argv)
    grid = [parse_rational(v) for v in a.grid.split(",") if v.strip()]
    return OracleConfig(a.n, a.k, grid, not a.no_symmetry, a.cap, a.certificates)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    net = NetworkConfig(cfg.n, cfg.k)
    demands = demand_family(net)
    t0 = time.perf_counter()
    problem = build_problem(net, demands, symmetry=cfg.symmetry, cap=cfg.cap)
    counts = ", ".join(f"{k} {v}" for k, v in problem.counts().items())
    print(f"{net}: {problem.gs.n} variables, constraints: {counts} (built in {time.perf_counter() - t0:.1f}s)")
    bounds, up = all_bounds(net), achievable_envelope(net)
    outdir = Path(cfg.certificates) if cfg.certificates else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    print(f"{'M':>8} {'LP':>8} {'bounds':>8} {'achiev.':>8}  status   implied bound")
    for m in cfg.grid:
        t = time.perf_counter()
        sol = solve_min_rate(problem, m)
        lo, hi = lower_envelope(bounds, m), up.evaluate(m)
        status = "tight" if sol.value == hi else ("above bounds" if sol.value > lo else "gap")
        print(
            f"{format_rational(m):>8} {format_rational(sol.value):>8} {format_rational(lo):>8} {format_rational(hi):>8}"
            f"  {status:<12} {sol.implied}  ({time.perf_counter() - t:.1f}s)"
        )
        if outdir:
            doc = {
                **header("certificate"),
                "problem": {"n": net.N, "k": net.K, "demands": [list(d.requests) for d in demands], "symmetry": cfg.symmetry, "cap": cfg.cap},
                "m": format_rational(m),
                "value": format_rational(sol.value),
                "certificate": sol.certificate.to_json(),
            }
            name = outdir / f"cert_{net.N}_{net.K}_m{format_rational(m).replace('/', '-')}.json"
            name.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
