#!/usr/bin/env python3
"""Recompute the comparison column and the exact tradeoff segments.

Writes a CSV (one row per (N, K) with 2 <= N <= K <= kmax) and prints the
exact / gap segments of selected networks.  Every number is an exact rational.

    python scripts/reproduce_tables.py --kmax 12 --out grid.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from typing import List, Tuple

from codedcache.bounds import comparison_table_row, exact_segments
from codedcache.model import NetworkConfig
from codedcache.rational import format_line, format_rational
from codedcache.schemas import GRID_CSV_HEADER


@dataclass
class TableConfig:
    kmax: int = 12
    out: str = ""
    segments: List[Tuple[int, int]] = field(default_factory=lambda: [(3, 4), (2, 4)])


def grid_rows(kmax: int) -> List[List[str]]:
    rows = []
    for k in range(2, kmax + 1):
        for n in range(2, k + 1):
            r = comparison_table_row(NetworkConfig(n, k))
            assert r.computed_new_bound == r.new_bound
            rows.append(
                [str(n), str(k), r.case]
                + [format_rational(v) for v in (r.memory, r.cut_set, r.prior_best, r.new_bound, r.new_bound - r.cut_set)]
            )
    return rows


def parse_args(argv=None) -> TableConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmax", type=int, default=TableConfig.kmax)
    p.add_argument("--out", default="", help="CSV path (default: stdout)")
    p.add_argument("--segments", default="3,4;2,4", help="networks whose segments are printed, e.g. '3,4;2,4'")
    a = p.parse_args(argv)
    segs = [tuple(int(v) for v in part.split(",")) for part in a.segments.split(";") if part]
    return TableConfig(kmax=a.kmax, out=a.out, segments=segs)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    rows = grid_rows(cfg.kmax)
    fh = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(GRID_CSV_HEADER)
    w.writerows(rows)
    if cfg.out:
        fh.close()
        print(f"{len(rows)} rows written to {cfg.out}")
    info = sys.stdout if cfg.out else sys.stderr  # keep a piped CSV clean
    for n, k in cfg.segments:
        print(f"segments of the ({n},{k}) network:", file=info)
        for s in exact_segments(NetworkConfig(n, k)):
            print("  " + describe(s), file=info)
    return 0


def describe(s) -> str:
    span = f"[{format_rational(s.lo)},{format_rational(s.hi)}]"
    if s.status == "exact":
        return f"exact: R* = {format_line(*s.lower)} on {span}"
    return f"gap: {format_line(*s.lower)} <= R* <= {format_line(*s.upper)} on {span}"


if __name__ == "__main__":
    sys.exit(main())
