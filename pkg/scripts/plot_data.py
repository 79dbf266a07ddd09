#!/usr/bin/env python3
"""Write M,R,source CSVs of the rate-memory tradeoff (and optionally a PNG).

Each CSV holds, on a grid plus every breakpoint, the envelope of all lower
bounds (``new_bound``), of the cut-set and earlier bounds (``known_bound``),
the best achievable rate and the points where lower and upper meet (``exact``).

    python scripts/plot_data.py --networks "3,4;2,4" --outdir plots/ [--png]
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

from codedcache.cli import plot_rows
from codedcache.model import NetworkConfig
from codedcache.rational import format_rational, parse_rational
from codedcache.schemas import PLOT_CSV_HEADER


@dataclass
class PlotConfig:
    networks: List[Tuple[int, int]] = field(default_factory=lambda: [(3, 4), (2, 4)])
    step: Fraction = Fraction(1, 16)
    outdir: str = "plots"
    png: bool = False


def parse_args(argv=None) -> PlotConfig:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--networks", default="3,4;2,4", help="semicolon-separated N,K pairs")
    p.add_argument("--step", default="1/16", help="grid step (p/q)")
    p.add_argument("--outdir", default=PlotConfig.outdir)
    p.add_argument("--png", action="store_true", help="also render a PNG (needs matplotlib)")
    a = p.parse_args(argv)
    nets = [tuple(int(v) for v in part.split(",")) for part in a.networks.split(";") if part]
    return PlotConfig(nets, parse_rational(a.step), a.outdir, a.png)


def render(rows, path: Path, title: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for src, style in (("known_bound", ":"), ("new_bound", "-"), ("achievable", "--")):
        pts = [(float(m), float(r)) for m, r, s in rows if s == src]
        ax.plot([p[0] for p in pts], [p[1] for p in pts], style, label=src.replace("_", " "))
    ex = [(float(m), float(r)) for m, r, s in rows if s == "exact"]
    ax.plot([p[0] for p in ex], [p[1] for p in ex], ".", ms=3, label="exact")
    ax.set_xlabel("M")
    ax.set_ylabel("R")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for n, k in cfg.networks:
        net = NetworkConfig(n, k)
        rows = plot_rows(net, cfg.step)
        path = out / f"tradeoff_{n}_{k}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PLOT_CSV_HEADER)
            w.writerows([format_rational(m), format_rational(r), s] for m, r, s in rows)
        print(f"{path}: {len(rows)} rows")
        if cfg.png:
            try:
                render(rows, path.with_suffix(".png"), f"({n},{k}) cache network")
            except ImportError:
                print("matplotlib not installed; skipping PNG", file=sys.stderr)
                cfg.png = False
    return 0


if __name__ == "__main__":
    sys.exit(main())
