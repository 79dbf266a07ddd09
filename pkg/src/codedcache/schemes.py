"""Bit-exact achievable schemes: coded placement at M = 1/K and uncoded
placement with leader-based delivery, plus a generic GF(2) decoder.

A file is split into equal subfiles ("symbols").  Every stored or broadcast
block carries a label, the bitmask of the symbols it XORs together, so a user
decodes by elimination over GF(2) on labels while XOR-ing the payloads along.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .model import Demand, DomainError, NetworkConfig, is_covering
from .rational import format_rational


@dataclass(frozen=True)
class Block:
    label: int  # bitmask over symbol indices
    bits: int  # payload, ``size`` bits long
    size: int


@dataclass(frozen=True)
class FileStore:
    n_files: int
    subpacket_count: int
    bits_per_subfile: int
    subfiles: Tuple[Tuple[int, ...], ...]  # [file-1][subfile index]

    @property
    def file_bits(self) -> int:
        return self.subpacket_count * self.bits_per_subfile

    def file_value(self, n: int) -> int:
        """W_n as one integer: the concatenation of its subfiles, first subfile most significant."""
        out = 0
        for chunk in self.subfiles[n - 1]:
            out = (out << self.bits_per_subfile) | chunk
        return out


def make_files(n_files: int, subpacket_count: int, file_bits: int, seed: int = 0) -> FileStore:
    if file_bits <= 0 or file_bits % subpacket_count:
        raise DomainError(f"file_bits={file_bits} is not a positive multiple of {subpacket_count}")
    rng = random.Random(seed)
    b = file_bits // subpacket_count
    subfiles = tuple(
        tuple(rng.getrandbits(b) for _ in range(subpacket_count)) for _ in range(n_files)
    )
    return FileStore(n_files, subpacket_count, b, subfiles)


@dataclass(frozen=True)
class CacheContents:
    caches: Tuple[Tuple[Block, ...], ...]  # per user

    def stored_bits(self, user: int) -> int:
        return sum(blk.size for blk in self.caches[user - 1])


@dataclass(frozen=True)
class Broadcast:
    blocks: Tuple[Block, ...]

    @property
    def total_bits(self) -> int:
        return sum(blk.size for blk in self.blocks)

    def rate(self, file_bits: int) -> Fraction:
        return Fraction(self.total_bits, file_bits)


@dataclass
class SimReport:
    n: int
    k: int
    scheme: str
    t: Optional[int]
    demand: Demand
    measured_rate: Fraction
    memory: Fraction
    decode_ok: bool
    per_user: Dict[int, bool]
    failed_subfiles: Dict[int, List[int]]
    file_bits: int
    seed: int
    in_D: bool

    def to_json(self) -> dict:
        out = {"n": self.n, "k": self.k, "scheme": self.scheme}
        if self.t is not None:
            out["t"] = self.t
        out.update(
            demand=list(self.demand.requests),
            memory=format_rational(self.memory),
            rate=format_rational(self.measured_rate),
            decode_ok=self.decode_ok,
            file_bits=self.file_bits,
            seed=self.seed,
        )
        if not self.in_D:
            out["label"] = "outside D"
        return out


class DecodeError(RuntimeError):
    pass


# ---------------------------------------------------------------- GF(2) core


class Gf2Span:
    """Incremental row-echelon basis of labelled blocks."""

    def __init__(self) -> None:
        self.rows: Dict[int, Tuple[int, int]] = {}  # pivot bit -> (label, payload)

    def add(self, label: int, payload: int) -> bool:
        while label:
            pivot = label.bit_length() - 1
            row = self.rows.get(pivot)
            if row is None:
                self.rows[pivot] = (label, payload)
                return True
            label ^= row[0]
            payload ^= row[1]
        return False

    def solve(self, label: int) -> Optional[int]:
        """Payload of the block with ``label`` if it lies in the span, else None."""
        payload = 0
        while label:
            pivot = label.bit_length() - 1
            row = self.rows.get(pivot)
            if row is None:
                return None
            label ^= row[0]
            payload ^= row[1]
        return payload


def decode_symbols(known: Sequence[Block], wanted: Sequence[int]) -> Dict[int, Optional[int]]:
    span = Gf2Span()
    for blk in known:
        span.add(blk.label, blk.bits)
    return {sym: span.solve(1 << sym) for sym in wanted}


def _check_demand(cfg: NetworkConfig, d: Demand) -> None:
    d.validate(cfg)


# ---------------------------------------------------------- coded placement


def _chen_symbol(cfg: NetworkConfig, n: int, j: int) -> int:
    return (n - 1) * cfg.K + (j - 1)


def chen_place(cfg: NetworkConfig, files: FileStore) -> CacheContents:
    if files.subpacket_count != cfg.K:
        raise DomainError(f"coded placement needs exactly K={cfg.K} subfiles per file")
    caches = []
    for k in range(1, cfg.K + 1):
        label, bits = 0, 0
        for n in range(1, cfg.N + 1):
            label |= 1 << _chen_symbol(cfg, n, k)
            bits ^= files.subfiles[n - 1][k - 1]
        caches.append((Block(label, bits, files.bits_per_subfile),))
    return CacheContents(tuple(caches))


def chen_deliver(cfg: NetworkConfig, files: FileStore, d: Demand) -> Broadcast:
    _check_demand(cfg, d)
    if not is_covering(cfg, d):
        raise DomainError(f"coded-placement delivery is defined for covering demands only, got {d}")
    b = files.bits_per_subfile
    sub = files.subfiles
    blocks: List[Block] = []
    for k in range(1, cfg.K + 1):
        for n in range(1, cfg.N + 1):
            if n != d[k]:
                blocks.append(Block(1 << _chen_symbol(cfg, n, k), sub[n - 1][k - 1], b))
    for n in range(1, cfg.N + 1):
        group = [k for k in range(1, cfg.K + 1) if d[k] == n]
        for k1, k2 in zip(group, group[1:]):
            label = (1 << _chen_symbol(cfg, n, k1)) | (1 << _chen_symbol(cfg, n, k2))
            blocks.append(Block(label, sub[n - 1][k1 - 1] ^ sub[n - 1][k2 - 1], b))
    return Broadcast(tuple(blocks))


def _decode_file(
    symbols: Sequence[int], known: Sequence[Block], truth: Sequence[int]
) -> Tuple[bool, List[int]]:
    got = decode_symbols(known, symbols)
    failed = [idx for idx, sym in enumerate(symbols) if got[sym] is None or got[sym] != truth[idx]]
    return (not failed), failed


def chen_decode(
    cfg: NetworkConfig, cache_k: Sequence[Block], broadcast: Broadcast, d: Demand, k: int, files: FileStore
) -> Tuple[bool, List[int]]:
    """Reconstruct W_{d_k} at user k; returns (ok, failed subfile indices, 1-based)."""
    n = d[k]
    symbols = [_chen_symbol(cfg, n, j) for j in range(1, cfg.K + 1)]
    ok, failed = _decode_file(symbols, list(cache_k) + list(broadcast.blocks), files.subfiles[n - 1])
    return ok, [f + 1 for f in failed]


# ------------------------------------------------------ uncoded placement


def _subsets(k: int, t: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(1, k + 1), t))


class _MnIndex:
    def __init__(self, cfg: NetworkConfig, t: int) -> None:
        if not 0 <= t <= cfg.K:
            raise DomainError(f"t={t} outside 0..{cfg.K}")
        self.cfg, self.t = cfg, t
        self.subsets = _subsets(cfg.K, t)
        self.pos = {s: i for i, s in enumerate(self.subsets)}

    def symbol(self, n: int, subset: Tuple[int, ...]) -> int:
        return (n - 1) * len(self.subsets) + self.pos[subset]


def mn_place(cfg: NetworkConfig, t: int, files: FileStore) -> CacheContents:
    idx = _MnIndex(cfg, t)
    if files.subpacket_count != len(idx.subsets):
        raise DomainError(f"uncoded placement with t={t} needs C(K,t)={len(idx.subsets)} subfiles")
    b = files.bits_per_subfile
    caches = []
    for k in range(1, cfg.K + 1):
        blocks = []
        for n in range(1, cfg.N + 1):
            for s in idx.subsets:
                if k in s:
                    blocks.append(Block(1 << idx.symbol(n, s), files.subfiles[n - 1][idx.pos[s]], b))
        caches.append(tuple(blocks))
    return CacheContents(tuple(caches))


def leaders(cfg: NetworkConfig, d: Demand) -> List[int]:
    first: Dict[int, int] = {}
    for k in range(1, cfg.K + 1):
        first.setdefault(d[k], k)
    return sorted(first.values())


def yu_deliver(cfg: NetworkConfig, t: int, files: FileStore, d: Demand) -> Broadcast:
    _check_demand(cfg, d)
    idx = _MnIndex(cfg, t)
    lead = set(leaders(cfg, d))
    b = files.bits_per_subfile
    blocks = []
    if t < cfg.K:
        for s in combinations(range(1, cfg.K + 1), t + 1):
            if lead.isdisjoint(s):
                continue
            label, bits = 0, 0
            for k in s:
                rest = tuple(u for u in s if u != k)
                label |= 1 << idx.symbol(d[k], rest)
                bits ^= files.subfiles[d[k] - 1][idx.pos[rest]]
            blocks.append(Block(label, bits, b))
    return Broadcast(tuple(blocks))


def yu_decode(
    cfg: NetworkConfig, t: int, cache_k: Sequence[Block], broadcast: Broadcast, d: Demand, k: int, files: FileStore
) -> Tuple[bool, List[int]]:
    idx = _MnIndex(cfg, t)
    n = d[k]
    symbols = [idx.symbol(n, s) for s in idx.subsets]
    ok, failed = _decode_file(symbols, list(cache_k) + list(broadcast.blocks), files.subfiles[n - 1])
    return ok, [f + 1 for f in failed]


# --------------------------------------------------------------- formulas


def chen_rate(cfg: NetworkConfig) -> Fraction:
    return Fraction(cfg.N) - Fraction(cfg.N, cfg.K)


def yu_rate(cfg: NetworkConfig, t: int, n_distinct: Optional[int] = None) -> Fraction:
    ne = cfg.N if n_distinct is None else n_distinct
    return Fraction(comb(cfg.K, t + 1) - comb(cfg.K - ne, t + 1), comb(cfg.K, t))


def mn_memory(cfg: NetworkConfig, t: int) -> Fraction:
    return Fraction(cfg.N * t, cfg.K)


def subpacketization(cfg: NetworkConfig, scheme: str, t: Optional[int] = None) -> int:
    if scheme == "chen":
        return cfg.K
    if scheme == "yu":
        if t is None:
            raise DomainError("scheme 'yu' needs t")
        return comb(cfg.K, t)
    raise DomainError(f"unknown scheme {scheme!r}")


# --------------------------------------------------------------- driver


def simulate(
    cfg: NetworkConfig,
    scheme: str,
    d: Demand,
    t: Optional[int] = None,
    file_bits: Optional[int] = None,
    seed: int = 0,
    corrupt_block: Optional[int] = None,
) -> SimReport:
    """Place, deliver and decode every user; ``corrupt_block`` flips one
    payload bit of that broadcast block index (for error-path checks)."""
    _check_demand(cfg, d)
    sub = subpacketization(cfg, scheme, t)
    if file_bits is None:
        file_bits = sub
    if file_bits % sub:
        raise DomainError(f"file_bits={file_bits} not divisible by subpacketization {sub}")
    files = make_files(cfg.N, sub, file_bits, seed)
    if scheme == "chen":
        cache = chen_place(cfg, files)
        bc = chen_deliver(cfg, files, d)
        memory = Fraction(1, cfg.K)
    else:
        cache = mn_place(cfg, t, files)
        bc = yu_deliver(cfg, t, files, d)
        memory = mn_memory(cfg, t)
    for k in range(1, cfg.K + 1):
        if cache.stored_bits(k) > memory * file_bits:
            raise AssertionError(f"user {k} stores more than M*F bits")
    if corrupt_block is not None:
        blocks = list(bc.blocks)
        victim = blocks[corrupt_block]
        blocks[corrupt_block] = Block(victim.label, victim.bits ^ 1, victim.size)
        bc = Broadcast(tuple(blocks))
    per_user, failed = {}, {}
    for k in range(1, cfg.K + 1):
        if scheme == "chen":
            ok, bad = chen_decode(cfg, cache.caches[k - 1], bc, d, k, files)
        else:
            ok, bad = yu_decode(cfg, t, cache.caches[k - 1], bc, d, k, files)
        per_user[k] = ok
        if bad:
            failed[k] = bad
    return SimReport(
        n=cfg.N,
        k=cfg.K,
        scheme=scheme,
        t=t if scheme == "yu" else None,
        demand=d,
        measured_rate=bc.rate(file_bits),
        memory=memory,
        decode_ok=all(per_user.values()),
        per_user=per_user,
        failed_subfiles=failed,
        file_bits=file_bits,
        seed=seed,
        in_D=is_covering(cfg, d),
    )


def minimal_file_bits(cfg: NetworkConfig, t: int) -> int:
    """Smallest bit-length that both placements at this t can split evenly."""
    return lcm(cfg.K, comb(cfg.K, t))


# --------------------------------------------------------- memory sharing


def lower_hull(points: Sequence[Tuple[Fraction, Fraction]]) -> List[Tuple[Fraction, Fraction]]:
    """Lower convex hull of (M, R) points, sorted by M (duplicates keep the lowest R)."""
    best: Dict[Fraction, Fraction] = {}
    for m, r in points:
        m, r = Fraction(m), Fraction(r)
        if m not in best or r < best[m]:
            best[m] = r
    pts = sorted(best.items())
    hull: List[Tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def memory_share(points: Sequence[Tuple[Fraction, Fraction]], m: Fraction) -> Fraction:
    hull = lower_hull(points)
    if not hull:
        raise DomainError("no points to share between")
    m = Fraction(m)
    if m < hull[0][0] or m > hull[-1][0]:
        raise DomainError(f"m={m} outside the hull domain [{hull[0][0]}, {hull[-1][0]}]")
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= m <= x2:
            return y1 + (y2 - y1) * (m - x1) / (x2 - x1)
    return hull[0][1]
