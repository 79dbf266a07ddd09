"""Ground set of random variables and subset bitmasks over it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..model import Demand, DomainError, NetworkConfig, apply_user_permutation

DEFAULT_CAP = 12


@dataclass(frozen=True)
class GroundSet:
    """Variables W_1..W_N, Z_1..Z_K, then X_d for each listed demand.

    Bit ``i`` of a subset mask stands for variable ``i`` in this order.
    Repeated demands are listed once.
    """

    cfg: NetworkConfig
    demands: Tuple[Demand, ...]
    cap: int = DEFAULT_CAP
    labels: Tuple[str, ...] = field(init=False)
    _label_index: Dict[str, int] = field(init=False, repr=False, compare=False)
    _demand_index: Dict[Tuple[int, ...], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        uniq: List[Demand] = []
        for d in self.demands:
            d.validate(self.cfg)
            if d not in uniq:
                uniq.append(d)
        object.__setattr__(self, "demands", tuple(uniq))
        n = self.cfg.N + self.cfg.K + len(uniq)
        if n > self.cap:
            raise DomainError(
                f"ground set has {n} variables (N={self.cfg.N} + K={self.cfg.K} + {len(uniq)} demands) > cap {self.cap}"
            )
        labels = [f"W{i}" for i in range(1, self.cfg.N + 1)]
        labels += [f"Z{i}" for i in range(1, self.cfg.K + 1)]
        labels += ["X" + str(d) for d in uniq]
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "_label_index", {lab: i for i, lab in enumerate(labels)})
        object.__setattr__(self, "_demand_index", {d.requests: i for i, d in enumerate(uniq)})

    # -- sizes and single-variable masks
    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def w(self, file: int) -> int:
        return 1 << (file - 1)

    def z(self, user: int) -> int:
        return 1 << (self.cfg.N + user - 1)

    def x(self, demand: Demand | Sequence[int]) -> int:
        key = demand.requests if isinstance(demand, Demand) else tuple(demand)
        if key not in self._demand_index:
            raise DomainError(f"demand {key} is not listed in the ground set")
        return 1 << (self.cfg.N + self.cfg.K + self._demand_index[key])

    def files(self, which: Iterable[int]) -> int:
        out = 0
        for f in which:
            out |= self.w(f)
        return out

    def caches(self, users: Iterable[int]) -> int:
        out = 0
        for u in users:
            out |= self.z(u)
        return out

    @property
    def all_files(self) -> int:
        return (1 << self.cfg.N) - 1

    @property
    def files_but_last(self) -> int:
        """W_[N-1]."""
        return (1 << (self.cfg.N - 1)) - 1

    @property
    def cache_bits(self) -> int:
        return ((1 << self.cfg.K) - 1) << self.cfg.N

    @property
    def broadcast_bits(self) -> int:
        return self.full & ~(self.all_files | self.cache_bits)

    # -- decomposition of masks
    def file_members(self, mask: int) -> List[int]:
        return [f for f in range(1, self.cfg.N + 1) if mask & self.w(f)]

    def cache_members(self, mask: int) -> List[int]:
        return [u for u in range(1, self.cfg.K + 1) if mask & self.z(u)]

    def demand_members(self, mask: int) -> List[Demand]:
        base = self.cfg.N + self.cfg.K
        return [d for i, d in enumerate(self.demands) if mask >> (base + i) & 1]

    def is_pure_files(self, mask: int) -> bool:
        return mask != 0 and mask & ~self.all_files == 0

    # -- text form
    def label(self, mask: int) -> str:
        return "{" + ",".join(self.labels[i] for i in range(self.n) if mask >> i & 1) + "}"

    def parse_label(self, text: str) -> int:
        body = text.strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise DomainError(f"subset must be written as {{...}}, got {text!r}")
        body = body[1:-1].strip()
        if not body:
            return 0
        out = 0
        depth, start = 0, 0
        names = []
        for pos, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                names.append(body[start:pos])
                start = pos + 1
        names.append(body[start:])
        for name in names:
            name = name.strip()
            if name not in self._label_index:
                raise DomainError(f"unknown variable {name!r}")
            out |= 1 << self._label_index[name]
        return out

    # -- user/file relabelling
    def permute(self, mask: int, perm: Sequence[int], file_perm: Optional[Sequence[int]] = None) -> Optional[int]:
        """Image of ``mask`` when users are relabelled by ``perm`` (and files by
        ``file_perm``); None if some X_d maps to an unlisted demand."""
        out = 0
        for f in self.file_members(mask):
            out |= self.w(file_perm[f - 1] if file_perm else f)
        for u in self.cache_members(mask):
            out |= self.z(perm[u - 1])
        for d in self.demand_members(mask):
            img = apply_user_permutation(d, perm)
            if file_perm:
                img = Demand(tuple(file_perm[r - 1] for r in img.requests))
            if img.requests not in self._demand_index:
                return None
            out |= self.x(img)
        return out

    def to_json(self) -> dict:
        return {
            "n": self.cfg.N,
            "k": self.cfg.K,
            "demands": [list(d.requests) for d in self.demands],
            "cap": self.cap,
        }


def build_ground_set(cfg: NetworkConfig, demands: Sequence[Demand], cap: int = DEFAULT_CAP) -> GroundSet:
    return GroundSet(cfg, tuple(demands), cap)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> List[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out
