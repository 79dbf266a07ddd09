"""Network configuration, demands and the user-set families used by the converse proofs.

Users and files are 1-based throughout, matching the demand and set tables.
A user set is a ``frozenset`` of user indices; ranges whose upper end is below
their lower end are empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple

UserSet = FrozenSet[int]


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class CaseTag(str, Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"


def ceil_half(k_plus_one: int) -> int:
    return -(-k_plus_one // 2)


@dataclass(frozen=True)
class NetworkConfig:
    n_files: int
    n_users: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_files, int) or not isinstance(self.n_users, int):
            raise DomainError("N and K must be integers")
        if self.n_files < 1:
            raise DomainError(f"need N >= 1, got N={self.n_files}")
        if self.n_users < 1:
            raise DomainError(f"need K >= 1, got K={self.n_users}")
        if self.n_files > self.n_users:
            raise DomainError(f"need N <= K, got N={self.n_files} > K={self.n_users}")

    @property
    def N(self) -> int:
        return self.n_files

    @property
    def K(self) -> int:
        return self.n_users

    @property
    def threshold(self) -> int:
        """Smallest N belonging to Case I for this K: ceil((K+1)/2)."""
        return ceil_half(self.n_users + 1)

    @property
    def case(self) -> CaseTag:
        return CaseTag.CASE_I if self.n_files >= self.threshold else CaseTag.CASE_II

    @property
    def is_boundary(self) -> bool:
        """N = ceil((K+1)/2): Theorem 1 applies, Theorem 2 is offered on request."""
        return self.n_files == self.threshold

    def __str__(self) -> str:
        return f"({self.n_files},{self.n_users})"


def make_config(n_files: int, n_users: int) -> NetworkConfig:
    return NetworkConfig(n_files, n_users)


@dataclass(frozen=True)
class Demand:
    requests: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "requests", tuple(int(r) for r in self.requests))
        if any(r < 1 for r in self.requests):
            raise DomainError(f"file indices are 1-based, got {self.requests}")

    def __len__(self) -> int:
        return len(self.requests)

    def __getitem__(self, user: int) -> int:
        """Requested file of ``user`` (1-based)."""
        return self.requests[user - 1]

    def __iter__(self):
        return iter(self.requests)

    def validate(self, cfg: NetworkConfig) -> "Demand":
        if len(self.requests) != cfg.K:
            raise DomainError(f"demand length {len(self.requests)} != K={cfg.K}")
        if any(r > cfg.N for r in self.requests):
            raise DomainError(f"demand {self.requests} requests a file outside 1..{cfg.N}")
        return self

    def __str__(self) -> str:
        return "(" + ",".join(str(r) for r in self.requests) + ")"


def make_demand(cfg: NetworkConfig, requests: Iterable[int]) -> Demand:
    return Demand(tuple(requests)).validate(cfg)


def _resolve_case(cfg: NetworkConfig, case: CaseTag | str | None, override: bool) -> CaseTag:
    if case is None:
        return cfg.case
    tag = CaseTag(case)
    if tag != cfg.case and not override:
        if not (cfg.is_boundary and tag == CaseTag.CASE_II):
            raise DomainError(
                f"{cfg} is {cfg.case.value}; pass override=True to build {tag.value} objects"
            )
    return tag


def base_demand(cfg: NetworkConfig, case: CaseTag | str | None = None, override: bool = False) -> Demand:
    tag = _resolve_case(cfg, case, override)
    n, k = cfg.N, cfg.K
    if tag == CaseTag.CASE_I:
        seq = list(range(1, n + 1)) + list(range(1, k - n + 1))
    else:
        seq = list(range(1, n + 1)) + list(range(1, n)) + [1] * max(0, k - 2 * n + 1)
    if len(seq) != k:
        raise DomainError(f"{tag.value} base demand has no consistent length for {cfg}")
    return Demand(tuple(seq)).validate(cfg)


def cyclic_shift(d: Demand, s: int) -> Demand:
    k = len(d)
    return Demand(tuple(d.requests[(idx + s) % k] for idx in range(k)))


def demand_family(cfg: NetworkConfig, case: CaseTag | str | None = None, override: bool = False) -> list[Demand]:
    d1 = base_demand(cfg, case, override)
    return [cyclic_shift(d1, l - 1) for l in range(1, cfg.K + 1)]


def target_user_index(cfg: NetworkConfig, l: int) -> int:
    if not 1 <= l <= cfg.K:
        raise DomainError(f"demand index l={l} outside 1..{cfg.K}")
    return cfg.N + 1 - l if l <= cfg.N else cfg.K + cfg.N + 1 - l


def irange(lo: int, hi: int) -> UserSet:
    """Inclusive integer range as a set; empty when hi < lo."""
    return frozenset(range(lo, hi + 1))


@dataclass(frozen=True)
class Case1Sets:
    A: UserSet
    B: UserSet
    C: UserSet
    E: UserSet


def set_family_case1(cfg: NetworkConfig, i: int, override: bool = False) -> Case1Sets:
    n, k = cfg.N, cfg.K
    if cfg.case != CaseTag.CASE_I and not override:
        raise DomainError(f"{cfg} is not in Case I")
    if not 1 <= i <= n:
        raise DomainError(f"i={i} outside 1..{n}")
    users = irange(1, k)
    return Case1Sets(
        A=irange(1, n - i),
        B=irange(k + 2 - i, k),
        # the index range leaves [1, K] for i > K-N+1; those users do not exist
        C=irange(k + 2 - n - i, n - i) & users,
        E=irange(n + 1, k),
    )


@dataclass(frozen=True)
class Case2ISets:
    A: UserSet
    B: UserSet
    F: UserSet
    G: UserSet
    J: UserSet
    K: UserSet
    I: UserSet
    L: UserSet


@dataclass(frozen=True)
class Case2JSets:
    P: UserSet
    Q: UserSet
    S: UserSet
    T: UserSet


def _check_case2(cfg: NetworkConfig, override: bool) -> None:
    if cfg.case != CaseTag.CASE_II and not (override or cfg.is_boundary):
        raise DomainError(f"{cfg} is not in Case II")


def case2_i_sets(cfg: NetworkConfig, i: int, override: bool = False) -> Case2ISets:
    _check_case2(cfg, override)
    n, k = cfg.N, cfg.K
    if not 1 <= i <= n:
        raise DomainError(f"i={i} outside 1..{n}")
    a = irange(1, n - i)
    b = irange(k - i + 2, k)
    f = irange(n + 1, 2 * n - i)
    g = irange(2 * n - i + 1, k - i + 1)
    j_set = irange(1, n - i + 1)
    k_set = irange(k - i + 3, k)
    return Case2ISets(A=a, B=b, F=f, G=g, J=j_set, K=k_set, I=j_set | k_set, L=a | b | f | g)


def case2_j_sets(cfg: NetworkConfig, j: int, override: bool = False) -> Case2JSets:
    _check_case2(cfg, override)
    n, k = cfg.N, cfg.K
    if not 2 * n <= j <= k:
        raise DomainError(f"j={j} outside {2 * n}..{k}")
    p = irange(k + n + 2 - j, k + 2 * n - j)
    q = irange(k + 2 * n + 1 - j, k)
    # S_j is the block of users asking for W_2..W_N in d_j; its last index is
    # K+N-j+1 (the printed upper index K+N-j+2 is the first member of P_j).
    s = irange(k - j + 3, k + n - j + 1)
    return Case2JSets(P=p, Q=q, S=s, T=p | q)


def s_set_as_printed(cfg: NetworkConfig, j: int) -> UserSet:
    """S_j with the upper index exactly as printed in the set table (K+N-j+2)."""
    return irange(cfg.K - j + 3, cfg.K + cfg.N - j + 2)


def set_family_case2(cfg: NetworkConfig, i: int, j: int, override: bool = False) -> Dict[str, UserSet]:
    isets = case2_i_sets(cfg, i, override)
    jsets = case2_j_sets(cfg, j, override)
    out = {name: getattr(isets, name) for name in ("A", "B", "F", "G", "J", "K", "I", "L")}
    out.update({name: getattr(jsets, name) for name in ("P", "Q", "S", "T")})
    return out


def lemma5_cover_set(cfg: NetworkConfig, i: int, override: bool = False) -> UserSet:
    """Users of I_i that do not request W_1 in d_i.

    They request exactly W_2..W_N, one user per file, so the set has N-1
    members for every i (for i = 1, I_1 = J_1 also contains user 1, who asks
    for W_1 and is not needed).
    """
    d = demand_family(cfg, CaseTag.CASE_II, override=True)[i - 1]
    return frozenset(u for u in case2_i_sets(cfg, i, override).I if d[u] != 1)


def apply_user_permutation(d: Demand, perm: Sequence[int]) -> Demand:
    """Relabel users: entry ``perm[l]`` of the output is entry ``l`` of ``d``.

    ``perm`` lists the images of users 1..K in order (1-based).
    """
    k = len(d)
    check_permutation(perm, k)
    out = [0] * k
    for l in range(1, k + 1):
        out[perm[l - 1] - 1] = d[l]
    return Demand(tuple(out))


def check_permutation(perm: Sequence[int], k: int) -> None:
    if len(perm) != k or sorted(perm) != list(range(1, k + 1)):
        raise DomainError(f"{list(perm)} is not a bijection of 1..{k}")


def cycle_permutation(k: int, step: int = 1) -> Tuple[int, ...]:
    """The user permutation l -> l+step (mod K)."""
    return tuple(((l - 1 + step) % k) + 1 for l in range(1, k + 1))


def compose(p: Sequence[int], q: Sequence[int]) -> Tuple[int, ...]:
    """(p o q)(l) = p(q(l))."""
    return tuple(p[q[l] - 1] for l in range(len(q)))


def inverse(p: Sequence[int]) -> Tuple[int, ...]:
    out = [0] * len(p)
    for l, image in enumerate(p, start=1):
        out[image - 1] = l
    return tuple(out)


def is_covering(cfg: NetworkConfig, d: Demand) -> bool:
    d.validate(cfg)
    return set(d.requests) == set(range(1, cfg.N + 1))


def covering_demands(cfg: NetworkConfig) -> list[Demand]:
    """All demands in D (every file requested), in lexicographic order."""
    from itertools import product

    out = []
    for seq in product(range(1, cfg.N + 1), repeat=cfg.K):
        if len(set(seq)) == cfg.N:
            out.append(Demand(seq))
    return out
