"""Constructors for the built-in group families.

Product-like groups use pair encoding: the element (a, b) of A x B or of a
semidirect product N x| H has index a*|B| + b (left coordinate major).
The identity is (0, 0) = 0, so no relabelling happens for these families.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Sequence

import numpy as np

from .core import (
    BadAction,
    FiniteGroup,
    OrderGuardExceeded,
    ParamOutOfRange,
    Subgroup,
    DEFAULT_ORDER_GUARD,
)


def _guard(n: int, order_guard: int | None) -> None:
    guard = DEFAULT_ORDER_GUARD if order_guard is None else order_guard
    if n > guard:
        raise OrderGuardExceeded(n, guard)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def cyclic(n: int, label: str | None = None, *, order_guard: int | None = None) -> FiniteGroup:
    """Cyclic group of order n in additive notation; element index = residue."""
    if n < 1:
        raise ParamOutOfRange(f"cyclic order must be >= 1, got {n}")
    _guard(n, order_guard)
    idx = np.arange(n, dtype=np.int32)
    table = (idx[:, None] + idx[None, :]) % n
    return FiniteGroup(table, label or f"Z{n}", order_guard=order_guard)


def units_residues(p: int, k: int) -> list[int]:
    """Residues coprime to p^k, ascending (so residue 1 sits at index 0)."""
    m = p**k
    return [r for r in range(1, m) if gcd(r, m) == 1]


def units_mod(p: int, k: int, label: str | None = None, *, order_guard: int | None = None) -> FiniteGroup:
    """Multiplicative group of units modulo p^k."""
    if not is_prime(p):
        raise ParamOutOfRange(f"units_mod needs a prime, got {p}")
    if k < 1:
        raise ParamOutOfRange(f"units_mod needs k >= 1, got {k}")
    m = p**k
    res = np.array(units_residues(p, k), dtype=np.int64)
    _guard(res.size, order_guard)
    pos = np.full(m, -1, dtype=np.int32)
    pos[res] = np.arange(res.size, dtype=np.int32)
    table = pos[(res[:, None] * res[None, :]) % m]
    return FiniteGroup(table, label or f"U{m}", order_guard=order_guard)


def direct_product(
    A: FiniteGroup, B: FiniteGroup, label: str | None = None, *, order_guard: int | None = None
) -> FiniteGroup:
    """A x B with pair encoding (a, b) -> a*|B| + b."""
    na, nb = A.order, B.order
    _guard(na * nb, order_guard)
    ax, bx = np.divmod(np.arange(na * nb, dtype=np.int32), nb)
    ta = A.table[np.ix_(ax, ax)]
    tb = B.table[np.ix_(bx, bx)]
    table = ta * nb + tb
    return FiniteGroup(table, label or f"{A.label}x{B.label}", order_guard=order_guard)


def pair_index(a: int, b: int, right_order: int) -> int:
    return a * right_order + b


def pair_split(x: int, right_order: int) -> tuple[int, int]:
    return divmod(x, right_order)


ActionTable = np.ndarray  # shape (|H|, |N|): action[h] is a permutation of N


def _validate_action(N: FiniteGroup, H: FiniteGroup, act: ActionTable) -> None:
    nh, nn = H.order, N.order
    if act.shape != (nh, nn):
        raise BadAction(f"action table has shape {act.shape}, expected ({nh}, {nn})")
    if act.min() < 0 or act.max() >= nn:
        raise ParamOutOfRange("action image out of range")
    for h in range(nh):
        p = act[h]
        if np.unique(p).size != nn or p[0] != 0:
            raise BadAction(f"action of element {h} is not a bijection fixing the identity")
        if not np.array_equal(p[N.table], N.table[p[:, None], p[None, :]]):
            raise BadAction(f"action of element {h} is not an automorphism")
    # homomorphism into Aut(N): act[h1*h2] = act[h1] after act[h2]
    for h1 in range(nh):
        for h2 in range(nh):
            if not np.array_equal(act[H.table[h1, h2]], act[h1][act[h2]]):
                raise BadAction(f"action is not a homomorphism at pair ({h1}, {h2})")


def trivial_action(N: FiniteGroup, H: FiniteGroup) -> ActionTable:
    return np.tile(np.arange(N.order, dtype=np.int32), (H.order, 1))


def inversion_action(N: FiniteGroup, H: FiniteGroup) -> ActionTable:
    """Odd-index elements of H invert N.  Requires N abelian and |H| even."""
    if not N.is_abelian():
        raise BadAction("inversion action needs an abelian normal part")
    act = np.empty((H.order, N.order), dtype=np.int32)
    ident = np.arange(N.order, dtype=np.int32)
    for h in range(H.order):
        act[h] = N.inv if h % 2 else ident
    return act


def multiplication_action(N: FiniteGroup, H: FiniteGroup, residues: Sequence[int]) -> ActionTable:
    """H acts on the cyclic group N by multiplication with the given residues."""
    m = N.order
    if len(residues) != H.order:
        raise BadAction("one residue per acting element is required")
    act = np.empty((H.order, m), dtype=np.int32)
    base = np.arange(m, dtype=np.int64)
    for h, r in enumerate(residues):
        if gcd(int(r) % m if m > 1 else 1, m) != 1:
            raise BadAction(f"residue {r} is not a unit modulo {m}")
        act[h] = (int(r) * base) % m
    return act


@dataclass(frozen=True)
class SemidirectProduct:
    """Construction record for N x| H: the group plus its coordinate subgroups."""

    group: FiniteGroup
    normal_part: Subgroup
    acting_part: Subgroup
    normal_group: FiniteGroup
    acting_group: FiniteGroup
    action: ActionTable

    @property
    def normal_order(self) -> int:
        return self.normal_group.order

    @property
    def acting_order(self) -> int:
        return self.acting_group.order


def semidirect(
    N: FiniteGroup,
    H: FiniteGroup,
    action: ActionTable | Callable[[FiniteGroup, FiniteGroup], ActionTable],
    label: str | None = None,
    *,
    order_guard: int | None = None,
) -> SemidirectProduct:
    """Semidirect product on pairs (a, h) with (a,h)(b,k) = (a*act_h(b), hk)."""
    nn, nh = N.order, H.order
    _guard(nn * nh, order_guard)
    act = action(N, H) if callable(action) else np.asarray(action, dtype=np.int32)
    _validate_action(N, H, act)
    ax, hx = np.divmod(np.arange(nn * nh, dtype=np.int32), nh)
    moved = act[hx[:, None], ax[None, :]]          # act_{h1}(a2)
    ta = N.table[ax[:, None], moved]               # a1 * act_{h1}(a2)
    th = H.table[np.ix_(hx, hx)]
    table = ta * nh + th
    G = FiniteGroup(table, label or f"{N.label}:{H.label}", order_guard=order_guard)
    normal = Subgroup(G, np.arange(nn, dtype=np.int32) * nh, _checked=True)
    acting = Subgroup(G, np.arange(nh, dtype=np.int32), _checked=True)
    return SemidirectProduct(G, normal, acting, N, H, act)


def dihedral(n: int, *, order_guard: int | None = None) -> SemidirectProduct:
    """Dihedral group of order 2n as cyclic(n) x| cyclic(2) with inversion."""
    if n < 1:
        raise ParamOutOfRange("dihedral needs n >= 1")
    return semidirect(cyclic(n), cyclic(2), inversion_action, f"D{2 * n}", order_guard=order_guard)


def unit_semidirect_level(p: int, k: int, *, order_guard: int | None = None) -> SemidirectProduct:
    """cyclic(p^k) x| units_mod(p, k), units acting by multiplication."""
    N = cyclic(p**k)
    H = units_mod(p, k)
    act = multiplication_action(N, H, units_residues(p, k))
    return semidirect(N, H, act, f"Z{p**k}:U{p**k}", order_guard=order_guard)


def scale_first_map(sd_or_group, m: int, right_order: int | None = None) -> np.ndarray:
    """Element map (a, h) -> (m*a, h) on a pair-encoded group; plain m*x on cyclic."""
    if isinstance(sd_or_group, SemidirectProduct):
        G = sd_or_group.group
        nh = sd_or_group.acting_order
        nn = sd_or_group.normal_order
    else:
        G = sd_or_group
        if right_order is None:
            return (np.arange(G.order, dtype=np.int64) * m % G.order).astype(np.int32)
        nh = right_order
        nn = G.order // nh
    a, h = np.divmod(np.arange(G.order, dtype=np.int32), nh)
    return ((a.astype(np.int64) * m) % nn).astype(np.int32) * nh + h


def catalog_construct(kind: str, params: tuple, *, order_guard: int | None = None) -> FiniteGroup:
    """Uniform constructor front-end: cyclic, units_mod, direct_product, semidirect."""
    if kind == "cyclic":
        (n,) = params
        return cyclic(int(n), order_guard=order_guard)
    if kind == "units_mod":
        p, k = params
        return units_mod(int(p), int(k), order_guard=order_guard)
    if kind == "direct_product":
        A, B = params
        return direct_product(A, B, order_guard=order_guard)
    if kind == "semidirect":
        N, H, action = params
        return semidirect(N, H, action, order_guard=order_guard).group
    raise ParamOutOfRange(f"unknown constructor kind {kind!r}")


def load_table_file(path) -> np.ndarray:
    """Whitespace-separated integer matrix file."""
    return np.loadtxt(path, dtype=np.int64, ndmin=2)
