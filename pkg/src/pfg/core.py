"""Exact arithmetic for finite groups given by full multiplication tables.

Elements are the integers 0..order-1 and the identity is always element 0
(tables built from raw input are relabelled at construction).  Every object
is immutable once built and every operation is a pure function of its
inputs, so values can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ORDER_GUARD = 5000
# below this order the associativity check scans every triple
FULL_ASSOC_SCAN_LIMIT = 512
_SPOT_TRIPLES = 20000
_SPOT_SEED = 0x5EED


class GroupError(Exception):
    """Base class for construction and arithmetic errors."""


class NotAssociative(GroupError):
    def __init__(self, a: int, b: int, c: int):
        self.triple = (a, b, c)
        super().__init__(f"associativity fails at triple ({a}, {b}, {c})")


class NoIdentity(GroupError):
    pass


class MissingInverse(GroupError):
    def __init__(self, element: int):
        self.element = element
        super().__init__(f"element {element} has no inverse")


class NotAHomomorphism(GroupError):
    def __init__(self, x: int, y: int, message: str = ""):
        self.witness = (x, y)
        super().__init__(message or f"map(x*y) != map(x)*map(y) at pair ({x}, {y})")


class ParamOutOfRange(GroupError):
    pass


class BadAction(GroupError):
    pass


class OrderGuardExceeded(GroupError):
    def __init__(self, order: int, guard: int):
        self.order = order
        self.guard = guard
        super().__init__(f"order {order} exceeds the order guard {guard}")


class DifferentParents(GroupError):
    pass


class NotNormal(GroupError):
    pass


class DomainMismatch(GroupError):
    pass


def _orbit_closure(table: np.ndarray, gens: Sequence[int]) -> np.ndarray:
    """Boolean membership array of the subgroup generated by ``gens``.

    Breadth-first saturation: the orbit of the identity under right
    multiplication by the generators.  In a finite group the set of all
    words in the generators is already closed under inverses.
    """
    n = table.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    garr = np.unique(np.asarray(list(gens), dtype=np.int32)) if len(gens) else None
    if garr is None or garr.size == 0:
        return seen
    frontier = np.array([0], dtype=np.int32)
    while frontier.size:
        prods = np.unique(table[np.ix_(frontier, garr)])
        new = prods[~seen[prods]]
        seen[new] = True
        frontier = new.astype(np.int32)
    return seen


def _greedy_generators(table: np.ndarray) -> list[int]:
    """Small generating set found by adjoining the least uncovered element."""
    n = table.shape[0]
    gens: list[int] = []
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    while not seen.all():
        gens.append(int(np.flatnonzero(~seen)[0]))
        seen = _orbit_closure(table, gens)
    return gens


def _scan_associativity_full(table: np.ndarray) -> None:
    # (a*b)*c versus a*(b*c), one row of `a` at a time to bound memory
    n = table.shape[0]
    for a in range(n):
        left = table[table[a], :]
        right = table[a, table]
        if not np.array_equal(left, right):
            b, c = np.argwhere(left != right)[0]
            raise NotAssociative(a, int(b), int(c))


def _scan_associativity_light(table: np.ndarray) -> None:
    """Generator-based proof plus a seeded random spot check.

    If (x*g)*y = x*(g*y) holds for every g in a generating set and all x, y,
    the elements associating with everything form a closed set containing the
    generators, hence the whole group.
    """
    n = table.shape[0]
    for g in _greedy_generators(table):
        left = table[table[:, g], :]
        right = table[:, table[g, :]]
        if not np.array_equal(left, right):
            x, y = np.argwhere(left != right)[0]
            raise NotAssociative(int(x), g, int(y))
    rng = np.random.default_rng(_SPOT_SEED)
    a, b, c = rng.integers(0, n, size=(3, _SPOT_TRIPLES))
    bad = table[table[a, b], c] != table[a, table[b, c]]
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NotAssociative(int(a[i]), int(b[i]), int(c[i]))


class FiniteGroup:
    """A finite group given by a complete multiplication table.

    ``table[a, b]`` is the index of the product a*b.  The identity is
    normalized to index 0 and the inverse table is computed up front.
    """

    def __init__(
        self,
        table,
        label: str = "G",
        *,
        validate: bool = True,
        order_guard: int | None = None,
    ):
        guard = DEFAULT_ORDER_GUARD if order_guard is None else order_guard
        t = np.array(table, dtype=np.int32)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ParamOutOfRange(f"multiplication table must be square and non-empty, got shape {t.shape}")
        n = t.shape[0]
        if n > guard:
            raise OrderGuardExceeded(n, guard)
        if t.min() < 0 or t.max() >= n:
            raise ParamOutOfRange("table entries must be element indices in range")

        ident = self._find_identity(t)
        if ident is None:
            raise NoIdentity("no two-sided identity element in table")
        if ident != 0:
            perm = np.arange(n, dtype=np.int32)
            perm[0], perm[ident] = ident, 0
            t = perm[t[np.ix_(perm, perm)]]

        inv = np.argmax(t == 0, axis=1).astype(np.int32)
        bad = np.flatnonzero(t[np.arange(n), inv] != 0)
        if bad.size:
            raise MissingInverse(int(bad[0]))

        if validate:
            if n < FULL_ASSOC_SCAN_LIMIT:
                _scan_associativity_full(t)
            else:
                _scan_associativity_light(t)

        t.setflags(write=False)
        inv.setflags(write=False)
        self.table = t
        self.inv = inv
        self.order = n
        self.label = label
        self._element_orders: np.ndarray | None = None
        self._generators: list[int] | None = None

    @staticmethod
    def _find_identity(t: np.ndarray) -> int | None:
        n = t.shape[0]
        idx = np.arange(n)
        for e in range(n):
            if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx):
                return e
        return None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv_of(self, a: int) -> int:
        return int(self.inv[a])

    def elements(self) -> range:
        return range(self.order)

    def conjugate(self, g: int, x: int) -> int:
        """g * x * g^-1."""
        return int(self.table[self.table[g, x], self.inv[g]])

    def element_orders(self) -> np.ndarray:
        if self._element_orders is None:
            n = self.order
            orders = np.zeros(n, dtype=np.int32)
            cur = np.arange(n, dtype=np.int32)
            base = cur.copy()
            k = 1
            while (orders == 0).any():
                orders[(orders == 0) & (cur == 0)] = k
                cur = self.table[cur, base]
                k += 1
                if k > n + 1:  # pragma: no cover - guarded by validation
                    raise GroupError("element order exceeds group order")
            orders.setflags(write=False)
            self._element_orders = orders
        return self._element_orders

    def element_order(self, a: int) -> int:
        return int(self.element_orders()[a])

    def generators(self) -> list[int]:
        if self._generators is None:
            self._generators = _greedy_generators(self.table)
        return list(self._generators)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label!r}, order={self.order})"


def build_from_table(table, label: str = "G", *, order_guard: int | None = None) -> FiniteGroup:
    """Validated group from a raw multiplication table (identity relabelled to 0)."""
    return FiniteGroup(table, label, validate=True, order_guard=order_guard)


class Subgroup:
    """A subgroup of a parent group stored as a membership mask.

    Membership is kept as a boolean array internally; ``mask`` exposes the
    same information as a single bit-packed integer (bit i set iff element i
    belongs).  Word-sized meets and equality tests come for free that way.
    """

    __slots__ = ("parent", "size", "_bools", "_mask", "_members")

    def __init__(self, parent: FiniteGroup, members, *, _checked: bool = False):
        n = parent.order
        bools = np.zeros(n, dtype=bool)
        arr = np.asarray(members)
        if arr.dtype == bool:
            if arr.shape != (n,):
                raise ParamOutOfRange("membership array has wrong length")
            bools[:] = arr
        else:
            idx = arr.astype(np.int64).ravel()
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                raise ParamOutOfRange("member index out of range")
            bools[idx] = True
        if not _checked:
            self._validate_closed(parent, bools)
        bools.setflags(write=False)
        self.parent = parent
        self._bools = bools
        self.size = int(bools.sum())
        self._mask: int | None = None
        self._members: np.ndarray | None = None

    @staticmethod
    def _validate_closed(parent: FiniteGroup, bools: np.ndarray) -> None:
        if not bools[0]:
            raise GroupError("subgroup must contain the identity")
        m = np.flatnonzero(bools)
        if not bools[parent.inv[m]].all():
            raise GroupError("set is not closed under inverses")
        if not bools[parent.table[np.ix_(m, m)]].all():
            raise GroupError("set is not closed under multiplication")

    @property
    def bools(self) -> np.ndarray:
        return self._bools

    @property
    def members(self) -> np.ndarray:
        if self._members is None:
            m = np.flatnonzero(self._bools).astype(np.int32)
            m.setflags(write=False)
            self._members = m
        return self._members

    @property
    def mask(self) -> int:
        if self._mask is None:
            self._mask = sum(1 << int(i) for i in np.flatnonzero(self._bools))
        return self._mask

    @property
    def index(self) -> int:
        return self.parent.order // self.size

    @property
    def is_trivial(self) -> bool:
        return self.size == 1

    @property
    def is_whole(self) -> bool:
        return self.size == self.parent.order

    def __contains__(self, x: int) -> bool:
        return bool(self._bools[x])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and other.parent is self.parent
            and np.array_equal(other._bools, self._bools)
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self._bools.tobytes()))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.size}, index={self.index} in {self.parent.label!r})"


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, [0], _checked=True)


def whole_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, np.ones(G.order, dtype=bool), _checked=True)


def closure(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Smallest subgroup of G containing ``gens`` (breadth-first saturation)."""
    glist = [int(g) for g in gens]
    for g in glist:
        if not 0 <= g < G.order:
            raise ParamOutOfRange(f"generator {g} out of range")
    return Subgroup(G, _orbit_closure(G.table, glist), _checked=True)


@dataclass(frozen=True)
class NormalityOps:
    is_normal: bool
    normal_closure: Subgroup
    core: Subgroup


def is_normal(G: FiniteGroup, S: Subgroup) -> bool:
    m = S.members
    conj = G.table[G.table[:, m], G.inv[:, None]]
    return bool(S.bools[conj].all())


def normality_ops(G: FiniteGroup, S: Subgroup) -> NormalityOps:
    """Normality flag, normal closure and core (meet of conjugates) of S."""
    if S.parent is not G:
        raise DifferentParents("subgroup does not live in the given group")
    m = S.members
    conj = G.table[G.table[:, m], G.inv[:, None]]  # conj[g, j] = g*s_j*g^-1
    normal = bool(S.bools[conj].all())
    if normal:
        return NormalityOps(True, S, S)
    nc = Subgroup(G, _orbit_closure(G.table, np.unique(conj)), _checked=True)
    # s_j lies in the core iff every conjugate of s_j stays inside S
    in_core = S.bools[conj].all(axis=0)
    core = Subgroup(G, m[in_core], _checked=True)
    return NormalityOps(False, nc, core)


@dataclass(frozen=True)
class SubgroupAlgebra:
    intersection: Subgroup
    product_set: np.ndarray
    product_is_subgroup: bool
    product_covers_group: bool


def subgroup_algebra(S1: Subgroup, S2: Subgroup) -> SubgroupAlgebra:
    """Meet and set-product of two subgroups of the same parent."""
    if S1.parent is not S2.parent:
        raise DifferentParents("subgroups have different parents")
    G = S1.parent
    inter = Subgroup(G, S1.bools & S2.bools, _checked=True)
    prod = np.unique(G.table[np.ix_(S1.members, S2.members)])
    closed = bool(np.isin(G.table[np.ix_(prod, prod)], prod).all())
    return SubgroupAlgebra(
        intersection=inter,
        product_set=prod,
        product_is_subgroup=closed,
        product_covers_group=prod.size == G.order,
    )


def product_covers(G: FiniteGroup, S1: Subgroup, S2: Subgroup) -> bool:
    if S1.size * S2.size < G.order:
        return False
    return np.unique(G.table[np.ix_(S1.members, S2.members)]).size == G.order


class GroupHom:
    """A total element map between finite groups respecting multiplication."""

    __slots__ = ("domain", "codomain", "map")

    def __init__(self, domain: FiniteGroup, codomain: FiniteGroup, mapping, *, validate: bool = True):
        arr = np.asarray(mapping, dtype=np.int32).ravel()
        if arr.shape != (domain.order,):
            raise DomainMismatch("map length does not match the domain order")
        if arr.min() < 0 or arr.max() >= codomain.order:
            raise ParamOutOfRange("map image out of codomain range")
        if validate:
            lhs = arr[domain.table]
            rhs = codomain.table[arr[:, None], arr[None, :]]
            if not np.array_equal(lhs, rhs):
                x, y = np.argwhere(lhs != rhs)[0]
                raise NotAHomomorphism(int(x), int(y))
        arr.setflags(write=False)
        self.domain = domain
        self.codomain = codomain
        self.map = arr

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    @property
    def is_endomorphism(self) -> bool:
        return self.domain is self.codomain

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupHom)
            and other.domain is self.domain
            and other.codomain is self.codomain
            and np.array_equal(other.map, self.map)
        )

    def __hash__(self) -> int:
        return hash((id(self.domain), id(self.codomain), self.map.tobytes()))

    def __repr__(self) -> str:
        return f"GroupHom({self.domain.label!r} -> {self.codomain.label!r})"


# an endomorphism is simply a GroupHom whose domain and codomain coincide
Endomorphism = GroupHom


def require_endo(f: GroupHom) -> None:
    if not f.is_endomorphism:
        raise DomainMismatch("expected an endomorphism (domain = codomain)")


def identity_hom(G: FiniteGroup) -> GroupHom:
    return GroupHom(G, G, np.arange(G.order, dtype=np.int32), validate=False)


def trivial_hom(G: FiniteGroup, H: FiniteGroup | None = None) -> GroupHom:
    H = G if H is None else H
    return GroupHom(G, H, np.zeros(G.order, dtype=np.int32), validate=False)


def compose(f: GroupHom, g: GroupHom) -> GroupHom:
    """g after f: apply f first.  Requires codomain(f) = domain(g)."""
    if f.codomain is not g.domain:
        raise DomainMismatch("codomain of the first map must be the domain of the second")
    return GroupHom(f.domain, g.codomain, g.map[f.map], validate=False)


@dataclass(frozen=True)
class HomParts:
    kernel: Subgroup
    image: Subgroup
    is_injective: bool
    is_surjective: bool


def hom_parts(f: GroupHom) -> HomParts:
    kernel = Subgroup(f.domain, f.map == 0, _checked=True)
    img = np.unique(f.map)
    image = Subgroup(f.codomain, img, _checked=True)
    return HomParts(kernel, image, kernel.size == 1, image.size == f.codomain.order)


def preimage(f: GroupHom, S: Subgroup) -> Subgroup:
    """{x : f(x) in S}, a subgroup of the domain."""
    if S.parent is not f.codomain:
        raise DifferentParents("subgroup does not live in the codomain")
    return Subgroup(f.domain, S.bools[f.map], _checked=True)


def image_of_subgroup(f: GroupHom, S: Subgroup) -> Subgroup:
    if S.parent is not f.domain:
        raise DifferentParents("subgroup does not live in the domain")
    return Subgroup(f.codomain, np.unique(f.map[S.members]), _checked=True)


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """Quotient group on coset representatives plus the projection map."""
    if N.parent is not G:
        raise DifferentParents("subgroup does not live in the given group")
    if not is_normal(G, N):
        raise NotNormal("quotient requires a normal subgroup")
    cosets = G.table[:, N.members]
    rep = cosets.min(axis=1).astype(np.int32)  # x -> least element of x*N
    reps = np.unique(rep)
    pos = np.full(G.order, -1, dtype=np.int32)
    pos[reps] = np.arange(reps.size, dtype=np.int32)
    qtable = pos[rep[G.table[np.ix_(reps, reps)]]]
    Q = FiniteGroup(qtable, f"{G.label}/N{N.size}", validate=False)
    proj = GroupHom(G, Q, pos[rep], validate=False)
    return Q, proj


def subgroup_as_group(G: FiniteGroup, S: Subgroup, label: str | None = None) -> tuple[FiniteGroup, GroupHom]:
    """S as a group in its own right together with the inclusion into G."""
    m = S.members
    pos = np.full(G.order, -1, dtype=np.int32)
    pos[m] = np.arange(m.size, dtype=np.int32)
    H = FiniteGroup(pos[G.table[np.ix_(m, m)]], label or f"{G.label}|{S.size}", validate=False)
    incl = GroupHom(H, G, m, validate=False)
    return H, incl


def restrict_endo(f: GroupHom, S: Subgroup, S_group: FiniteGroup, incl: GroupHom) -> GroupHom:
    """Restriction of an endomorphism to an invariant subgroup, as an endo of S_group."""
    require_endo(f)
    if not S.bools[f.map[S.members]].all():
        raise DomainMismatch("subgroup is not invariant under the map")
    pos = np.full(f.domain.order, -1, dtype=np.int32)
    pos[S.members] = np.arange(S.size, dtype=np.int32)
    return GroupHom(S_group, S_group, pos[f.map[incl.map]], validate=False)


def conjugation_hom(G: FiniteGroup, g: int) -> GroupHom:
    """The inner automorphism x -> g*x*g^-1."""
    mapping = G.table[G.table[g, :], G.inv[g]]
    return GroupHom(G, G, mapping, validate=False)


def commutator_set(G: FiniteGroup, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """All commutators a^-1 b^-1 a b with a in A, b in B (as element indices)."""
    ia = G.inv[A]
    ib = G.inv[B]
    left = G.table[np.ix_(ia, ib)]
    right = G.table[np.ix_(A, B)]
    return np.unique(G.table[left, right])


@dataclass(frozen=True)
class NilpotencyReport:
    is_nilpotent: bool
    nilpotency_class: int | None
    lower_central_series: tuple[Subgroup, ...]
    is_solvable: bool


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    series = [whole_subgroup(G)]
    everything = np.arange(G.order, dtype=np.int32)
    while True:
        comms = commutator_set(G, series[-1].members, everything)
        nxt = Subgroup(G, _orbit_closure(G.table, comms), _checked=True)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def derived_series(G: FiniteGroup) -> list[Subgroup]:
    series = [whole_subgroup(G)]
    while True:
        m = series[-1].members
        comms = commutator_set(G, m, m)
        nxt = Subgroup(G, _orbit_closure(G.table, comms), _checked=True)
        if nxt == series[-1]:
            return series
        series.append(nxt)


def nilpotency(G: FiniteGroup) -> NilpotencyReport:
    """Lower central series, nilpotency class and solvability."""
    lcs = lower_central_series(G)
    nil = lcs[-1].is_trivial
    cls = len(lcs) - 1 if nil else None
    solvable = derived_series(G)[-1].is_trivial
    return NilpotencyReport(nil, cls, tuple(lcs), solvable)
