"""Property tests for the algebraic laws the library promises."""

import numpy as np
from hypothesis import given, settings, strategies as st

from pfg.catalog import builtin_entries, random_endo, random_subgroup
from pfg.core import (
    _scan_associativity_full,
    closure,
    hom_parts,
    is_normal,
    preimage,
    quotient,
    subgroup_as_group,
)
from pfg.endo import contraction, shrinkind_check
from pfg.lattice import enumerate_normals, o_pi, is_pi_number, residual_intersection, AutoSet

ENTRIES = [e for e in builtin_entries(100)]
entry_st = st.integers(min_value=0, max_value=len(ENTRIES) - 1).map(lambda i: ENTRIES[i])


@settings(max_examples=60, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_random_endos_satisfy_hom_law(entry, seed):
    rng = np.random.default_rng(seed)
    f = random_endo(entry, rng)
    G = entry.group
    xs = rng.integers(0, G.order, size=16)
    ys = rng.integers(0, G.order, size=16)
    for x, y in zip(xs, ys):
        assert f.map[G.table[x, y]] == G.table[f.map[x], f.map[y]]


@settings(max_examples=60, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_lagrange_and_kernel_image_product(entry, seed):
    rng = np.random.default_rng(seed)
    G = entry.group
    S = random_subgroup(G, rng)
    assert G.order % S.size == 0
    f = random_endo(entry, rng)
    parts = hom_parts(f)
    assert G.order == parts.kernel.size * parts.image.size


@settings(max_examples=60, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_preimage_of_normal_is_normal(entry, seed):
    rng = np.random.default_rng(seed)
    G = entry.group
    f = random_endo(entry, rng)
    normals = enumerate_normals(G)
    N = normals[int(rng.integers(0, len(normals)))]
    assert is_normal(G, preimage(f, N))


@settings(max_examples=60, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_contraction_chain_shape(entry, seed):
    rng = np.random.default_rng(seed)
    f = random_endo(entry, rng)
    rep = contraction(f)
    sizes = [s.size for s in rep.kernel_chain]
    for i in range(rep.depth):
        assert sizes[i] < sizes[i + 1]
    assert sizes[rep.depth] == sizes[rep.depth + 1]
    assert 2**rep.depth <= max(2 ** rep.depth, entry.group.order)
    assert rep.depth <= np.log2(entry.group.order) + 1e-9 if entry.group.order > 1 else rep.depth == 0


@settings(max_examples=60, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_shrinkind_random(entry, seed):
    rng = np.random.default_rng(seed)
    f = random_endo(entry, rng)
    K = random_subgroup(entry.group, rng)
    assert shrinkind_check(entry.group, f, K).passed


@settings(max_examples=30, deadline=None)
@given(entry=entry_st)
def test_residual_monotone_and_family_shrinks(entry):
    G = entry.group
    sizes = [residual_intersection(G, n).size for n in (1, 2, 3, 4, G.order)]
    assert sizes == sorted(sizes, reverse=True)
    autos = AutoSet(G, tuple(f for f in entry.endos if np.unique(f.map).size == G.order))
    for n in (2, G.order):
        plain = residual_intersection(G, n)
        invariant = residual_intersection(G, n, autos)
        # a larger automorphism set filters the family, so the meet can only grow
        assert not bool((plain.bools & ~invariant.bools).any())


@settings(max_examples=30, deadline=None)
@given(entry=entry_st, seed=st.integers(0, 2**32 - 1))
def test_quotient_laws(entry, seed):
    rng = np.random.default_rng(seed)
    G = entry.group
    normals = enumerate_normals(G)
    N = normals[int(rng.integers(0, len(normals)))]
    Q, proj = quotient(G, N)
    parts = hom_parts(proj)
    assert parts.kernel == N
    assert Q.order == G.order // N.size
    assert parts.is_surjective


@settings(max_examples=30, deadline=None)
@given(entry=entry_st)
def test_o_pi_laws(entry):
    G = entry.group
    for primes in ({2}, {3}, {2, 3}):
        N = o_pi(G, primes)
        assert is_pi_number(G.order // N.size, primes)


def test_constructed_groups_pass_full_associativity_scan():
    # includes derived groups: quotients and subgroups-as-groups
    for entry in builtin_entries(60):
        G = entry.group
        _scan_associativity_full(G.table)
        normals = enumerate_normals(G)
        Q, _ = quotient(G, normals[-1] if not normals[-1].is_whole else normals[0])
        _scan_associativity_full(Q.table)
        S = closure(G, [1 % G.order])
        H, _ = subgroup_as_group(G, S)
        _scan_associativity_full(H.table)


def test_identity_and_inverse_laws_hold_everywhere():
    for entry in builtin_entries(60):
        G = entry.group
        n = G.order
        idx = np.arange(n)
        assert np.array_equal(G.table[0], idx) and np.array_equal(G.table[:, 0], idx)
        assert np.array_equal(G.table[idx, G.inv], np.zeros(n, dtype=G.table.dtype))
