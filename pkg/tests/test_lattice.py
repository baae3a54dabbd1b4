"""Subgroup enumeration, normal lattices, residual intersections, O^pi."""

import pytest

from pfg.construct import cyclic, dihedral, direct_product, unit_semidirect_level
from pfg.core import ParamOutOfRange, Subgroup, closure
from pfg.lattice import (
    AutoSet,
    all_subgroups,
    count_profile,
    enumerate_normals,
    enumerate_subgroups,
    o_pi,
    o_pi_of_subgroup,
    residual_intersection,
    _adjunction_enumeration,
    _Budget,
)


def s3():
    return dihedral(3).group


class TestEnumerateSubgroups:
    def test_index_one(self):
        G = s3()
        cat = enumerate_subgroups(G, 1)
        assert len(cat.entries) == 1 and cat.entries[0].is_whole and cat.complete

    def test_s3_counts(self):
        cat = enumerate_subgroups(s3(), 3)
        by_index = {k: len(v) for k, v in cat.by_index().items()}
        assert by_index == {1: 1, 2: 1, 3: 3}

    def test_z4_low_index(self):
        cat = enumerate_subgroups(cyclic(4), 2)
        assert sorted(s.size for s in cat.entries) == [2, 4]

    def test_routes_agree_on_medium_group(self):
        # low-index core route against full adjunction on the order-54 level
        G = unit_semidirect_level(3, 2).group
        low = {s.bools.tobytes() for s in enumerate_subgroups(G, 3).entries}
        subs, complete = _adjunction_enumeration(G, _Budget(10**7))
        assert complete
        full = {
            b.tobytes() for b, _ in subs if G.order // int(b.sum()) <= 3
        }
        assert low == full

    def test_bad_bound(self):
        with pytest.raises(ParamOutOfRange):
            enumerate_subgroups(s3(), 0)

    def test_budget_reports_incomplete(self):
        cat = enumerate_subgroups(dihedral(6).group, 24, node_budget=5)
        assert not cat.complete

    def test_catalog_invariants(self):
        for G in (s3(), dihedral(4).group, cyclic(12)):
            for n in (1, 2, G.order):
                cat = enumerate_subgroups(G, n)
                assert all(s.index <= cat.max_index for s in cat.entries)
                keys = [s.bools.tobytes() for s in cat.entries]
                assert len(keys) == len(set(keys))  # no duplicates


class TestEnumerateNormals:
    def test_abelian_all_subgroups_normal(self):
        G = cyclic(12)
        normals = {s.bools.tobytes() for s in enumerate_normals(G)}
        subs = {s.bools.tobytes() for s in all_subgroups(G).entries}
        assert normals == subs

    def test_s3_exactly_three(self):
        assert len(enumerate_normals(s3())) == 3

    def test_dihedral8_six_normals(self):
        G = dihedral(4).group
        normals = enumerate_normals(G)
        assert len(normals) == 6
        # oracle: brute-force normality scan over the full subgroup lattice
        from pfg.core import is_normal

        brute = [s for s in all_subgroups(G).entries if is_normal(G, s)]
        assert {s.bools.tobytes() for s in normals} == {s.bools.tobytes() for s in brute}

    def test_normal_lattice_is_meet_closed(self):
        G = unit_semidirect_level(3, 2).group
        normals = enumerate_normals(G)
        keys = {s.bools.tobytes() for s in normals}
        for a in normals:
            for b in normals:
                assert (a.bools & b.bools).tobytes() in keys

    def test_bounded_enumeration_matches_filtered_full(self):
        from pfg.lattice import normals_up_to_index

        for G in (s3(), dihedral(4).group, unit_semidirect_level(3, 2).group, cyclic(36)):
            full = enumerate_normals(G)
            for cap in (1, 2, 3, 6, G.order):
                want = {s.bools.tobytes() for s in full if s.index <= cap}
                got = {s.bools.tobytes() for s in normals_up_to_index(G, cap)}
                assert got == want


class TestResidualIntersection:
    def test_bound_one_gives_whole(self):
        G = s3()
        assert residual_intersection(G, 1).is_whole

    def test_s3_bound_two(self):
        G = s3()
        assert residual_intersection(G, 2) == closure(G, [2])

    def test_dihedral8_center(self):
        G = dihedral(4).group
        center = Subgroup(G, [0, 4])
        assert residual_intersection(G, 2) == center

    def test_contained_in_every_low_index_normal(self):
        from pfg.core import is_normal

        G = dihedral(6).group
        for n in (1, 2, 3, 6):
            R = residual_intersection(G, n)
            assert is_normal(G, R)
            for N in enumerate_normals(G):
                if N.index <= n:
                    assert bool((R.bools & ~N.bools).sum()) == 0

    def test_monotone_in_bound(self):
        G = dihedral(4).group
        sizes = [residual_intersection(G, n).size for n in range(1, 9)]
        assert sizes == sorted(sizes, reverse=True)

    def test_auto_invariant_family_shrinks(self):
        # for Omega subset Omega', the qualifying family shrinks, so the meet grows
        G = direct_product(cyclic(2), cyclic(2))
        swap = AutoSet(G, (handwritten_swap(G),))
        for n in (1, 2, 4):
            small = residual_intersection(G, n)
            big = residual_intersection(G, n, swap)
            assert bool((small.bools & ~big.bools).sum()) == 0


def handwritten_swap(G):
    from pfg.core import GroupHom

    return GroupHom(G, G, [0, 2, 1, 3])


class TestOPi:
    def test_all_primes_gives_trivial(self):
        G = s3()
        assert o_pi(G, {2, 3}).is_trivial

    def test_s3_two(self):
        G = s3()
        assert o_pi(G, {2}) == closure(G, [2])

    def test_s3_three(self):
        G = s3()
        assert o_pi(G, {3}).is_whole

    def test_quotient_is_pi_number(self):
        from pfg.lattice import is_pi_number

        G = dihedral(6).group
        for primes in ({2}, {3}, {2, 3}):
            N = o_pi(G, primes)
            assert is_pi_number(G.order // N.size, primes)

    def test_minimality(self):
        from pfg.lattice import is_pi_number

        G = dihedral(6).group
        for primes in ({2}, {3}):
            N = o_pi(G, primes)
            for M in enumerate_normals(G):
                if is_pi_number(M.index, primes):
                    assert bool((N.bools & ~M.bools).sum()) == 0

    def test_rejects_bad_primes(self):
        with pytest.raises(ParamOutOfRange):
            o_pi(s3(), set())
        with pytest.raises(ParamOutOfRange):
            o_pi(s3(), {4})

    def test_subgroup_matches_parent_for_core_primes(self):
        from pfg.core import normality_ops
        from pfg.lattice import prime_factors

        G = unit_semidirect_level(3, 2).group
        for H in all_subgroups(G).entries:
            core = normality_ops(G, H).core
            primes = prime_factors(G.order // core.size) or {2}
            assert o_pi_of_subgroup(G, H, primes) == o_pi(G, primes)


class TestCountProfile:
    def test_trivial_group(self):
        assert count_profile(cyclic(1), 1).counts == {1: 1}

    def test_s3(self):
        assert count_profile(s3(), 3).counts == {1: 1, 2: 1, 3: 3}

    def test_klein_four(self):
        G = direct_product(cyclic(2), cyclic(2))
        assert count_profile(G, 2).counts == {1: 1, 2: 3}


class TestAutoSet:
    def test_rejects_non_bijective(self):
        from pfg.core import trivial_hom

        G = cyclic(4)
        with pytest.raises(ParamOutOfRange):
            AutoSet(G, (trivial_hom(G),))

    def test_rejects_foreign_map(self):
        from pfg.core import identity_hom

        with pytest.raises(ParamOutOfRange):
            AutoSet(cyclic(4), (identity_hom(cyclic(4)),))
