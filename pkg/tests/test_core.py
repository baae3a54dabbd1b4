"""Group construction, subgroups, homomorphisms, quotients, nilpotency."""

import itertools

import numpy as np
import pytest

from pfg.construct import (
    catalog_construct,
    cyclic,
    dihedral,
    inversion_action,
    semidirect,
    units_mod,
)
from pfg.core import (
    BadAction,
    DifferentParents,
    DomainMismatch,
    GroupError,
    GroupHom,
    MissingInverse,
    NoIdentity,
    NotAHomomorphism,
    NotAssociative,
    NotNormal,
    OrderGuardExceeded,
    ParamOutOfRange,
    Subgroup,
    build_from_table,
    closure,
    compose,
    hom_parts,
    identity_hom,
    nilpotency,
    normality_ops,
    preimage,
    quotient,
    subgroup_algebra,
    trivial_subgroup,
    whole_subgroup,
)


def z4_table():
    return [[(i + j) % 4 for j in range(4)] for i in range(4)]


def s3_group():
    return dihedral(3).group


class TestBuildFromTable:
    def test_trivial_group(self):
        G = build_from_table([[0]], "triv")
        assert G.order == 1
        assert G.mul(0, 0) == 0

    def test_z4_by_hand(self):
        G = build_from_table(z4_table(), "Z4")
        assert G.order == 4
        assert G.mul(1, 3) == 0  # hand oracle: 1 + 3 = 0 mod 4
        assert G.inv_of(1) == 3

    def test_corrupted_entry_reports_witness(self):
        table = z4_table()
        table[1][1] = 3
        with pytest.raises(NotAssociative) as exc:
            build_from_table(table)
        a, b, c = exc.value.triple
        t = table
        assert t[t[a][b]][c] != t[a][t[b][c]]

    def test_identity_relabelled_to_zero(self):
        # shift Z/3 so the identity sits at index 1
        perm = [1, 0, 2]
        base = [[(i + j) % 3 for j in range(3)] for i in range(3)]
        shuffled = [[perm[base[i][j]] for j in range(3)] for i in range(3)]
        shuffled = [shuffled[perm[i]] for i in range(3)]
        shuffled = [[row[perm[j]] for j in range(3)] for row in shuffled]
        G = build_from_table(shuffled)
        assert G.mul(0, 0) == 0
        assert all(G.mul(0, x) == x for x in range(3))

    def test_no_identity(self):
        with pytest.raises(NoIdentity):
            build_from_table([[0, 0], [0, 0]])

    def test_missing_inverse(self):
        # right-shift table: has an identity column pattern but rows without 0
        with pytest.raises((MissingInverse, NoIdentity)):
            build_from_table([[0, 1, 2], [1, 2, 2], [2, 2, 2]])

    def test_order_guard(self):
        with pytest.raises(OrderGuardExceeded):
            cyclic(100, order_guard=50)


class TestCatalogConstruct:
    def test_cyclic_one_is_trivial(self):
        assert catalog_construct("cyclic", (1,)).order == 1

    def test_semidirect_c3_c2_is_s3(self):
        G = catalog_construct("semidirect", (cyclic(3), cyclic(2), inversion_action))
        # brute-force isomorphism against the symmetric group on 3 letters
        perms = list(itertools.permutations(range(3)))
        comp = {p: perms.index(p) for p in perms}
        table = [
            [comp[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms
        ]
        S3 = build_from_table(table, "S3-perm")
        assert G.order == S3.order == 6
        found = False
        g_orders = sorted(G.element_order(x) for x in range(6))
        s_orders = sorted(S3.element_order(x) for x in range(6))
        assert g_orders == s_orders
        for images in itertools.permutations(range(6)):
            if images[0] != 0:
                continue
            if all(
                images[G.mul(x, y)] == S3.mul(images[x], images[y])
                for x in range(6)
                for y in range(6)
            ):
                found = True
                break
        assert found

    def test_units_mod_9(self):
        G = catalog_construct("units_mod", (3, 2))
        # oracle: count integers below 9 coprime to 9
        assert G.order == len([r for r in range(1, 9) if r % 3 != 0]) == 6
        assert G.is_abelian()

    def test_bad_action_rejected(self):
        broken = np.zeros((2, 3), dtype=np.int32)  # constant maps are no automorphisms
        with pytest.raises(BadAction):
            semidirect(cyclic(3), cyclic(2), broken)

    def test_param_out_of_range(self):
        with pytest.raises(ParamOutOfRange):
            cyclic(0)
        with pytest.raises(ParamOutOfRange):
            units_mod(4, 1)


class TestClosure:
    def test_empty_generators(self):
        S = closure(s3_group(), [])
        assert S.size == 1

    def test_z4_two(self):
        S = closure(cyclic(4), [2])
        assert sorted(S.members.tolist()) == [0, 2]

    def test_s3_generators(self):
        G = s3_group()
        S = closure(G, [2, 1])  # a 3-cycle and a transposition
        assert S.size == 6

    def test_subgroup_validation(self):
        G = cyclic(4)
        with pytest.raises(GroupError):
            Subgroup(G, [0, 1])  # not closed: 1+1=2 missing


class TestNormalityOps:
    def test_whole_group(self):
        G = s3_group()
        ops = normality_ops(G, whole_subgroup(G))
        assert ops.is_normal and ops.normal_closure.is_whole and ops.core.is_whole

    def test_s3_order_two(self):
        G = s3_group()
        S = closure(G, [1])
        ops = normality_ops(G, S)
        assert not ops.is_normal
        assert ops.normal_closure.is_whole
        assert ops.core.is_trivial

    def test_s3_order_three(self):
        G = s3_group()
        S = closure(G, [2])
        ops = normality_ops(G, S)
        assert ops.is_normal and ops.normal_closure == S and ops.core == S


class TestSubgroupAlgebra:
    def test_equal_subgroups(self):
        G = s3_group()
        S = closure(G, [2])
        alg = subgroup_algebra(S, S)
        assert alg.intersection == S
        assert sorted(alg.product_set.tolist()) == sorted(S.members.tolist())
        assert alg.product_is_subgroup
        assert not alg.product_covers_group

    def test_s3_complementary(self):
        G = s3_group()
        alg = subgroup_algebra(closure(G, [2]), closure(G, [1]))
        assert alg.intersection.is_trivial
        assert alg.product_covers_group

    def test_z4_self_product(self):
        G = cyclic(4)
        S = closure(G, [2])
        alg = subgroup_algebra(S, S)
        assert sorted(alg.product_set.tolist()) == [0, 2]
        assert not alg.product_covers_group

    def test_different_parents(self):
        with pytest.raises(DifferentParents):
            subgroup_algebra(trivial_subgroup(cyclic(4)), trivial_subgroup(cyclic(4)))


class TestQuotient:
    def test_by_whole_group(self):
        G = s3_group()
        Q, proj = quotient(G, whole_subgroup(G))
        assert Q.order == 1
        assert all(proj(x) == 0 for x in range(G.order))

    def test_s3_by_c3(self):
        G = s3_group()
        Q, proj = quotient(G, closure(G, [2]))
        assert Q.order == 2
        assert hom_parts(proj).kernel.size == 3

    def test_z4_by_two(self):
        G = cyclic(4)
        N = closure(G, [2])
        Q, proj = quotient(G, N)
        assert Q.order == 2
        assert proj(1) == 1
        assert hom_parts(proj).kernel == N

    def test_not_normal(self):
        G = s3_group()
        with pytest.raises(NotNormal):
            quotient(G, closure(G, [1]))


class TestHoms:
    def test_identity_parts(self):
        G = s3_group()
        parts = hom_parts(identity_hom(G))
        assert parts.kernel.is_trivial and parts.image.is_whole
        assert parts.is_injective and parts.is_surjective

    def test_doubling_on_z4(self):
        G = cyclic(4)
        f = GroupHom(G, G, [0, 2, 0, 2])
        parts = hom_parts(f)
        assert sorted(parts.kernel.members.tolist()) == [0, 2]
        assert sorted(parts.image.members.tolist()) == [0, 2]

    def test_sign_map(self):
        G = s3_group()
        sign = GroupHom(G, cyclic(2), [x % 2 for x in range(6)])
        parts = hom_parts(sign)
        assert parts.kernel.size == 3
        assert parts.is_surjective

    def test_invalid_hom_rejected(self):
        G = cyclic(4)
        with pytest.raises(NotAHomomorphism):
            GroupHom(G, G, [0, 1, 3, 2])

    def test_compose_identity(self):
        G = s3_group()
        C2 = cyclic(2)
        sign = GroupHom(G, C2, [x % 2 for x in range(6)])
        assert compose(identity_hom(G), sign) == sign
        assert compose(sign, identity_hom(C2)) == sign

    def test_compose_doubling_on_z8(self):
        G = cyclic(8)
        d = GroupHom(G, G, [(2 * x) % 8 for x in range(8)])
        dd = compose(d, d)
        assert dd.map.tolist() == [(4 * x) % 8 for x in range(8)]

    def test_sign_after_inclusion_is_constant(self):
        G = s3_group()
        from pfg.core import subgroup_as_group

        C3, incl = subgroup_as_group(G, closure(G, [2]))
        sign = GroupHom(G, cyclic(2), [x % 2 for x in range(6)])
        comp = compose(incl, sign)
        assert comp.map.tolist() == [0, 0, 0]

    def test_compose_domain_mismatch(self):
        with pytest.raises(DomainMismatch):
            compose(identity_hom(cyclic(2)), identity_hom(cyclic(3)))

    def test_preimage_examples(self):
        G = cyclic(4)
        f = GroupHom(G, G, [0, 2, 0, 2])
        assert preimage(f, whole_subgroup(G)).is_whole
        assert preimage(f, closure(G, [2])).is_whole  # 2x always lands in {0,2}
        assert preimage(identity_hom(G), closure(G, [2])) == closure(G, [2])

    def test_order_product_law(self):
        G = s3_group()
        sign = GroupHom(G, cyclic(2), [x % 2 for x in range(6)])
        parts = hom_parts(sign)
        assert G.order == parts.kernel.size * parts.image.size


class TestNilpotency:
    def test_abelian(self):
        rep = nilpotency(cyclic(12))
        assert rep.is_nilpotent and rep.nilpotency_class <= 1 and rep.is_solvable

    def test_s3(self):
        rep = nilpotency(s3_group())
        assert not rep.is_nilpotent
        assert rep.nilpotency_class is None
        assert rep.is_solvable
        # derived subgroup is the rotation subgroup, and it is stable
        assert rep.lower_central_series[-1].size == 3

    def test_dihedral_8_class_two(self):
        rep = nilpotency(dihedral(4).group)
        assert rep.is_nilpotent and rep.nilpotency_class == 2
        assert [s.size for s in rep.lower_central_series] == [8, 2, 1]


class TestLagrange:
    def test_all_closures_divide(self):
        G = dihedral(6).group
        for x in range(G.order):
            for y in range(G.order):
                S = closure(G, [x, y])
                assert G.order % S.size == 0


class TestCatalogConstructDispatch:
    def test_direct_product(self):
        from pfg.construct import direct_product

        G = catalog_construct("direct_product", (cyclic(2), cyclic(3)))
        assert G.order == 6 and G.is_abelian()

    def test_unknown_kind(self):
        with pytest.raises(ParamOutOfRange):
            catalog_construct("frobenius", ())
