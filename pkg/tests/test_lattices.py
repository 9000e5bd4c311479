"""Tests for integer lattices with group action: algebra, pairings, indices."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from artifact.burnside import permutation_character
from artifact.exactla import det, mat_mul, random_unimodular
from artifact.groups import (
    build_group,
    coset_action,
    dihedral_group,
    left_cosets,
    subgroup_as_group,
    subgroup_class_by_label,
)
from artifact.lattices import (
    InvariantPairing,
    Sublattice,
    averaged_pairing,
    direct_sum,
    fixed_sublattice,
    gram_determinant,
    inherited_pairing,
    isotypic_sublattice_d2p,
    isotypic_sum_index_d2p,
    lattice_algebra,
    lattice_from_generators,
    lattice_from_json,
    lattice_to_json,
    overlattices_mod_p,
    permutation_lattice,
    random_stable_sublattice,
    rational_multiplicities_d2p,
    span_sublattice,
    standard_pairing,
    sum_of_fixed_index,
    tensor_product,
    twist_sign,
)


def sign_lattice(group):
    """Rank-1 lattice where reflections act by -1 (dihedral groups)."""
    return lattice_from_generators(group, [[[-1]], [[1]]])


def span_lattice_a_prime(p):
    """The difference-vector sublattice of the coset lattice on C2 cosets."""
    group = dihedral_group(p)
    ambient = permutation_lattice(group, "C2")
    columns = [
        [1 if k == 0 else (-1 if k == i else 0) for k in range(p)]
        for i in range(1, p)
    ]
    return group, ambient, columns, span_sublattice(ambient, columns)


class TestConstruction:
    def test_whole_group_gives_trivial_lattice(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "G")
        assert lattice.rank == 1
        assert all(lattice.action(g) == ((1,),) for g in range(group.order))

    def test_regular_lattice_of_d6(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "1")
        assert lattice.rank == 6
        for g in range(group.order):
            mat = lattice.action(g)
            assert sorted(sum(row) for row in mat) == [1] * 6

    def test_coset_lattice_traces_match_character(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        assert lattice.rank == 3
        traces = tuple(
            lattice.trace(cls[0]) for cls in group.conjugacy_classes()
        )
        assert traces == permutation_character(group, "C2") == (3, 1, 0)

    def test_sign_lattice_from_generators(self):
        group = dihedral_group(3)
        eps = sign_lattice(group)
        assert eps.rank == 1
        assert eps.action(3) == ((-1,),)
        assert eps.action(1) == ((1,),)

    def test_two_dimensional_coset_lattice_from_generators(self):
        group = dihedral_group(3)
        lattice = lattice_from_generators(
            group, [[[0, 1], [1, 0]], [[1, 0], [0, 1]]]
        )
        same = permutation_lattice(group, "C3")
        assert all(lattice.action(g) == same.action(g) for g in range(6))

    def test_non_unimodular_generator_rejected(self):
        group = dihedral_group(3)
        with pytest.raises(ValueError, match="not unimodular"):
            lattice_from_generators(group, [[[2]], [[1]]])

    def test_relation_violation_rejected(self):
        group = dihedral_group(3)
        with pytest.raises(ValueError, match="multiplication table"):
            lattice_from_generators(
                group, [[[1, 0], [0, 1]], [[0, -1], [1, 0]]]
            )

    def test_wrong_generator_count_rejected(self):
        group = dihedral_group(3)
        with pytest.raises(ValueError, match="generator matrices"):
            lattice_from_generators(group, [[[1]]])

    def test_homomorphism_on_random_pairs(self):
        rng = random.Random(7)
        lattices = [
            permutation_lattice(dihedral_group(3), "1"),
            permutation_lattice(dihedral_group(15), "C15"),
            permutation_lattice(build_group("S:4"), "D8"),
            span_lattice_a_prime(5)[3],
        ]
        checked = 0
        for lattice in lattices:
            order = lattice.group.order
            for _ in range(250):
                g, h = rng.randrange(order), rng.randrange(order)
                product = lattice.group.mul[g][h]
                lhs = mat_mul(lattice.action(g), lattice.action(h))
                assert tuple(tuple(row) for row in lhs) == lattice.action(product)
                checked += 1
        assert checked == 1000

    def test_every_element_matrix_unimodular(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        for g in range(lattice.group.order):
            assert det(lattice.action(g)) in (1, -1)


class TestAlgebra:
    def test_direct_sum_inside_two_dimensional_coset_lattice(self):
        group = dihedral_group(3)
        rho = permutation_lattice(group, "C3")
        sub = span_sublattice(rho, [(1, 1), (1, -1)])
        assert rational_multiplicities_d2p(sub) == (1, 1, 0)
        assert sub.action(3) == ((1, 0), (0, -1))

    def test_tensor_with_sign_negates_reflection_trace(self):
        group = dihedral_group(3)
        lattice = tensor_product(permutation_lattice(group, "C2"), sign_lattice(group))
        assert lattice.rank == 3
        assert lattice.trace(3) == -1

    def test_twist_sign_equals_tensor_with_sign(self):
        group = dihedral_group(3)
        base = permutation_lattice(group, "C2")
        twisted = twist_sign(base)
        tensored = tensor_product(base, sign_lattice(group))
        for g in range(group.order):
            flat = [x for row in tensored.action(g) for x in row if x]
            assert sorted(flat) == sorted(
                x for row in twisted.action(g) for x in row if x
            )
        assert twisted.trace(3) == -base.trace(3)

    def test_span_sublattice_difference_vectors(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        assert lattice.rank == 2
        assert lattice.action(1) == ((-1, -1), (1, 0))
        assert lattice.action(3) == ((0, 1), (1, 0))

    def test_span_not_stable_rejected(self):
        group = dihedral_group(3)
        ambient = permutation_lattice(group, "C2")
        with pytest.raises(ValueError, match="not stable"):
            span_sublattice(ambient, [(1, 0, 0)])

    def test_span_dependent_columns_rejected(self):
        group = dihedral_group(3)
        ambient = permutation_lattice(group, "C2")
        with pytest.raises(ValueError, match="not independent"):
            span_sublattice(ambient, [(1, -1, 0), (2, -2, 0)])

    def test_group_mismatch_rejected(self):
        one = permutation_lattice(dihedral_group(3), "G")
        other = permutation_lattice(dihedral_group(5), "G")
        with pytest.raises(ValueError, match="same group"):
            direct_sum(one, other)

    def test_dispatcher_routes_and_rejects(self):
        group = dihedral_group(3)
        eps = sign_lattice(group)
        one = permutation_lattice(group, "G")
        summed = lattice_algebra("direct_sum", one, eps)
        assert summed.rank == 2
        with pytest.raises(ValueError, match="unknown lattice operation"):
            lattice_algebra("dual", one)

    def test_twist_needs_unambiguous_rotations(self):
        group = build_group("C:6")
        lattice = permutation_lattice(group, "G")
        with pytest.raises(ValueError, match="index-2 cyclic"):
            twist_sign(lattice)


class TestFixedSublattice:
    def test_one_orbit_gives_rank_one(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        fixed = fixed_sublattice(lattice, "C3")
        assert fixed.dimension == 1
        assert fixed.column_vectors() == ((1, 1, 1),)

    def test_difference_lattice_under_reflection(self):
        _, _, columns, lattice = span_lattice_a_prime(3)
        fixed = fixed_sublattice(lattice, "C2")
        assert fixed.column_vectors() == ((1, 1),)
        x, y = fixed.column_vectors()[0]
        ambient_vector = tuple(
            x * columns[0][k] + y * columns[1][k] for k in range(3)
        )
        assert ambient_vector == (2, -1, -1)

    def test_trivial_subgroup_gives_identity_basis(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        fixed = fixed_sublattice(lattice, "1")
        assert fixed.basis == ((1, 0), (0, 1))

    def test_raw_element_sets_accepted(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        fixed = fixed_sublattice(lattice, (0, 4))
        assert fixed.dimension == 2

    def test_non_subgroup_rejected(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        with pytest.raises(ValueError, match="not a subgroup"):
            fixed_sublattice(lattice, (0, 1))

    def test_orbit_count_consistency(self):
        group = dihedral_group(15)
        for coset_label in ("C3", "C5", "D6"):
            lattice = permutation_lattice(group, coset_label)
            cosets = left_cosets(
                group, subgroup_class_by_label(group, coset_label).representative
            )
            action = coset_action(group, cosets)
            for sub_label in ("C2", "C3", "C15", "D10"):
                sub = subgroup_class_by_label(group, sub_label)
                burnside_count = sum(
                    sum(1 for i in range(len(cosets)) if action[h][i] == i)
                    for h in sub.representative
                ) // sub.order
                fixed = fixed_sublattice(lattice, sub)
                assert fixed.dimension == burnside_count

    def test_fixed_bases_are_saturated(self):
        group = dihedral_group(5)
        lattice = permutation_lattice(group, "1")
        for label in ("C2", "C5", "G"):
            fixed = fixed_sublattice(lattice, label)
            if fixed.dimension == 0:
                continue
            snf = smith_normal_form(Matrix(fixed.basis))
            divisors = [snf[i, i] for i in range(fixed.dimension)]
            assert divisors == [1] * fixed.dimension


class TestPairings:
    def test_regular_lattice_averages_to_scaled_identity(self):
        group = dihedral_group(3)
        pairing = averaged_pairing(permutation_lattice(group, "1"))
        expected = tuple(
            tuple(Fraction(6) if i == j else Fraction(0) for j in range(6))
            for i in range(6)
        )
        assert pairing.gram == expected

    def test_sign_lattice_averages_to_order(self):
        group = dihedral_group(3)
        pairing = averaged_pairing(sign_lattice(group))
        assert pairing.gram == ((Fraction(6),),)

    def test_seeded_pairings_differ_but_stay_invariant(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        first = averaged_pairing(lattice, seed=1)
        second = averaged_pairing(lattice, seed=2)
        assert first.gram != second.gram

    def test_standard_pairing_accepts_permutation_lattices(self):
        group = dihedral_group(3)
        pairing = standard_pairing(permutation_lattice(group, "C2"))
        assert pairing.gram[0][0] == 1 and pairing.gram[0][1] == 0

    def test_standard_pairing_rejects_skewed_action(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        with pytest.raises(ValueError, match="not invariant"):
            standard_pairing(lattice)

    def test_inherited_pairing_is_gram_of_difference_vectors(self):
        _, ambient, columns, lattice = span_lattice_a_prime(3)
        pairing = inherited_pairing(standard_pairing(ambient), columns, lattice)
        assert pairing.gram == (
            (Fraction(2), Fraction(1)),
            (Fraction(1), Fraction(2)),
        )


class TestGramDeterminant:
    @pytest.mark.parametrize("p", [3, 5])
    def test_full_lattice_determinant_is_p(self, p):
        _, ambient, columns, lattice = span_lattice_a_prime(p)
        pairing = inherited_pairing(standard_pairing(ambient), columns, lattice)
        whole = fixed_sublattice(lattice, "1")
        assert gram_determinant(pairing, whole) == p

    @pytest.mark.parametrize("p,expected", [(3, 6), (5, 20)])
    def test_reflection_fixed_determinant(self, p, expected):
        _, ambient, columns, lattice = span_lattice_a_prime(p)
        pairing = inherited_pairing(standard_pairing(ambient), columns, lattice)
        fixed = fixed_sublattice(lattice, "C2")
        assert gram_determinant(pairing, fixed) == expected
        assert gram_determinant(pairing, fixed, Fraction(1, 2)) == Fraction(expected, 2 ** fixed.dimension)

    def test_rank_zero_fixed_space_gives_one(self):
        _, ambient, columns, lattice = span_lattice_a_prime(3)
        pairing = inherited_pairing(standard_pairing(ambient), columns, lattice)
        fixed = fixed_sublattice(lattice, "C3")
        assert fixed.dimension == 0
        assert gram_determinant(pairing, fixed) == 1

    def test_unimodular_base_change_invariance(self):
        _, ambient, columns, lattice = span_lattice_a_prime(5)
        pairing = inherited_pairing(standard_pairing(ambient), columns, lattice)
        fixed = fixed_sublattice(lattice, "C2")
        rng = random.Random(11)
        u = random_unimodular(fixed.dimension, rng)
        changed = Sublattice(
            ambient=lattice,
            basis=tuple(
                tuple(
                    sum(fixed.basis[i][k] * u[k][j] for k in range(fixed.dimension))
                    for j in range(fixed.dimension)
                )
                for i in range(lattice.rank)
            ),
        )
        assert gram_determinant(pairing, changed) == gram_determinant(pairing, fixed)

    def test_foreign_sublattice_rejected(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        other = permutation_lattice(group, "C3")
        pairing = standard_pairing(lattice)
        foreign = fixed_sublattice(other, "1")
        with pytest.raises(ValueError, match="pairing's lattice"):
            gram_determinant(pairing, foreign)


class TestFixedSumIndex:
    @pytest.mark.parametrize("p", [3, 5])
    def test_difference_lattice_index_p(self, p):
        group, _, _, lattice = span_lattice_a_prime(p)
        subgroups = ["C2", (0, p + 1), f"C{p}"]
        assert sum_of_fixed_index(lattice, subgroups) == p

    @pytest.mark.parametrize("p", [3, 5])
    def test_twisted_difference_lattice_index_one(self, p):
        group, _, _, lattice = span_lattice_a_prime(p)
        twisted = twist_sign(lattice)
        subgroups = ["C2", (0, p + 1), f"C{p}"]
        assert sum_of_fixed_index(twisted, subgroups) == 1

    @pytest.mark.parametrize("p", [3, 5])
    def test_regular_lattice_index_p(self, p):
        group = dihedral_group(p)
        lattice = permutation_lattice(group, "1")
        subgroups = ["C2", (0, p + 1), f"C{p}"]
        assert sum_of_fixed_index(lattice, subgroups) == p

    def test_not_full_rank_gives_none(self):
        group = dihedral_group(3)
        eps = sign_lattice(group)
        assert sum_of_fixed_index(eps, ["C2"]) is None


class TestSampling:
    def test_bound_one_returns_lattice_itself(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        sampled, index = random_stable_sublattice(lattice, seed=5, index_bound=1)
        assert index == 1
        assert sampled is lattice

    def test_sampled_sublattice_within_bound_and_deterministic(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        first, index1 = random_stable_sublattice(lattice, seed=9, index_bound=100)
        second, index2 = random_stable_sublattice(lattice, seed=9, index_bound=100)
        assert 1 <= index1 <= 100
        assert index1 == index2
        assert first._action == second._action

    def test_overlattices_of_split_rank_two(self):
        group = dihedral_group(3)
        one = permutation_lattice(group, "G")
        eps = sign_lattice(group)
        lattice = direct_sum(one, eps)
        overs = overlattices_mod_p(lattice, 2)
        assert len(overs) == 5
        glued = [m for m in overs if isotypic_sum_index_d2p(m) == 2]
        assert len(glued) == 1
        assert rational_multiplicities_d2p(glued[0]) == (1, 1, 0)
        assert overs[0]._action == lattice._action

    def test_overlattices_of_difference_plus_trivial(self):
        group = dihedral_group(3)
        _, _, _, diff = span_lattice_a_prime(3)
        lattice = direct_sum(permutation_lattice(group, "G"), diff)
        overs = overlattices_mod_p(lattice, 3)
        coset_like = [
            m
            for m in overs
            if rational_multiplicities_d2p(m) == (1, 0, 1)
            and sum_of_fixed_index(m, ["C2", (0, 4), "C3"]) == 1
            and isotypic_sum_index_d2p(m) == 3
        ]
        assert coset_like

    def test_composite_modulus_rejected(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        with pytest.raises(ValueError, match="not prime"):
            overlattices_mod_p(lattice, 4)


class TestMultiplicities:
    def test_coset_lattice_multiplicities(self):
        group = dihedral_group(3)
        assert rational_multiplicities_d2p(
            permutation_lattice(group, "C2")
        ) == (1, 0, 1)

    def test_difference_lattice_multiplicities(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        assert rational_multiplicities_d2p(lattice) == (0, 0, 1)

    def test_regular_lattice_multiplicities(self):
        group = dihedral_group(3)
        assert rational_multiplicities_d2p(
            permutation_lattice(group, "1")
        ) == (1, 1, 2)

    def test_non_dihedral_group_rejected(self):
        group = build_group("C:6")
        lattice = permutation_lattice(group, "G")
        with pytest.raises(ValueError, match="index-2 cyclic"):
            rational_multiplicities_d2p(lattice)

    def test_even_dihedral_parameter_rejected(self):
        group = dihedral_group(2)
        lattice = permutation_lattice(group, "G")
        with pytest.raises(ValueError):
            rational_multiplicities_d2p(lattice)

    def test_isotypic_pieces_of_coset_lattice(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        assert isotypic_sublattice_d2p(lattice, "triv").column_vectors() == ((1, 1, 1),)
        assert isotypic_sublattice_d2p(lattice, "sign").dimension == 0
        assert isotypic_sublattice_d2p(lattice, "plane").dimension == 2
        assert isotypic_sum_index_d2p(lattice) == 3

    def test_unknown_isotypic_part_rejected(self):
        group = dihedral_group(3)
        lattice = permutation_lattice(group, "C2")
        with pytest.raises(ValueError, match="unknown isotypic part"):
            isotypic_sublattice_d2p(lattice, "cusp")


class TestSerialization:
    def test_roundtrip_difference_lattice(self):
        _, _, _, lattice = span_lattice_a_prime(3)
        data = lattice_to_json(lattice)
        assert data["group"] == "D2q:3"
        assert data["rank"] == 2
        assert all(
            isinstance(x, str) for mat in data["generators"] for row in mat for x in row
        )
        rebuilt = lattice_from_json(data)
        assert rebuilt._action == lattice._action

    def test_roundtrip_sign_lattice(self):
        group = dihedral_group(5)
        eps = sign_lattice(group)
        rebuilt = lattice_from_json(lattice_to_json(eps))
        assert rebuilt._action == eps._action

    def test_descriptorless_group_rejected(self):
        group = dihedral_group(15)
        sub, _ = subgroup_as_group(
            group, subgroup_class_by_label(group, "D10").representative
        )
        lattice = permutation_lattice(sub, "G")
        with pytest.raises(ValueError, match="descriptor"):
            lattice_to_json(lattice)
