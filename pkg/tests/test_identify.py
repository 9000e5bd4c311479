"""Identification of the S-unit module from class-number data.

The flows here mirror the audits in test_ledger: the same synthetic,
exactly consistent fixtures are pushed through rank analysis, constant
targeting, multiset enumeration, and the two-fixture refinement.
"""

from fractions import Fraction

import pytest

from artifact.identify import (
    GENUS_CHARACTERS,
    GENUS_NAMES,
    GaloisModuleCandidate,
    _drop_trivial_slices,
    _multisets_with_character,
    genus_constants,
    identify_galois_module,
    rational_multiplicities_from_ranks,
    target_constant,
)
from artifact.ledger import fixture_from_mapping
from artifact.zoo import zoo_lattice

from test_ledger import (
    d6_totally_real,
    d6_with_inert_two,
    d10_hilbert_style,
    d30_two_layer_chain,
)


def d6_sign_heavy_refinement() -> dict:
    """A refinement whose extra place adds sign-character rank too.

    The finite place has decomposition group the rotation subgroup, so
    the quadratic field gains a non-trivial unit direction; such a
    fixture cannot refine an archimedean one.
    """
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:3",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 7, "R_S": "9", "lambda": 1},
            "C2": {"h_S": 1, "w": 2, "r_S": 3, "R_S": "1", "lambda": 1},
            "C3": {"h_S": 3, "w": 2, "r_S": 3, "R_S": "3", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 1, "R_S": "1", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "1"},
            {"e": 1, "f": 3, "archimedean": False, "decomposition_class": "C3"},
        ],
    }


class TestGenusTable:
    def test_characters_cover_all_names(self):
        assert set(GENUS_CHARACTERS) == set(GENUS_NAMES)

    def test_character_multiplicities_give_lattice_ranks(self):
        # Rank = trivial + sign + (p - 1) * faithful for every genus
        # that has an explicit construction.
        for p in (3, 5):
            for name in ("triv", "eps", "rho", "A", "Aprime", "ext_Aprime_1", "ext_A_eps", "regular"):
                m1, ms, mt = GENUS_CHARACTERS[name]
                assert zoo_lattice(p, name).lattice.rank == m1 + ms + (p - 1) * mt

    def test_constants_come_from_recomputed_table(self):
        constants = genus_constants(3)
        assert len(constants) == 10
        assert constants["A"] == Fraction(3)
        assert constants["Aprime"] == Fraction(1, 3)
        assert constants["ext_A_rho"] == Fraction(1, 3)
        assert constants["ext_Aprime_rho"] == Fraction(3)


class TestEnumeration:
    def test_counts_match_published_example(self):
        # With one sign and two faithful constituents there are five
        # shapes; adding one trivial constituent gives sixteen.
        assert len(_multisets_with_character((0, 1, 2), GENUS_NAMES)) == 5
        assert len(_multisets_with_character((1, 1, 2), GENUS_NAMES)) == 16

    def test_single_faithful(self):
        assert _multisets_with_character((0, 0, 1), GENUS_NAMES) == [("A",), ("Aprime",)]

    def test_empty_character(self):
        assert _multisets_with_character((0, 0, 0), GENUS_NAMES) == [()]

    def test_multisets_respect_character_sums(self):
        for names in _multisets_with_character((2, 1, 2), GENUS_NAMES):
            total = [0, 0, 0]
            for name in names:
                for k in range(3):
                    total[k] += GENUS_CHARACTERS[name][k]
            assert tuple(total) == (2, 1, 2)


class TestMultiplicities:
    def test_three_fixture_profiles(self):
        assert rational_multiplicities_from_ranks(
            fixture_from_mapping(d10_hilbert_style())
        ) == (0, 0, 1)
        assert rational_multiplicities_from_ranks(
            fixture_from_mapping(d6_totally_real())
        ) == (0, 1, 2)
        assert rational_multiplicities_from_ranks(
            fixture_from_mapping(d6_with_inert_two())
        ) == (1, 1, 2)

    def test_chain_rejected(self):
        with pytest.raises(ValueError, match="chains"):
            rational_multiplicities_from_ranks(fixture_from_mapping(d30_two_layer_chain()))


class TestTargetConstant:
    def test_imaginary_quadratic_base(self):
        assert target_constant(fixture_from_mapping(d10_hilbert_style())) == Fraction(5)

    def test_totally_real_sextic(self):
        assert target_constant(fixture_from_mapping(d6_totally_real())) == Fraction(3)

    def test_fully_inert_place_shifts_power(self):
        assert target_constant(fixture_from_mapping(d6_with_inert_two())) == Fraction(9)

    def test_lambda_defect_scales_target(self):
        data = d6_totally_real()
        data["case_flag"] = "proot_unit_notL"
        data["field_records"]["C3"]["lambda"] = 3
        assert target_constant(fixture_from_mapping(data)) == Fraction(27)


class TestIdentify:
    def test_single_faithful_constituent(self):
        candidates = identify_galois_module(fixture_from_mapping(d10_hilbert_style()))
        assert [c.names for c in candidates] == [("A",)]
        assert candidates[0].number is None
        assert candidates[0].constant == Fraction(5)

    def test_quotient_one_picks_untwisted_difference_lattice(self):
        data = d10_hilbert_style()
        data["field_records"]["C5"]["h_S"] = 1
        del data["unit_logs"]
        del data["unit_action"]
        del data["observed_unit_index"]
        candidates = identify_galois_module(fixture_from_mapping(data))
        assert [c.names for c in candidates] == [("Aprime",)]

    def test_sextic_flow_gives_numbered_pair(self):
        candidates = identify_galois_module(fixture_from_mapping(d6_totally_real()))
        assert [c.number for c in candidates] == [2, 4]
        assert [c.names for c in candidates] == [
            ("eps", "A", "Aprime"),
            ("A", "ext_A_eps"),
        ]
        assert candidates[0].display() == "(2) eps + A + Aprime"

    def test_larger_place_set_survivors(self):
        candidates = identify_galois_module(fixture_from_mapping(d6_with_inert_two()))
        assert [c.names for c in candidates] == [
            ("triv", "eps", "A", "A"),
            ("eps", "A", "ext_Aprime_1"),
            ("rho", "A", "A"),
            ("A", "ext_Aprime_rho"),
        ]
        assert all(c.number is None for c in candidates)
        assert all(c.constant == Fraction(9) for c in candidates)

    def test_refinement_pins_unique_answer(self):
        base = fixture_from_mapping(d6_totally_real())
        bigger = fixture_from_mapping(d6_with_inert_two())
        candidates = identify_galois_module(base, refinement=bigger)
        assert [c.number for c in candidates] == [2]
        assert candidates[0].names == ("eps", "A", "Aprime")

    def test_lambda_case_flips_answer(self):
        data = d6_totally_real()
        data["case_flag"] = "proot_unit_notL"
        data["field_records"]["C3"]["lambda"] = 3
        candidates = identify_galois_module(fixture_from_mapping(data))
        assert [c.number for c in candidates] == [1]
        assert candidates[0].names == ("eps", "A", "A")

    def test_inconsistent_fixture_raises(self):
        data = d6_totally_real()
        data["field_records"]["C3"]["h_S"] = 2
        with pytest.raises(ValueError, match="no module matches"):
            identify_galois_module(fixture_from_mapping(data))


class TestRefinementValidation:
    def test_different_group_rejected(self):
        base = fixture_from_mapping(d6_totally_real())
        other = fixture_from_mapping(d10_hilbert_style())
        with pytest.raises(ValueError, match="different group"):
            identify_galois_module(base, refinement=other)

    def test_base_with_trivial_part_rejected(self):
        base = fixture_from_mapping(d6_with_inert_two())
        bigger = fixture_from_mapping(d6_with_inert_two())
        with pytest.raises(ValueError, match="no trivial constituents"):
            identify_galois_module(base, refinement=bigger)

    def test_refinement_must_add_only_trivial_rank(self):
        base = fixture_from_mapping(d6_totally_real())
        bigger = fixture_from_mapping(d6_sign_heavy_refinement())
        with pytest.raises(ValueError, match="only trivial-character rank"):
            identify_galois_module(base, refinement=bigger)

    def test_incompatible_pair_eliminates_everything(self):
        # Quotient 1 forces constant 1/3, whose candidates all slice
        # away from the survivors of the inert-place fixture.
        data = d6_totally_real()
        data["field_records"]["C3"]["h_S"] = 1
        del data["observed_unit_index"]
        base = fixture_from_mapping(data)
        assert [c.number for c in identify_galois_module(base)] == [3, 5]
        bigger = fixture_from_mapping(d6_with_inert_two())
        with pytest.raises(ValueError, match="eliminates every candidate"):
            identify_galois_module(base, refinement=bigger)


class TestSlices:
    def test_trivial_disappears(self):
        assert _drop_trivial_slices(("triv",)) == [()]

    def test_rank_two_coset_lattice_keeps_sign(self):
        assert _drop_trivial_slices(("rho",)) == [("eps",)]

    def test_forced_split_of_sign_gluing(self):
        # The faithful-by-sign gluing does not exist for the untwisted
        # difference lattice, so dropping the trivial part must split.
        assert _drop_trivial_slices(("ext_Aprime_rho",)) == [("eps", "Aprime")]

    def test_ambiguous_saturation_keeps_both(self):
        assert _drop_trivial_slices(("ext_A_rho",)) == [
            ("eps", "A"),
            ("ext_A_eps",),
        ]

    def test_group_ring_slices(self):
        assert _drop_trivial_slices(("regular",)) == [
            ("Aprime", "ext_A_eps"),
            ("eps", "A", "Aprime"),
        ]

    def test_component_slices_combine(self):
        slices = _drop_trivial_slices(("triv", "eps", "A", "A"))
        assert slices == [("eps", "A", "A")]
