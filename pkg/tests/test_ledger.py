"""Fixture loading and the number-field identity audits.

The fixtures here are synthetic but exactly consistent: every class
number, rank, regulator and index is chosen so the identities under
test hold with zero error, and each failure test perturbs exactly one
value.  Ranks always agree with the declared splitting data, because
the loader recomputes them from double cosets.
"""

import json
from fractions import Fraction

import pytest

from artifact.burnside import verified_relation, zero_element
from artifact.groups import build_group
from artifact.lattices import direct_sum
from artifact.ledger import (
    FixtureError,
    audit_relation,
    class_number_identity_check,
    class_number_prime_part_check,
    d2q_chain_evaluation,
    fixture_battery,
    fixture_from_mapping,
    load_fixture,
    newreg_identity_check,
    s_unit_pairing_check,
    structural_invariants,
    unit_index_prediction,
    unit_lattice,
)
from artifact.zoo import zoo_lattice


def _matrices(lattice):
    group = lattice.group
    q = group.order // 2
    return [
        [list(row) for row in lattice.action(q)],
        [list(row) for row in lattice.action(1)],
    ]


def d10_hilbert_style() -> dict:
    """Imaginary quadratic base case: quotient 1/5, unit index 1.

    One archimedean place with decomposition group of order two; the
    unit lattice is a single twisted difference lattice of rank 4.
    """
    lattice = zoo_lattice(5, "A").lattice
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:5",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 4, "R_S": "5", "lambda": 1},
            "C2": {"h_S": 1, "w": 2, "r_S": 2, "R_S": "1", "lambda": 1},
            "C5": {"h_S": 5, "w": 2, "r_S": 0, "R_S": "1", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 0, "R_S": "1", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "C2"},
        ],
        "observed_unit_index": 1,
        "unit_logs": {
            "matrix": [
                [5, 0, 0, 0, -5],
                [0, 1, 0, 0, -1],
                [0, 0, 1, 0, -1],
                [0, 0, 0, 1, -1],
            ],
            "places": [{"e": 1, "f": 1}] * 5,
        },
        "unit_action": _matrices(lattice),
    }


def d6_totally_real() -> dict:
    """Totally real sextic over the rationals: quotient 1/3, index 3."""
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:3",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 5, "R_S": "54", "lambda": 1},
            "C2": {"h_S": 1, "w": 2, "r_S": 2, "R_S": "3", "lambda": 1},
            "C3": {"h_S": 3, "w": 2, "r_S": 1, "R_S": "2", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 0, "R_S": "1", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "1"},
        ],
        "observed_unit_index": 3,
    }


def d6_with_inert_two() -> dict:
    """The totally real sextic with one fully inert finite place added.

    The finite place has decomposition group the whole group, so it
    contributes a = 1; the S-unit lattice is trivial + sign + two
    twisted difference lattices, with constant 9.
    """
    lattice = direct_sum(
        direct_sum(zoo_lattice(3, "triv").lattice, zoo_lattice(3, "eps").lattice),
        direct_sum(zoo_lattice(3, "A").lattice, zoo_lattice(3, "A").lattice),
    )
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:3",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 6, "R_S": "6", "lambda": 1},
            "C2": {"h_S": 1, "w": 2, "r_S": 3, "R_S": "2", "lambda": 1},
            "C3": {"h_S": 3, "w": 2, "r_S": 2, "R_S": "2", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 1, "R_S": "2", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "1"},
            {"e": 3, "f": 2, "archimedean": False, "decomposition_class": "G"},
        ],
        "observed_unit_index": 1,
        "unit_logs": {
            "matrix": [
                [1, 0, 0, 0, 0, -1, 0],
                [0, 1, 0, 0, 0, -1, 0],
                [0, 0, 1, 0, 0, -1, 0],
                [0, 0, 0, 1, 0, -1, 0],
                [0, 0, 0, 0, 1, -1, 0],
                [0, 0, 0, 0, 0, 6, -6],
            ],
            "places": [{"e": 1, "f": 1}] * 6 + [{"e": 3, "f": 2}],
        },
        "unit_action": _matrices(lattice),
    }


def d6_split_quadratic() -> dict:
    """No decomposition group contains the rotation subgroup.

    One totally split archimedean place and one finite place with
    decomposition group of order 2: the predicted index then carries
    the classical exponent r_S(K) + 1 - r_S(k).
    """
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:3",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 8, "R_S": "9", "lambda": 1},
            "C2": {"h_S": 1, "w": 2, "r_S": 4, "R_S": "1", "lambda": 1},
            "C3": {"h_S": 3, "w": 2, "r_S": 2, "R_S": "3", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 1, "R_S": "1", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "1"},
            {"e": 1, "f": 2, "archimedean": False, "decomposition_class": "C2"},
        ],
        "observed_unit_index": 3,
    }


def d30_two_layer_chain() -> dict:
    """A two-layer tower for the dihedral group of order 30.

    Layer data telescopes: the degree-3 layer has exponent -2 and index
    9, the degree-5 layer exponent -4 and index 25, and the product
    reproduces the top-level class-number quotient 1/25.  The declared
    correction indices 3 and 5 reconcile the layer indices with the
    total index 15.
    """
    return {
        "schema": "dokchitser-fixture/1",
        "group": "D2q:15",
        "case_flag": "none",
        "provenance": "synthetic data, exactly consistent by construction",
        "field_records": {
            "1": {"h_S": 1, "w": 2, "r_S": 29, "R_S": "25", "lambda": 1},
            "C2": {"h_S": 5, "w": 2, "r_S": 14, "R_S": "1", "lambda": 1},
            "C15": {"h_S": 1, "w": 2, "r_S": 1, "R_S": "1", "lambda": 1},
            "G": {"h_S": 1, "w": 2, "r_S": 0, "R_S": "1", "lambda": 1},
        },
        "s_primes_of_k": [
            {"e": 1, "f": 1, "archimedean": True, "decomposition_class": "1"},
        ],
        "chain": {
            "primes": [3, 5],
            "fields": {
                "K0": "C15",
                "K1": {"h_S": 1, "w": 2, "r_S": 5, "R_S": "1", "lambda": 1},
                "K2": "1",
                "L0": "G",
                "L1": {"h_S": 1, "w": 2, "r_S": 2, "R_S": "1", "lambda": 1},
                "L2": "C2",
            },
            "layers": [
                {"p": 3, "unit_index": 9, "a": 0, "delta": 1, "correction_index": 3},
                {"p": 5, "unit_index": 25, "a": 0, "delta": 1, "correction_index": 5},
            ],
            "total_unit_index": 15,
        },
    }


class TestLoading:
    def test_valid_fixtures_load(self):
        for build in (d10_hilbert_style, d6_totally_real, d6_with_inert_two, d6_split_quadratic):
            fixture = fixture_from_mapping(build())
            assert fixture.provenance
            assert not fixture.is_chain
        chain = fixture_from_mapping(d30_two_layer_chain())
        assert chain.is_chain
        assert chain.q == 15

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(d10_hilbert_style()))
        fixture = load_fixture(path)
        assert fixture.descriptor == "D2q:5"
        assert fixture.records["C5"].h_s == 5

    def test_load_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(FixtureError, match="not valid JSON"):
            load_fixture(path)

    def test_wrong_schema(self):
        data = d10_hilbert_style()
        data["schema"] = "something/2"
        with pytest.raises(FixtureError, match="schema"):
            fixture_from_mapping(data)

    def test_missing_provenance(self):
        data = d10_hilbert_style()
        del data["provenance"]
        with pytest.raises(FixtureError, match="provenance"):
            fixture_from_mapping(data)

    def test_blank_provenance(self):
        data = d10_hilbert_style()
        data["provenance"] = "   "
        with pytest.raises(FixtureError, match="provenance"):
            fixture_from_mapping(data)

    def test_missing_field_record(self):
        data = d10_hilbert_style()
        del data["field_records"]["C5"]
        with pytest.raises(FixtureError, match="field_records.C5"):
            fixture_from_mapping(data)

    def test_unexpected_field_record(self):
        data = d10_hilbert_style()
        data["field_records"]["C10"] = data["field_records"]["C5"]
        with pytest.raises(FixtureError, match="unexpected keys"):
            fixture_from_mapping(data)

    def test_roots_of_unity_must_match_top_and_quadratic(self):
        data = d10_hilbert_style()
        data["field_records"]["C5"]["w"] = 10
        with pytest.raises(FixtureError, match="field_records.1.w"):
            fixture_from_mapping(data)

    def test_roots_of_unity_must_match_base_and_degree_q(self):
        data = d10_hilbert_style()
        data["field_records"]["C2"]["w"] = 6
        with pytest.raises(FixtureError, match="field_records.C2.w"):
            fixture_from_mapping(data)

    def test_lambda_must_match_case_flag(self):
        data = d10_hilbert_style()
        data["field_records"]["G"]["lambda"] = 2
        with pytest.raises(FixtureError, match="field_records.G.lambda"):
            fixture_from_mapping(data)

    def test_sqrt_unit_case_lambda_profile(self):
        data = d6_totally_real()
        data["case_flag"] = "sqrt_unit"
        with pytest.raises(FixtureError, match="lambda"):
            fixture_from_mapping(data)
        data["field_records"]["C2"]["lambda"] = 2
        data["field_records"]["G"]["lambda"] = 2
        fixture = fixture_from_mapping(data)
        assert structural_invariants(fixture).lambda_profile["C2"] == 2

    def test_unknown_case_flag(self):
        data = d10_hilbert_style()
        data["case_flag"] = "mystery"
        with pytest.raises(FixtureError, match="case_flag"):
            fixture_from_mapping(data)

    def test_rank_must_match_declared_splitting(self):
        data = d10_hilbert_style()
        data["field_records"]["C2"]["r_S"] = 3
        with pytest.raises(FixtureError, match="field_records.C2.r_S"):
            fixture_from_mapping(data)

    def test_empty_place_list(self):
        data = d10_hilbert_style()
        data["s_primes_of_k"] = []
        with pytest.raises(FixtureError, match="Archimedean"):
            fixture_from_mapping(data)

    def test_no_archimedean_place(self):
        data = d6_with_inert_two()
        data["s_primes_of_k"] = [data["s_primes_of_k"][1]]
        with pytest.raises(FixtureError, match="Archimedean"):
            fixture_from_mapping(data)

    def test_archimedean_place_must_have_e_f_one(self):
        data = d10_hilbert_style()
        data["s_primes_of_k"][0]["e"] = 2
        with pytest.raises(FixtureError, match="e = f = 1"):
            fixture_from_mapping(data)

    def test_archimedean_decomposition_group_small(self):
        data = d6_totally_real()
        data["s_primes_of_k"][0]["decomposition_class"] = "C3"
        with pytest.raises(FixtureError, match="order at most 2"):
            fixture_from_mapping(data)

    def test_finite_place_e_f_must_match_decomposition_order(self):
        data = d6_with_inert_two()
        data["s_primes_of_k"][1]["f"] = 1
        with pytest.raises(FixtureError, match="decomposition group order"):
            fixture_from_mapping(data)

    def test_unknown_decomposition_class(self):
        data = d10_hilbert_style()
        data["s_primes_of_k"][0]["decomposition_class"] = "C7"
        with pytest.raises(FixtureError, match="not a subgroup class"):
            fixture_from_mapping(data)

    def test_unit_logs_row_count(self):
        data = d10_hilbert_style()
        data["unit_logs"]["matrix"] = data["unit_logs"]["matrix"][:3]
        with pytest.raises(FixtureError, match="one row per fundamental"):
            fixture_from_mapping(data)

    def test_unit_logs_column_count(self):
        data = d10_hilbert_style()
        data["unit_logs"]["matrix"][0] = [1, -1]
        with pytest.raises(FixtureError, match="one column per place"):
            fixture_from_mapping(data)

    def test_unit_logs_place_count(self):
        data = d10_hilbert_style()
        data["unit_logs"]["places"] = data["unit_logs"]["places"][:4]
        with pytest.raises(FixtureError, match="rank \\+ 1"):
            fixture_from_mapping(data)

    def test_unit_action_shape(self):
        data = d10_hilbert_style()
        data["unit_action"] = [data["unit_action"][0]]
        with pytest.raises(FixtureError, match="generator matrices"):
            fixture_from_mapping(data)

    def test_unit_action_entries_integral(self):
        data = d10_hilbert_style()
        data["unit_action"][0][0][0] = "1"
        with pytest.raises(FixtureError, match="expected an integer"):
            fixture_from_mapping(data)

    def test_composite_order_needs_chain(self):
        data = d30_two_layer_chain()
        del data["chain"]
        # Drop the optional sections so the only failure is the shape.
        with pytest.raises(FixtureError, match="chain"):
            fixture_from_mapping(data)

    def test_non_dihedral_descriptor_rejected(self):
        data = d10_hilbert_style()
        data["group"] = "C:10"
        with pytest.raises(FixtureError, match="group"):
            fixture_from_mapping(data)

    def test_chain_missing_layer_record(self):
        data = d30_two_layer_chain()
        del data["chain"]["fields"]["K1"]
        with pytest.raises(FixtureError, match="chain.fields.K1: missing layer record"):
            fixture_from_mapping(data)

    def test_chain_endpoints_must_alias_field_records(self):
        data = d30_two_layer_chain()
        data["chain"]["fields"]["K0"] = {"h_S": 1, "w": 2, "r_S": 1, "R_S": "1", "lambda": 1}
        with pytest.raises(FixtureError, match="alias"):
            fixture_from_mapping(data)

    def test_chain_primes_must_multiply_to_q(self):
        data = d30_two_layer_chain()
        data["chain"]["primes"] = [3, 7]
        with pytest.raises(FixtureError, match="multiply"):
            fixture_from_mapping(data)

    def test_chain_layer_prime_mismatch(self):
        data = d30_two_layer_chain()
        data["chain"]["layers"][0]["p"] = 5
        with pytest.raises(FixtureError, match="layers\\[0\\].p"):
            fixture_from_mapping(data)

    def test_chain_delta_range(self):
        data = d30_two_layer_chain()
        data["chain"]["layers"][1]["delta"] = 2
        with pytest.raises(FixtureError, match="delta"):
            fixture_from_mapping(data)

    def test_chain_requires_case_none(self):
        data = d30_two_layer_chain()
        data["case_flag"] = "sqrt_unit"
        with pytest.raises(FixtureError, match="per-layer"):
            fixture_from_mapping(data)


class TestStructuralInvariants:
    def test_counts_fully_inert_places(self):
        assert structural_invariants(fixture_from_mapping(d6_totally_real())).a == 0
        assert structural_invariants(fixture_from_mapping(d6_with_inert_two())).a == 1

    def test_delta_follows_case_flag(self):
        fixture = fixture_from_mapping(d6_totally_real())
        assert structural_invariants(fixture).delta == 1
        data = d6_totally_real()
        data["case_flag"] = "proot_unit_L"
        data["field_records"]["C3"]["lambda"] = 3
        data["field_records"]["G"]["lambda"] = 3
        assert structural_invariants(fixture_from_mapping(data)).delta == 3

    def test_proot_not_in_degree_q_field_keeps_delta_one(self):
        data = d6_totally_real()
        data["case_flag"] = "proot_unit_notL"
        data["field_records"]["C3"]["lambda"] = 3
        inv = structural_invariants(fixture_from_mapping(data))
        assert inv.delta == 1
        assert inv.lambda_profile == {"1": 1, "C2": 1, "C3": 3, "G": 1}


class TestClassNumberIdentity:
    def test_exact_pass(self):
        for build in (d10_hilbert_style, d6_totally_real, d6_with_inert_two):
            fixture = fixture_from_mapping(build())
            report = class_number_identity_check(fixture, audit_relation(fixture.group))
            assert report.passed
            assert report.relative_error == 0.0

    def test_exact_quotient_value(self):
        fixture = fixture_from_mapping(d6_totally_real())
        report = class_number_identity_check(fixture, audit_relation(fixture.group))
        # w factors cancel in the dihedral relation, so the exact part
        # is the plain class-number quotient.
        assert report.exact_quotient == Fraction(1, 3)

    def test_detects_wrong_class_number(self):
        data = d6_totally_real()
        data["field_records"]["1"]["h_S"] = 2
        report = class_number_identity_check(
            fixture_from_mapping(data), audit_relation(build_group("D2q:3"))
        )
        assert not report.passed
        assert report.relative_error > 0.5

    def test_detects_wrong_regulator(self):
        data = d6_totally_real()
        data["field_records"]["1"]["R_S"] = "54.000001"
        report = class_number_identity_check(
            fixture_from_mapping(data), audit_relation(build_group("D2q:3"))
        )
        assert not report.passed
        assert 0 < report.relative_error < 1e-6

    def test_zero_relation_trivially_passes(self):
        fixture = fixture_from_mapping(d6_totally_real())
        zero = verified_relation(zero_element(fixture.group))
        report = class_number_identity_check(fixture, zero)
        assert report.passed
        assert report.lhs == report.rhs == 1.0

    def test_relation_group_must_match(self):
        fixture = fixture_from_mapping(d6_totally_real())
        with pytest.raises(ValueError, match="different groups"):
            class_number_identity_check(fixture, audit_relation(build_group("D2q:5")))


class TestUnitIndexPrediction:
    def test_imaginary_quadratic_base(self):
        pred = unit_index_prediction(fixture_from_mapping(d10_hilbert_style()))
        assert pred.exponent == Fraction(-1)
        assert pred.quotient == Fraction(1, 5)
        assert pred.predicted_index == 1
        assert pred.passed

    def test_totally_real_sextic(self):
        pred = unit_index_prediction(fixture_from_mapping(d6_totally_real()))
        assert pred.exponent == Fraction(-2)
        assert pred.predicted_index == 3
        assert pred.passed

    def test_with_fully_inert_place(self):
        pred = unit_index_prediction(fixture_from_mapping(d6_with_inert_two()))
        assert pred.exponent == Fraction(-1)
        assert pred.predicted_index == 1
        assert pred.passed

    def test_rational_base_exponent_matches_classical_formula(self):
        # Over the rationals with no fully inert place the prediction is
        # quotient * p^(r_S(K) + 1) when S is just the real place.
        fixture = fixture_from_mapping(d6_totally_real())
        pred = unit_index_prediction(fixture)
        r_quadratic = fixture.records["C3"].r_s
        assert -pred.exponent == r_quadratic + 1
        assert pred.predicted_index == pred.quotient * Fraction(3) ** (r_quadratic + 1)

    def test_split_shape_exponent_matches_classical_formula(self):
        # When no decomposition group contains the rotation subgroup the
        # exponent collapses to r_S(K) + 1 - r_S(k).
        fixture = fixture_from_mapping(d6_split_quadratic())
        pred = unit_index_prediction(fixture)
        r_quadratic = fixture.records["C3"].r_s
        r_base = fixture.records["G"].r_s
        assert -pred.exponent == r_quadratic + 1 - r_base
        assert pred.predicted_index == 3
        assert pred.passed

    def test_observed_mismatch_fails(self):
        data = d6_totally_real()
        data["observed_unit_index"] = 9
        pred = unit_index_prediction(fixture_from_mapping(data))
        assert not pred.passed
        assert any("does not match observed" in note for note in pred.notes)

    def test_non_integral_prediction_fails(self):
        data = d6_totally_real()
        data["field_records"]["C3"]["h_S"] = 27
        pred = unit_index_prediction(fixture_from_mapping(data))
        assert pred.predicted_index == Fraction(1, 3)
        assert not pred.passed

    def test_chain_fixture_rejected(self):
        fixture = fixture_from_mapping(d30_two_layer_chain())
        with pytest.raises(ValueError, match="layer by layer"):
            unit_index_prediction(fixture)


class TestSUnitPairing:
    def test_archimedean_only(self):
        report = s_unit_pairing_check(fixture_from_mapping(d10_hilbert_style()))
        assert report.passed
        assert report.relative_error == 0.0
        # Gram determinant is (number of places) * R^2 here.
        assert report.lhs == 125.0

    def test_mixed_weights(self):
        report = s_unit_pairing_check(fixture_from_mapping(d6_with_inert_two()))
        assert report.passed
        # weight sum 12 over weight product 6 gives determinant 2 R^2.
        assert report.lhs == 72.0

    def test_product_formula_violation_reported(self):
        data = d10_hilbert_style()
        data["unit_logs"]["matrix"][0][0] = 4
        report = s_unit_pairing_check(fixture_from_mapping(data))
        assert not report.passed
        assert any("product formula" in note for note in report.notes)

    def test_wrong_regulator_fails(self):
        data = d10_hilbert_style()
        data["field_records"]["1"]["R_S"] = "5.0001"
        # Keep the class-number side untouched; only the pairing check
        # is expected to notice.
        report = s_unit_pairing_check(fixture_from_mapping(data))
        assert not report.passed

    def test_missing_logs(self):
        fixture = fixture_from_mapping(d6_totally_real())
        with pytest.raises(ValueError, match="unit_logs"):
            s_unit_pairing_check(fixture)


class TestNewregIdentity:
    def test_twisted_difference_lattice(self):
        fixture = fixture_from_mapping(d10_hilbert_style())
        report = newreg_identity_check(fixture, audit_relation(fixture.group))
        assert report.passed
        assert report.exact_quotient == Fraction(5)

    def test_split_sum_with_inert_place(self):
        fixture = fixture_from_mapping(d6_with_inert_two())
        report = newreg_identity_check(fixture, audit_relation(fixture.group))
        assert report.passed
        assert report.exact_quotient == Fraction(9)

    def test_wrong_action_fails(self):
        data = d10_hilbert_style()
        data["unit_action"] = _matrices(zoo_lattice(5, "Aprime").lattice)
        fixture = fixture_from_mapping(data)
        report = newreg_identity_check(fixture, audit_relation(fixture.group))
        assert not report.passed

    def test_inconsistent_action_rejected(self):
        data = d10_hilbert_style()
        # Swap the generator matrices: the reflection/rotation roles no
        # longer satisfy the multiplication table.
        data["unit_action"] = [data["unit_action"][1], data["unit_action"][0]]
        fixture = fixture_from_mapping(data)
        with pytest.raises(ValueError, match="multiplication table|unimodular"):
            unit_lattice(fixture)

    def test_missing_action(self):
        fixture = fixture_from_mapping(d6_totally_real())
        with pytest.raises(ValueError, match="unit_action"):
            newreg_identity_check(fixture, audit_relation(fixture.group))


class TestChainEvaluation:
    def test_flat_fixture_is_single_layer(self):
        fixture = fixture_from_mapping(d6_totally_real())
        report = d2q_chain_evaluation(fixture)
        assert report.passed
        assert len(report.layers) == 1
        assert report.layers[0].exponent == Fraction(-2)
        assert report.correction_check is None

    def test_single_layer_chain_reduces_to_prediction(self):
        data = d6_totally_real()
        data["chain"] = {
            "primes": [3],
            "fields": {"K0": "C3", "K1": "1", "L0": "G", "L1": "C2"},
            "layers": [
                {"p": 3, "unit_index": 3, "a": 0, "delta": 1, "correction_index": 1}
            ],
            "total_unit_index": 3,
        }
        fixture = fixture_from_mapping(data)
        report = d2q_chain_evaluation(fixture)
        assert report.passed
        flat = unit_index_prediction(fixture_from_mapping(d6_totally_real()))
        assert report.layers[0].exponent == flat.exponent
        assert report.layers[0].quotient == flat.quotient
        assert report.layers[0].unit_index == flat.predicted_index

    def test_two_layer_tower(self):
        fixture = fixture_from_mapping(d30_two_layer_chain())
        report = d2q_chain_evaluation(fixture)
        assert report.passed
        assert [layer.p for layer in report.layers] == [3, 5]
        assert [layer.exponent for layer in report.layers] == [Fraction(-2), Fraction(-4)]
        assert report.product_check.exact_quotient == Fraction(1, 25)
        assert report.correction_check is not None
        assert report.correction_check.passed

    def test_layer_identity_failure(self):
        data = d30_two_layer_chain()
        data["chain"]["layers"][0]["unit_index"] = 3
        report = d2q_chain_evaluation(fixture_from_mapping(data))
        assert not report.passed
        assert report.layers[0].verdict == "fail"
        # The declared layer index also feeds the telescoped product, so
        # the top-level identity breaks with it.
        assert not report.product_check.passed

    def test_correction_failure(self):
        data = d30_two_layer_chain()
        data["chain"]["layers"][1]["correction_index"] = 1
        report = d2q_chain_evaluation(fixture_from_mapping(data))
        assert not report.passed
        assert not report.correction_check.passed

    def test_corrupt_intermediate_ranks(self):
        data = d30_two_layer_chain()
        data["chain"]["fields"]["K1"]["r_S"] = 6
        with pytest.raises(ValueError, match="corrupt ranks"):
            d2q_chain_evaluation(fixture_from_mapping(data))

    def test_half_integer_layer_exponent_fails(self):
        data = d30_two_layer_chain()
        data["chain"]["fields"]["K1"]["r_S"] = 9
        report = d2q_chain_evaluation(fixture_from_mapping(data))
        assert not report.passed
        assert report.layers[1].exponent.denominator == 2
        assert report.layers[1].verdict == "fail"


class TestPrimePartCheck:
    def test_uncertified_prime_passes(self):
        fixture = fixture_from_mapping(d6_totally_real())
        report = class_number_prime_part_check(fixture, audit_relation(fixture.group))
        assert report.passed
        assert report.exact_quotient == Fraction(1, 3)

    def test_certified_small_prime_fails(self):
        data = d6_totally_real()
        data["field_records"]["C3"]["h_S"] = 2
        fixture = fixture_from_mapping(data)
        report = class_number_prime_part_check(fixture, audit_relation(fixture.group))
        assert not report.passed
        assert any("certified prime 2" in note for note in report.notes)

    def test_prime_beyond_group_order_fails(self):
        data = d6_totally_real()
        data["field_records"]["1"]["h_S"] = 7
        fixture = fixture_from_mapping(data)
        report = class_number_prime_part_check(fixture, audit_relation(fixture.group))
        assert not report.passed
        assert any("certified prime 7" in note for note in report.notes)

    def test_chain_quotient_passes(self):
        fixture = fixture_from_mapping(d30_two_layer_chain())
        report = class_number_prime_part_check(fixture, audit_relation(fixture.group))
        assert report.passed


class TestBattery:
    def test_flat_battery_all_pass(self):
        for build in (d10_hilbert_style, d6_totally_real, d6_with_inert_two, d6_split_quadratic):
            fixture = fixture_from_mapping(build())
            reports = fixture_battery(fixture)
            assert all(report.passed for report in reports), [
                (r.check, r.notes) for r in reports if not r.passed
            ]
            names = [report.check for report in reports]
            assert "class-number-relation" in names
            assert "certified-prime-parts" in names
            assert "unit-index" in names

    def test_battery_includes_optional_checks(self):
        reports = fixture_battery(fixture_from_mapping(d10_hilbert_style()))
        names = [report.check for report in reports]
        assert "s-unit-pairing" in names
        assert "unit-lattice-regulator-constant" in names

    def test_chain_battery(self):
        reports = fixture_battery(fixture_from_mapping(d30_two_layer_chain()))
        names = [report.check for report in reports]
        assert "chain-product" in names
        assert "chain-correction-terms" in names
        assert "chain-layer-1" in names and "chain-layer-2" in names
        assert all(report.passed for report in reports)
