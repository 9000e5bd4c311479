"""Exact linear algebra: frozen values, algebraic properties, sympy oracle."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact import exactla as la

int_entries = st.integers(min_value=-9, max_value=9)


def int_matrix(max_dim: int = 5):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda r: st.integers(min_value=1, max_value=max_dim).flatmap(
            lambda c: st.lists(
                st.lists(int_entries, min_size=c, max_size=c),
                min_size=r,
                max_size=r,
            )
        )
    )


def square_int_matrix(max_dim: int = 5):
    return st.integers(min_value=1, max_value=max_dim).flatmap(
        lambda n: st.lists(
            st.lists(int_entries, min_size=n, max_size=n), min_size=n, max_size=n
        )
    )


def same_lattice(a, b) -> bool:
    ha, hb = la.hnf(a), la.hnf(b)
    return ha == hb


class TestDeterminant:
    def test_frozen_small_values(self):
        assert la.det([]) == 1
        assert la.det([[7]]) == 7
        assert la.det([[1, 2], [3, 4]]) == -2
        assert la.det([[2, 0, 1], [1, 1, 0], [0, 3, 1]]) == 5
        assert la.det([[Fraction(1, 2), 1], [1, Fraction(1, 2)]]) == Fraction(-3, 4)

    @settings(max_examples=150)
    @given(square_int_matrix())
    def test_matches_sympy_and_fraction_route(self, m):
        expected = int(sympy.Matrix(m).det())
        assert la.det(m) == expected
        as_fractions = [[Fraction(x) for x in row] for row in m]
        assert la.det(as_fractions) == expected

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            la.det([[1, 2, 3], [4, 5, 6]])


class TestHermiteNormalForm:
    def test_frozen_small_values(self):
        assert la.hnf([[0, 0], [0, 0]]) == []
        assert la.hnf([[2, 4], [2, 2]]) == [[2, 0], [0, 2]]
        assert la.hnf([[1, 2, 3]]) == [[1, 2, 3]]
        assert la.hnf([[-1, -2, -3]]) == [[1, 2, 3]]
        assert la.hnf([[3, 1], [1, 1]]) == [[1, 1], [0, 2]]
        assert la.hnf([[2, 1], [1, 1]]) == [[1, 0], [0, 1]]
        assert la.hnf([[6, 0], [0, 0], [2, 2]]) == [[2, 2], [0, 6]]

    @settings(max_examples=150)
    @given(int_matrix())
    def test_transform_is_unimodular_and_reproduces_input_span(self, m):
        h, u = la.hnf_with_transform(m)
        assert abs(la.det(u)) == 1
        product = la.mat_mul(u, m)
        assert product[: len(h)] == h
        assert all(la.is_zero_vector(row) for row in product[len(h):])
        assert same_lattice(m, h)

    @settings(max_examples=100)
    @given(int_matrix(4), st.integers(min_value=0, max_value=2**32 - 1))
    def test_canonical_under_unimodular_row_changes(self, m, seed):
        rng = random.Random(seed)
        u = la.random_unimodular(len(m), rng)
        assert la.hnf(la.mat_mul(u, m)) == la.hnf(m)

    def test_hnf_structure_pivots(self):
        h = la.hnf([[4, 2, 1], [0, 3, 1], [0, 0, 5]])
        pivots = [next(j for j, x in enumerate(row) if x) for row in h]
        assert pivots == sorted(pivots)
        for i, row in enumerate(h):
            pivot = row[pivots[i]]
            assert pivot > 0
            for above in h[:i]:
                assert 0 <= above[pivots[i]] < pivot


class TestKernelsAndSaturation:
    def test_frozen_small_values(self):
        assert la.right_kernel([[1, 2, 3]]) == [[1, 1, -1], [0, 3, -2]]
        assert la.left_kernel([[1], [2]]) == [[2, -1]]
        assert la.right_kernel([], ncols=2) == [[1, 0], [0, 1]]
        assert la.saturate([[2, 4]]) == [[1, 2]]
        assert la.saturate([[2, 0], [0, 3]]) == [[1, 0], [0, 1]]

    @settings(max_examples=150)
    @given(int_matrix())
    def test_kernel_annihilates_and_matches_sympy_rank(self, m):
        k = la.right_kernel(m)
        for v in k:
            assert la.is_zero_vector(la.mat_vec_mul(m, v))
        ncols = len(m[0])
        assert len(k) == ncols - sympy.Matrix(m).rank()
        # saturated: saturating the kernel changes nothing
        if k:
            assert la.saturate(k) == la.hnf(k)

    @settings(max_examples=100)
    @given(int_matrix())
    def test_sympy_nullspace_inside_kernel_span(self, m):
        k = la.right_kernel(m)
        for vec in sympy.Matrix(m).nullspace():
            flat = [Fraction(sympy.nsimplify(x)) for x in vec]
            scaled, _ = la.clear_denominators([flat])
            assert la.in_zspan(la.hnf(k + scaled), scaled[0]) is not None

    @settings(max_examples=100)
    @given(int_matrix())
    def test_saturation_contains_with_finite_index(self, m):
        if la.rank(m) == 0:
            return
        sat = la.saturate(m)
        index = la.index_in(sat, la.hnf(m))
        assert index >= 1


class TestSpanMembership:
    def test_in_zspan_frozen(self):
        basis = la.hnf([[1, 0, 1], [0, 2, 0]])
        assert la.in_zspan(basis, [1, 2, 1]) == [1, 1]
        assert la.in_zspan(basis, [1, 1, 1]) is None
        assert la.in_zspan(basis, [0, 0, 0]) == [0, 0]
        assert la.in_zspan([], [0, 0]) == []
        assert la.in_zspan([], [1, 0]) is None

    @settings(max_examples=100)
    @given(int_matrix(4), st.lists(int_entries, min_size=4, max_size=4))
    def test_in_zspan_roundtrip(self, m, coeffs):
        h = la.hnf(m)
        coeffs = coeffs[: len(h)]
        v = [0] * len(m[0])
        for c, row in zip(coeffs, h):
            v = la.vec_add(v, la.vec_scale(row, c))
        recovered = la.in_zspan(h, v)
        assert recovered is not None
        rebuilt = [0] * len(m[0])
        for c, row in zip(recovered, h):
            rebuilt = la.vec_add(rebuilt, la.vec_scale(row, c))
        assert rebuilt == v


class TestSolveAndInverse:
    @settings(max_examples=100)
    @given(int_matrix(4), st.lists(int_entries, min_size=1, max_size=4))
    def test_consistent_systems_solved(self, m, x):
        x = (x * 4)[: len(m[0])]
        rhs = la.mat_vec_mul(m, x)
        solution = la.solve_linear(m, rhs)
        assert solution is not None
        assert la.mat_vec_mul(m, solution) == [Fraction(b) for b in rhs]

    def test_inconsistent_detected(self):
        assert la.solve_linear([[1, 0], [1, 0]], [1, 2]) is None

    @settings(max_examples=80)
    @given(square_int_matrix(4))
    def test_inverse_or_singular(self, m):
        if la.det(m) == 0:
            with pytest.raises(ValueError):
                la.mat_inverse(m)
        else:
            inv = la.mat_inverse(m)
            product = la.mat_mul(m, inv)
            assert product == [
                [Fraction(1) if i == j else Fraction(0) for j in range(len(m))]
                for i in range(len(m))
            ]


class TestIndex:
    def test_scaled_standard_lattice(self):
        ambient = la.identity_matrix(3)
        sub = [[2, 0, 0], [0, 2, 0], [0, 0, 2]]
        assert la.index_in(ambient, sub) == 8

    def test_not_contained_raises(self):
        with pytest.raises(ValueError):
            la.index_in([[2, 0], [0, 2]], [[1, 0], [0, 2]])

    def test_infinite_index_raises(self):
        with pytest.raises(ValueError):
            la.index_in([[1, 0], [0, 1]], [[1, 0]])

    @settings(max_examples=60)
    @given(
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_multiplicative_in_towers(self, n, c1, c2, seed):
        rng = random.Random(seed)
        a = la.identity_matrix(n)
        b = la.mat_mul(la.random_unimodular(n, rng), [[c1 * x for x in row] for row in a])
        c = la.mat_mul(la.random_unimodular(n, rng), [[c2 * x for x in row] for row in b])
        assert la.index_in(a, c) == la.index_in(a, b) * la.index_in(b, c)


class TestModP:
    def test_frozen(self):
        rows, pivots = la.rref_mod_p([[2, 4], [1, 2]], 5)
        assert rows == [[1, 2]]
        assert pivots == [0]

    @settings(max_examples=100)
    @given(int_matrix(4), st.sampled_from([2, 3, 5, 7]))
    def test_rref_row_space_preserved(self, m, p):
        rows, pivots = la.rref_mod_p(m, p)
        assert len(rows) == len(pivots)
        for row, col in zip(rows, pivots):
            assert row[col] == 1
        # idempotent
        again, again_pivots = la.rref_mod_p(rows, p)
        assert again == rows and again_pivots == pivots


class TestScalarHelpers:
    def test_factor_int_frozen(self):
        assert la.factor_int(1) == {}
        assert la.factor_int(12) == {2: 2, 3: 1}
        assert la.factor_int(97) == {97: 1}
        assert la.factor_int(2 * 3 * 5 * 7 * 11) == {2: 1, 3: 1, 5: 1, 7: 1, 11: 1}

    @settings(max_examples=100)
    @given(st.integers(min_value=1, max_value=10**6))
    def test_factor_int_reconstructs(self, n):
        product = 1
        for p, e in la.factor_int(n).items():
            assert la.is_prime(p)
            product *= p**e
        assert product == n

    def test_factor_fraction(self):
        assert la.factor_fraction(Fraction(4, 9)) == {2: 2, 3: -2}
        assert la.factor_fraction(1) == {}

    def test_is_prime_frozen(self):
        primes = [p for p in range(60) if la.is_prime(p)]
        assert primes == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]

    def test_format_scalar(self):
        assert la.format_scalar(Fraction(1, 3)) == "1/3"
        assert la.format_scalar(Fraction(4, 2)) == "2"
        assert la.format_scalar(5) == "5"
