import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qres.errors import DegenerateInputError, DimensionError
from qres.exact_lattice import (
    IntegerMatrix,
    IntegerVector,
    determinant,
    hermite_normal_form,
    is_primitive,
    matrix_rank,
    primitive,
    rational_coordinates,
    smith_normal_form,
    span_coordinates,
)
from fractions import Fraction


def det_by_permutation_expansion(rows):
    """Independent determinant oracle: signed sum over permutations."""
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        # count inversions for the signature
        inv = sum(
            1 for i in range(n) for j in range(i + 1, n) if seen[i] > seen[j]
        )
        sign = -1 if inv % 2 else 1
        prod = 1
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += sign * prod
    return total


class TestDeterminant:
    def test_identity(self):
        assert determinant(IntegerMatrix([[1, 0], [0, 1]])) == 1

    def test_cofactor(self):
        assert determinant(IntegerMatrix([[0, 1], [-1, 3]])) == 1

    def test_diagonal(self):
        assert determinant(IntegerMatrix([[2, 0], [0, 3]])) == 6

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            determinant(IntegerMatrix([[1, 2, 3], [4, 5, 6]]))

    @given(
        st.lists(
            st.lists(st.integers(-9, 9), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    def test_matches_permutation_expansion(self, rows):
        assert determinant(IntegerMatrix(rows)) == det_by_permutation_expansion(rows)


matrices = st.integers(1, 3).flatmap(
    lambda n: st.integers(1, 3).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(-9, 9), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
)


class TestSmithNormalForm:
    def test_identity(self):
        assert smith_normal_form(IntegerMatrix.identity(2)).diagonal == (1, 1)

    def test_diag_2_3(self):
        # brute-force enumeration of Z^2/(image) gives a cyclic group of order 6
        assert smith_normal_form(IntegerMatrix([[2, 0], [0, 3]])).diagonal == (1, 6)

    def test_diag_2_2(self):
        assert smith_normal_form(IntegerMatrix([[2, 0], [0, 2]])).diagonal == (2, 2)

    @given(matrices)
    @settings(max_examples=200)
    def test_decomposition_invariants(self, rows):
        m = IntegerMatrix(rows)
        snf = smith_normal_form(m)
        assert snf.apply_to(m) == snf.diagonal_matrix()
        assert abs(determinant(snf.left)) == 1
        assert abs(determinant(snf.right)) == 1
        diag = snf.diagonal
        assert all(d >= 0 for d in diag)
        for a, b in zip(diag, diag[1:]):
            if a:
                assert b % a == 0
            else:
                assert b == 0

    def test_deterministic(self):
        m = IntegerMatrix([[4, 6, 2], [2, -8, 9], [0, 3, 3]])
        first = smith_normal_form(m)
        second = smith_normal_form(m)
        assert first == second


class TestPrimitive:
    def test_divides_gcd(self):
        assert primitive(IntegerVector([2, 4])) == IntegerVector([1, 2])

    def test_already_primitive(self):
        assert primitive(IntegerVector([1, 0, 0])) == IntegerVector([1, 0, 0])

    def test_sign_preserved(self):
        assert primitive(IntegerVector([-3, 6, 9])) == IntegerVector([-1, 2, 3])

    def test_zero_rejected(self):
        with pytest.raises(DegenerateInputError):
            primitive(IntegerVector([0, 0]))

    @given(st.lists(st.integers(-50, 50), min_size=1, max_size=4))
    def test_result_is_primitive(self, entries):
        v = IntegerVector(entries)
        if v.is_zero():
            return
        assert is_primitive(primitive(v))


class TestRationalCoordinates:
    def test_skew_basis(self):
        basis = IntegerMatrix([[1, 0], [-1, 2]])
        assert rational_coordinates(basis, IntegerVector([0, 1])) == (
            Fraction(1, 2),
            Fraction(1, 2),
        )

    def test_identity_basis(self):
        basis = IntegerMatrix.identity(2)
        assert rational_coordinates(basis, IntegerVector([7, -2])) == (7, -2)

    def test_weighted_basis(self):
        basis = IntegerMatrix([[1, 0], [-2, 5]])
        assert rational_coordinates(basis, IntegerVector([0, 1])) == (
            Fraction(2, 5),
            Fraction(1, 5),
        )

    def test_singular_rejected(self):
        with pytest.raises(DimensionError):
            rational_coordinates(IntegerMatrix([[1, 1], [2, 2]]), IntegerVector([1, 0]))

    @given(
        st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3),
        st.lists(st.integers(-6, 6), min_size=3, max_size=3),
    )
    def test_recombination(self, rows, target):
        m = IntegerMatrix(rows)
        if determinant(m) == 0:
            return
        coords = rational_coordinates(m, IntegerVector(target))
        recombined = [
            sum(c * r for c, r in zip(coords, (row.entries[j] for row in m.rows)))
            for j in range(3)
        ]
        assert recombined == list(target)


class TestSpanCoordinates:
    def test_outside_span(self):
        rows = (IntegerVector([1, 0, 0]),)
        assert span_coordinates(rows, IntegerVector([0, 1, 0])) is None

    def test_inside_span(self):
        rows = (IntegerVector([1, 0, 0]), IntegerVector([0, 2, 0]))
        coords = span_coordinates(rows, IntegerVector([3, 1, 0]))
        assert coords == (3, Fraction(1, 2))

    def test_empty_rows(self):
        assert span_coordinates((), IntegerVector([0, 0])) == ()
        assert span_coordinates((), IntegerVector([1, 0])) is None


class TestHermite:
    def test_upper_triangular(self):
        h = hermite_normal_form(IntegerMatrix([[2, 1], [1, 3]]))
        assert h.entry(1, 0) == 0
        assert h.entry(0, 0) > 0 and h.entry(1, 1) > 0

    @given(matrices)
    def test_row_space_preserved(self, rows):
        m = IntegerMatrix(rows)
        if all(all(x == 0 for x in row) for row in rows):
            return
        h = hermite_normal_form(m)
        # every original row lies in the integer row span of the basis
        assert h.nrows == matrix_rank(m)
        for row in m.rows:
            coords = span_coordinates(h.rows, row)
            assert coords is not None
            assert all(c.denominator == 1 for c in map(Fraction, coords))
