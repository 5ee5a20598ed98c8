# tests/test_field_linalg.py
import itertools

import numpy as np
import pytest

from utils.errors import DimensionMismatch, Inadmissible, Inconsistent, Singular, ZeroInverse
from utils.field_linalg import (DiagonalMatrix, blocked_inverse, blocked_rank, blocked_to_dense, field_inv,
                                field_matrix, field_op, identity, mat_inverse, mat_rank, mat_solve, prime_field)

GF5 = prime_field(5)
GF65537 = prime_field(65537)


def brute_force_rank(matrix, q):
    """Rank from the size of the row space: q^rank distinct combinations."""
    rows = [np.asarray(row.view(np.ndarray), dtype=np.int64) for row in matrix]
    span = set()
    for coefficients in itertools.product(range(q), repeat=len(rows)):
        total = np.zeros(matrix.shape[1], dtype=np.int64)
        for c, row in zip(coefficients, rows):
            total = (total + c * row) % q
        span.add(tuple(total))
    return round(np.log(len(span)) / np.log(q))


# ---------------------------------------------------------
# Fields and elements
# ---------------------------------------------------------
def test_prime_field_rejects_composite_modulus():
    for q in (0, 1, 4, 65536):
        with pytest.raises(Inadmissible):
            prime_field(q)


def test_prime_field_is_cached():
    assert prime_field(5) is GF5


def test_field_op_examples():
    assert field_op('add', GF5(3), GF5(4)) == GF5(2)
    assert field_op('sub', GF5(1), GF5(3)) == GF5(3)
    assert field_op('mul', GF5(3), GF5(4)) == GF5(2)
    with pytest.raises(ValueError):
        field_op('div', GF5(1), GF5(1))


def test_field_inv_examples():
    assert field_inv(GF5(3)) == GF5(2)
    assert field_inv(GF65537(2)) * GF65537(2) == GF65537(1)


def test_zero_inverse_is_also_a_zero_division():
    with pytest.raises(ZeroInverse):
        field_inv(GF5(0))
    with pytest.raises(ZeroDivisionError):
        field_inv(GF5(0))


def test_field_matrix_reduces_entries():
    assert np.array_equal(field_matrix(GF5, [[7, -1]]), GF5([[2, 4]]))


def test_field_axioms_on_random_triples():
    rng = np.random.default_rng(2024)
    a, b, c = (GF65537(rng.integers(0, 65537, size=10_000)) for _ in range(3))
    assert np.array_equal(a + b, b + a)
    assert np.array_equal(a * b, b * a)
    assert np.array_equal((a + b) + c, a + (b + c))
    assert np.array_equal((a * b) * c, a * (b * c))
    assert np.array_equal(a * (b + c), a * b + a * c)
    nonzero = a[a != 0]
    assert np.all(nonzero * np.reciprocal(nonzero) == 1)


# ---------------------------------------------------------
# Dense linear algebra
# ---------------------------------------------------------
def test_rank_of_dependent_rows():
    assert mat_rank(field_matrix(GF5, [[1, 2], [2, 4]])) == 1
    assert mat_rank(identity(GF5, 3)) == 3


def test_rank_matches_brute_force_oracle():
    rng = np.random.default_rng(5)
    for _ in range(40):
        rows, cols = rng.integers(1, 5, size=2)
        matrix = GF5(rng.integers(0, 5, size=(rows, cols)))
        if rng.random() < 0.3 and rows > 1:
            matrix[-1] = matrix[0] * GF5(int(rng.integers(0, 5)))
        assert mat_rank(matrix) == brute_force_rank(matrix, 5)


def test_inverse_example():
    inverse = mat_inverse(field_matrix(GF5, [[1, 1], [2, 1]]))
    assert np.array_equal(inverse, GF5([[4, 1], [2, 4]]))


def test_inverse_errors():
    with pytest.raises(DimensionMismatch):
        mat_inverse(GF5.Zeros((2, 3)))
    with pytest.raises(Singular):
        mat_inverse(field_matrix(GF5, [[1, 2], [2, 4]]))


def test_solve_inconsistent_before_singular():
    a = field_matrix(GF5, [[1, 2], [2, 4]])
    with pytest.raises(Inconsistent):
        mat_solve(a, GF5([1, 0]))
    with pytest.raises(Singular):
        mat_solve(a, GF5([1, 2]))


def test_solve_overdetermined_full_column_rank():
    rng = np.random.default_rng(11)
    a = GF65537(rng.integers(0, 65537, size=(5, 3)))
    x = GF65537(rng.integers(0, 65537, size=(3, 2)))
    assert mat_rank(a) == 3
    assert np.array_equal(mat_solve(a, a @ x), x)
    assert np.array_equal(mat_solve(a, a @ x[:, 0]), x[:, 0])


def test_solve_rejects_wrong_rhs_length():
    with pytest.raises(DimensionMismatch):
        mat_solve(identity(GF5, 2), GF5([1, 2, 3]))


# ---------------------------------------------------------
# Diagonal and blocked matrices
# ---------------------------------------------------------
def test_diagonal_matrices_commute_and_match_dense():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = DiagonalMatrix(GF65537(rng.integers(1, 65537, size=6)))
        b = DiagonalMatrix(GF65537(rng.integers(1, 65537, size=6)))
        assert a @ b == b @ a
        assert np.array_equal((a @ b).to_dense(), a.to_dense() @ b.to_dense())
        v = GF65537(rng.integers(0, 65537, size=6))
        assert np.array_equal(a @ v, a.to_dense() @ v)


def test_diagonal_inverse_power_and_zero():
    a = DiagonalMatrix(GF5([1, 2, 3]))
    assert a @ a.inverse() == DiagonalMatrix.identity(GF5, 3)
    assert a.power(2) == a @ a
    assert not a.has_zero()
    with pytest.raises(Singular):
        DiagonalMatrix(GF5([1, 0])).inverse()
    with pytest.raises(DimensionMismatch):
        a @ DiagonalMatrix(GF5([1, 2]))


def test_blocked_rank_and_inverse_agree_with_dense():
    rng = np.random.default_rng(9)
    blocks = GF65537(rng.integers(0, 65537, size=(4, 3, 3)))
    dense = blocked_to_dense(blocks)
    assert blocked_rank(blocks) == mat_rank(dense) == 12
    inverse = blocked_to_dense(blocked_inverse(blocks))
    assert np.array_equal(dense @ inverse, identity(GF65537, 12))


def test_blocked_inverse_names_singular_coordinate():
    blocks = GF5.Ones((2, 2, 2))
    blocks[0] = GF5([[1, 0], [0, 1]])
    with pytest.raises(Singular, match="coordinate 1"):
        blocked_inverse(blocks)
    assert blocked_rank(blocks) == 3
