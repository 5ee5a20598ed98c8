# utils/field_linalg.py
"""
Exact arithmetic in prime fields GF(q) and the dense linear algebra every
other module builds on.

Field elements and matrices are ``galois`` FieldArrays: the modulus travels
with the array class returned by :func:`prime_field`, so a FieldElement is a
0-d array and a FieldMatrix a 2-D array of the same class.
"""
import functools
import logging

import galois
import numpy as np

from utils.errors import DimensionMismatch, Inadmissible, Inconsistent, Singular, ZeroInverse

logger = logging.getLogger(__name__)

_FIELD_OPS = {
    'add': lambda a, b: a + b,
    'sub': lambda a, b: a - b,
    'mul': lambda a, b: a * b,
}


@functools.lru_cache(maxsize=None)
def prime_field(q):
    """
    Return the FieldArray class for GF(q).

    Args:
        q (int): Prime modulus

    Returns:
        type: galois FieldArray subclass for GF(q)
    """
    q = int(q)
    if q < 2 or not galois.is_prime(q):
        raise Inadmissible(f"Field modulus must be a prime >= 2, got {q}")
    return galois.GF(q)


def field_matrix(field, rows):
    """Build a FieldMatrix from nested integer rows, reducing every entry mod q."""
    values = np.mod(np.asarray(rows, dtype=np.int64), field.order)
    return field(values)


def field_op(op, a, b):
    """
    Add, subtract or multiply two elements of the same field.

    Args:
        op (str): One of 'add', 'sub', 'mul'
        a: FieldElement
        b: FieldElement

    Returns:
        FieldElement: The reduced result
    """
    try:
        return _FIELD_OPS[op](a, b)
    except KeyError:
        raise ValueError(f"Unknown field operation: {op}") from None


def field_inv(a):
    """Multiplicative inverse of a non-zero field element."""
    if int(a) == 0:
        raise ZeroInverse("Zero has no multiplicative inverse")
    return np.reciprocal(a)


def mat_rank(matrix):
    """Rank of a FieldMatrix by elimination over GF(q)."""
    if matrix.size == 0:
        return 0
    return int(np.linalg.matrix_rank(matrix))


def identity(field, dim):
    """Dense dim x dim identity over ``field``."""
    return field.Identity(dim)


def mat_inverse(matrix):
    """
    Invert a square FieldMatrix.

    Raises:
        DimensionMismatch: if the matrix is not square
        Singular: if its rank is below its dimension
    """
    rows, cols = matrix.shape
    if rows != cols:
        raise DimensionMismatch(f"Cannot invert a {rows}x{cols} matrix")
    rank = mat_rank(matrix)
    if rank < rows:
        raise Singular(f"Matrix of dimension {rows} has rank {rank}")
    return np.linalg.inv(matrix)


def mat_solve(a, y):
    """
    Solve A·x = y for the unique x, with A of full column rank (rows >= cols allowed).

    Args:
        a: FieldMatrix of shape (rows, cols)
        y: FieldArray of shape (rows,) or (rows, rhs)

    Returns:
        FieldArray: x of shape (cols,) or (cols, rhs)
    """
    rows, cols = a.shape
    vector = y.ndim == 1
    rhs = y.reshape(-1, 1) if vector else y
    if rhs.shape[0] != rows:
        raise DimensionMismatch(f"System has {rows} rows but right-hand side has {rhs.shape[0]}")

    augmented = np.concatenate((a, rhs), axis=1)
    rank_a = mat_rank(a)
    if mat_rank(augmented) > rank_a:
        raise Inconsistent("Right-hand side lies outside the column span of the system")
    if rank_a < cols:
        raise Singular(f"System with {cols} unknowns has rank {rank_a}")

    reduced = augmented.row_reduce(ncols=cols)
    solution = reduced[:cols, cols:]
    return solution.reshape(-1) if vector else solution


class DiagonalMatrix:
    """
    Compact dim x dim diagonal matrix over GF(q).

    Args:
        diag: 1-D FieldArray holding the main diagonal
    """

    __hash__ = None

    def __init__(self, diag):
        if diag.ndim != 1:
            raise DimensionMismatch("A diagonal must be one-dimensional")
        self.diag = diag

    @classmethod
    def identity(cls, field, dim):
        return cls(field.Ones(dim))

    @property
    def dim(self):
        return self.diag.shape[0]

    @property
    def field(self):
        return type(self.diag)

    def __matmul__(self, other):
        if isinstance(other, DiagonalMatrix):
            if other.dim != self.dim:
                raise DimensionMismatch(f"Cannot multiply diagonals of size {self.dim} and {other.dim}")
            return DiagonalMatrix(self.diag * other.diag)
        if other.shape[0] != self.dim:
            raise DimensionMismatch(f"Cannot apply a {self.dim}-diagonal to {other.shape[0]} rows")
        if other.ndim == 1:
            return self.diag * other
        return self.diag[:, np.newaxis] * other

    def __eq__(self, other):
        if not isinstance(other, DiagonalMatrix):
            return NotImplemented
        return self.field is other.field and np.array_equal(self.diag, other.diag)

    def __repr__(self):
        return f"DiagonalMatrix(dim={self.dim}, q={self.field.order})"

    def power(self, exponent):
        """Elementwise power of the diagonal; exponent 0 gives the identity."""
        return DiagonalMatrix(self.diag ** int(exponent))

    def inverse(self):
        if np.count_nonzero(self.diag.view(np.ndarray)) < self.dim:
            raise Singular("Diagonal matrix has a zero entry")
        return DiagonalMatrix(np.reciprocal(self.diag))

    def has_zero(self):
        return np.count_nonzero(self.diag.view(np.ndarray)) < self.dim

    def to_dense(self):
        """Widen to a dense FieldMatrix."""
        dense = self.field.Zeros((self.dim, self.dim))
        index = np.arange(self.dim)
        dense[index, index] = self.diag
        return dense


def blocked_rank(blocks):
    """
    Rank of a composite matrix whose blocks are all diagonal.

    ``blocks`` has shape (dim, rows, cols): entry [t, s, l] is the t-th diagonal
    entry of block (s, l). The dense matrix is permutation-equivalent to the
    direct sum of the per-coordinate rows x cols matrices, so its rank is the
    sum of their ranks.
    """
    return sum(mat_rank(blocks[t]) for t in range(blocks.shape[0]))


def blocked_inverse(blocks):
    """Invert a square blocked-diagonal composite matrix coordinate by coordinate."""
    dim, rows, cols = blocks.shape
    if rows != cols:
        raise DimensionMismatch(f"Cannot invert a {rows}x{cols} block composite")
    inverse = type(blocks).Zeros(blocks.shape)
    for t in range(dim):
        try:
            inverse[t] = mat_inverse(blocks[t])
        except Singular:
            raise Singular(f"Composite matrix is singular at coordinate {t}") from None
    return inverse


def blocked_to_dense(blocks):
    """Widen a (dim, rows, cols) blocked composite into its dense (rows*dim, cols*dim) form."""
    dim, rows, cols = blocks.shape
    dense = type(blocks).Zeros((rows * dim, cols * dim))
    index = np.arange(dim)
    for s in range(rows):
        for l in range(cols):
            dense[s * dim + index, l * dim + index] = blocks[:, s, l]
    return dense
