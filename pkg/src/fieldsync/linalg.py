from __future__ import annotations

import dataclasses
import functools
import logging
from collections import abc as collections_abc
from typing import Any, Final, NamedTuple

import numpy as np
import numpy.typing as npt

from fieldsync import fp_core

logger = logging.getLogger(__name__)

IntArray = npt.NDArray[np.int64]

_INT64_LIMIT: Final = 2**63
DEFAULT_PERIOD_LIMIT: Final = 100_000


def matmul_mod(a: IntArray, b: IntArray, p: int) -> IntArray:
    """
    Product of two residue arrays reduced mod p. Falls back to Python integers when
    the accumulated dot products could overflow int64.
    """
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 < _INT64_LIMIT:
        return np.asarray((a @ b) % p, dtype=np.int64)
    product = (a.astype(object) @ b.astype(object)) % p
    return np.asarray(product, dtype=np.int64)


class Matrix:
    """
    Dense immutable matrix over a prime field, backed by an int64 array of canonical
    residues. Empty shapes (0 x k, k x 0) are legal.
    """

    __slots__ = ("_array", "field")

    def __init__(
        self,
        field: fp_core.PrimeField,
        entries: Any,
        shape: tuple[int, int] | None = None,
    ) -> None:
        array = np.array(entries, dtype=np.int64)
        if shape is not None:
            if array.size != shape[0] * shape[1]:
                raise DimensionMismatchError(
                    f"{array.size} entries cannot fill a {shape[0]}x{shape[1]} matrix"
                )
            array = array.reshape(shape)
        if array.ndim != 2:  # noqa: PLR2004
            raise DimensionMismatchError(
                f"Matrix entries must be two-dimensional, got shape {array.shape}"
            )
        array %= field.p
        array.flags.writeable = False

        self.field = field
        self._array: IntArray = array

    @classmethod
    def zeros(cls, field: fp_core.PrimeField, rows: int, cols: int) -> Matrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: fp_core.PrimeField, size: int) -> Matrix:
        return cls(field, np.eye(size, dtype=np.int64))

    @classmethod
    def column_vector(
        cls, field: fp_core.PrimeField, values: collections_abc.Sequence[int]
    ) -> Matrix:
        return cls(field, list(values), shape=(len(values), 1))

    @classmethod
    def from_columns(
        cls,
        field: fp_core.PrimeField,
        ambient_dim: int,
        columns: collections_abc.Iterable[Matrix],
    ) -> Matrix:
        arrays = [column.array.reshape(ambient_dim, 1) for column in columns]
        if not arrays:
            return cls.zeros(field, ambient_dim, 0)
        return cls(field, np.hstack(arrays))

    def __repr__(self) -> str:
        return f"{type(self).__qualname__}(p={self.field.p}, {self.to_lists()!r})"

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_lists())

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Matrix):
            return (
                self.field == other.field
                and self.shape == other.shape
                and bool(np.array_equal(self._array, other._array))
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self._array.tobytes()))

    @property
    def array(self) -> IntArray:
        """Read-only view of the residues."""
        return self._array

    @property
    def rows(self) -> int:
        return int(self._array.shape[0])

    @property
    def cols(self) -> int:
        return int(self._array.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> Matrix:  # noqa: N802
        return Matrix(self.field, self._array.T)

    def entry(self, row: int, col: int) -> fp_core.FieldElement:
        return self.field(int(self._array[row, col]))

    def block(
        self, row_start: int, row_stop: int, col_start: int, col_stop: int
    ) -> Matrix:
        return Matrix(self.field, self._array[row_start:row_stop, col_start:col_stop])

    def column(self, index: int) -> Matrix:
        return self.block(0, self.rows, index, index + 1)

    def columns(self) -> list[Matrix]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self._array]

    def flat(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._array.reshape(-1))

    def is_zero(self) -> bool:
        return not self._array.any()

    def _coerce(self, other: Any) -> Matrix:
        if not isinstance(other, Matrix):
            raise TypeError(f"Expected a matrix, got {type(other).__qualname__}")
        self.field.require_same(other.field)
        return other

    def __add__(self, other: Matrix) -> Matrix:
        other = self._coerce(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Cannot add {self.shape} and {other.shape}")
        return Matrix(self.field, self._array + other._array)

    def __sub__(self, other: Matrix) -> Matrix:
        other = self._coerce(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(
                f"Cannot subtract {other.shape} from {self.shape}"
            )
        return Matrix(self.field, self._array - other._array)

    def __neg__(self) -> Matrix:
        return Matrix(self.field, -self._array)

    def __matmul__(self, other: Matrix) -> Matrix:
        other = self._coerce(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"Cannot multiply {self.shape} by {other.shape}"
            )
        return Matrix(self.field, matmul_mod(self._array, other._array, self.field.p))

    def scale(self, factor: int | fp_core.FieldElement) -> Matrix:
        return Matrix(self.field, self._array * self.field.reduce(int(factor)))

    def __pow__(self, exponent: int) -> Matrix:
        if not self.is_square:
            raise DimensionMismatchError(
                f"Cannot raise a {self.shape} matrix to a power"
            )
        if exponent < 0:
            raise ValueError("Matrix powers must be non-negative")
        result = Matrix.identity(self.field, self.rows)
        base = self
        while exponent:
            if exponent & 1:
                result = result @ base
            base = base @ base
            exponent >>= 1
        return result


def hstack(
    field: fp_core.PrimeField, rows: int, matrices: collections_abc.Sequence[Matrix]
) -> Matrix:
    if not matrices:
        return Matrix.zeros(field, rows, 0)
    return Matrix(field, np.hstack([m.array for m in matrices]))


def vstack(
    field: fp_core.PrimeField, cols: int, matrices: collections_abc.Sequence[Matrix]
) -> Matrix:
    if not matrices:
        return Matrix.zeros(field, 0, cols)
    return Matrix(field, np.vstack([m.array for m in matrices]))


class RowEchelonForm(NamedTuple):
    matrix: Matrix
    pivots: tuple[int, ...]
    rank: int


def _rref_array(array: IntArray, p: int) -> tuple[IntArray, list[int]]:
    reduced = array.copy() % p
    rows, cols = reduced.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        candidates = np.flatnonzero(reduced[row:, col])
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            reduced[[row, pivot]] = reduced[[pivot, row]]
        reduced[row] = reduced[row] * pow(int(reduced[row, col]), -1, p) % p
        factors = reduced[:, col].copy()
        factors[row] = 0
        reduced = (reduced - np.outer(factors, reduced[row])) % p
        pivots.append(col)
        row += 1
    return reduced, pivots


def rref(matrix: Matrix) -> RowEchelonForm:
    """Reduced row echelon form by Gauss-Jordan elimination over F_p."""
    reduced, pivots = _rref_array(matrix.array, matrix.field.p)
    return RowEchelonForm(Matrix(matrix.field, reduced), tuple(pivots), len(pivots))


def rank(matrix: Matrix) -> int:
    return rref(matrix).rank


@dataclasses.dataclass(frozen=True)
class SubspaceBasis:
    """
    A subspace of F_p^ambient_dim, stored as the columns of `vectors` in canonical
    form: the transpose of the nonzero rows of the RREF of the spanning set's
    transpose. Equal subspaces therefore compare equal.
    """

    vectors: Matrix

    @classmethod
    def spanned_by(cls, spanning: Matrix) -> SubspaceBasis:
        """Canonical basis of the column space of the given matrix."""
        reduced, pivots = _rref_array(spanning.array.T, spanning.field.p)
        canonical = reduced[: len(pivots)].T
        shape = (spanning.rows, len(pivots))
        return cls(Matrix(spanning.field, canonical, shape=shape))

    @classmethod
    def full(cls, field: fp_core.PrimeField, ambient_dim: int) -> SubspaceBasis:
        return cls(Matrix.identity(field, ambient_dim))

    @property
    def field(self) -> fp_core.PrimeField:
        return self.vectors.field

    @property
    def ambient_dim(self) -> int:
        return self.vectors.rows

    @property
    def dim(self) -> int:
        return self.vectors.cols

    def __iter__(self) -> collections_abc.Iterator[Matrix]:
        return iter(self.vectors.columns())

    def __len__(self) -> int:
        return self.dim

    def contains(self, vector: Matrix) -> bool:
        """Membership by rank: appending the vector must not raise the rank."""
        extended = hstack(self.field, self.ambient_dim, [self.vectors, vector])
        return rank(extended) == self.dim

    def contains_subspace(self, other: SubspaceBasis) -> bool:
        return all(self.contains(v) for v in other)


def kernel_basis(matrix: Matrix) -> SubspaceBasis:
    """Canonical basis of {x : Ax = 0}."""
    field = matrix.field
    reduced, pivots, _ = rref(matrix)
    free_columns = [j for j in range(matrix.cols) if j not in pivots]

    vectors = []
    for free in free_columns:
        vector = np.zeros(matrix.cols, dtype=np.int64)
        vector[free] = 1
        for row, pivot in enumerate(pivots):
            vector[pivot] = -int(reduced.array[row, free])
        vectors.append(Matrix(field, vector, shape=(matrix.cols, 1)))

    return SubspaceBasis.spanned_by(Matrix.from_columns(field, matrix.cols, vectors))


def image_basis(matrix: Matrix) -> SubspaceBasis:
    """Canonical basis of the column space."""
    return SubspaceBasis.spanned_by(matrix)


def solve_right(basis: Matrix, target: Matrix) -> Matrix:
    """
    Solves basis @ X = target for X, where basis has full column rank.

    Raises:
        InconsistentSystemError: Some column of target lies outside span(basis).
    """
    basis.field.require_same(target.field)
    if basis.rows != target.rows:
        raise DimensionMismatchError(
            f"Cannot solve {basis.shape} @ X = {target.shape}"
        )
    d = basis.cols
    augmented = hstack(basis.field, basis.rows, [basis, target])
    reduced, pivots, _ = rref(augmented)
    if pivots[:d] != tuple(range(d)):
        raise ValueError("Basis matrix does not have full column rank")
    if len(pivots) > d:
        raise InconsistentSystemError(
            f"Target column {pivots[d] - d} lies outside the column space"
        )
    return reduced.block(0, d, d, augmented.cols)


def inverse(matrix: Matrix) -> Matrix:
    if not matrix.is_square:
        raise DimensionMismatchError(f"Cannot invert a {matrix.shape} matrix")
    size = matrix.rows
    augmented = hstack(
        matrix.field, size, [matrix, Matrix.identity(matrix.field, size)]
    )
    reduced, pivots, _ = rref(augmented)
    if pivots[:size] != tuple(range(size)) or len(pivots) != size:
        raise SingularMatrixError("Matrix is singular")
    return reduced.block(0, size, size, 2 * size)


def extend_to_full_basis(basis: SubspaceBasis | Matrix) -> Matrix:
    """
    Completes linearly independent columns to an invertible matrix. The given columns
    come first, followed by unit vectors e_1, e_2, ... kept in index order whenever
    they raise the rank.
    """
    columns = basis.vectors if isinstance(basis, SubspaceBasis) else basis
    field = columns.field
    size = columns.rows
    if rank(columns) != columns.cols:
        raise ValueError("Basis vectors are not linearly independent")

    kept = [columns]
    current_rank = columns.cols
    identity = Matrix.identity(field, size)
    for j in range(size):
        if current_rank == size:
            break
        candidate = hstack(field, size, [*kept, identity.column(j)])
        if rank(candidate) > current_rank:
            kept.append(identity.column(j))
            current_rank += 1
    return hstack(field, size, kept)


def _require_square(matrix: Matrix) -> None:
    if not matrix.is_square:
        raise DimensionMismatchError(f"Expected a square matrix, got {matrix.shape}")


def hessenberg_form(matrix: Matrix) -> Matrix:
    """Upper Hessenberg matrix similar to the input, by pivoted elimination."""
    _require_square(matrix)
    p = matrix.field.p
    h = matrix.array.copy()
    size = h.shape[0]
    for j in range(size - 2):
        candidates = np.flatnonzero(h[j + 1 :, j])
        if candidates.size == 0:
            continue
        i = j + 1 + int(candidates[0])
        if i != j + 1:
            h[[i, j + 1]] = h[[j + 1, i]]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        pivot_inverse = pow(int(h[j + 1, j]), -1, p)
        for k in range(j + 2, size):
            u = int(h[k, j]) * pivot_inverse % p
            if u == 0:
                continue
            # Row k -= u * row j+1, then column j+1 += u * column k keeps similarity
            h[k] = (h[k] - u * h[j + 1]) % p
            h[:, j + 1] = (h[:, j + 1] + u * h[:, k]) % p
    return Matrix(matrix.field, h)


def char_poly(matrix: Matrix) -> fp_core.Polynomial:
    """Characteristic polynomial det(λI - A), monic of degree rows(A)."""
    field = matrix.field
    p = field.p
    h = hessenberg_form(matrix).array
    size = h.shape[0]

    partial = [fp_core.Polynomial.one(field)]
    for m in range(1, size + 1):
        current = fp_core.Polynomial(field, [-int(h[m - 1, m - 1]), 1]) * partial[m - 1]
        subdiagonal_product = 1
        for i in range(1, m):
            subdiagonal_product = subdiagonal_product * int(h[m - i, m - i - 1]) % p
            if subdiagonal_product == 0:
                break
            coefficient = subdiagonal_product * int(h[m - i - 1, m - 1]) % p
            current = current - partial[m - i - 1] * field(coefficient)
        partial.append(current)
    return partial[size]


def _local_annihilator(matrix: Matrix, start: Matrix) -> fp_core.Polynomial:
    """Monic polynomial from the first linear dependence in the Krylov sequence."""
    field = matrix.field
    krylov = [start]
    while True:
        candidate = matrix @ krylov[-1]
        spanning = Matrix.from_columns(field, matrix.rows, krylov)
        try:
            coefficients = solve_right(spanning, candidate)
        except InconsistentSystemError:
            krylov.append(candidate)
            continue
        return fp_core.Polynomial.monomial(field, len(krylov)) - fp_core.Polynomial(
            field, coefficients.flat()
        )


def min_poly(matrix: Matrix) -> fp_core.Polynomial:
    """Minimal polynomial as the lcm of the local annihilators of the unit vectors."""
    _require_square(matrix)
    identity = Matrix.identity(matrix.field, matrix.rows)
    return functools.reduce(
        fp_core.poly_lcm,
        (_local_annihilator(matrix, e) for e in identity.columns()),
        fp_core.Polynomial.one(matrix.field),
    )


def evaluate_polynomial(polynomial: fp_core.Polynomial, matrix: Matrix) -> Matrix:
    """Substitutes a square matrix into a polynomial by Horner's rule."""
    _require_square(matrix)
    polynomial.field.require_same(matrix.field)
    identity = Matrix.identity(matrix.field, matrix.rows)
    result = Matrix.zeros(matrix.field, matrix.rows, matrix.rows)
    for coefficient in reversed(polynomial.coeffs):
        result = result @ matrix + identity.scale(coefficient)
    return result


def is_nilpotent(matrix: Matrix) -> bool:
    """
    True iff char_poly(A) = λ^r. Also checks A^r = 0 and insists both agree. The 0x0
    matrix is nilpotent.
    """
    _require_square(matrix)
    size = matrix.rows
    by_char_poly = char_poly(matrix) == fp_core.Polynomial.monomial(matrix.field, size)
    by_power = (matrix**size).is_zero()
    if by_char_poly != by_power:
        raise ConsistencyViolationError(
            f"Nilpotency tests disagree: char_poly={by_char_poly}, power={by_power}"
        )
    return by_char_poly


def converges_to_zero(matrix: Matrix) -> bool:
    """
    True iff every trajectory of w(t+1) = Mw(t) reaches 0. By linearity it is enough
    that every unit vector is annihilated within `rows` steps.
    """
    _require_square(matrix)
    states = Matrix.identity(matrix.field, matrix.rows)
    for _ in range(matrix.rows):
        states = matrix @ states
    return states.is_zero()


def has_fixed_point_form(polynomial: fp_core.Polynomial) -> bool:
    """True iff the monic polynomial is λ^s (λ - 1)^e with e in {0, 1}."""
    _, cofactor = fp_core.split_nilpotent_part(polynomial)
    field = polynomial.field
    return cofactor in (
        fp_core.Polynomial.one(field),
        fp_core.Polynomial.from_roots(field, [1]),
    )


def has_fixed_point_dynamics(matrix: Matrix) -> bool:
    """True iff every trajectory of w(t+1) = Mw(t) terminates at a fixed point."""
    return has_fixed_point_form(min_poly(matrix))


def terminal_period(matrix: Matrix, limit: int) -> int | None:
    """
    Smallest k >= 1 with M^(r+k) = M^r, i.e. the lcm of all cycle lengths of
    w(t+1) = Mw(t). Returns None when no period up to `limit` is found.
    """
    _require_square(matrix)
    settled = matrix**matrix.rows
    current = settled @ matrix
    for k in range(1, limit + 1):
        if current == settled:
            return k
        current = current @ matrix
    logger.debug("No terminal period found within %d steps", limit)
    return None


class DimensionMismatchError(Exception):
    pass


class InconsistentSystemError(Exception):
    pass


class SingularMatrixError(ValueError):
    pass


class ConsistencyViolationError(Exception):
    """An internal invariant failed to hold. Always a bug, never bad input."""
