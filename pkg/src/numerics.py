"""
Exact rational scalars, vectors and dense matrices

All arithmetic is carried out on fractions.Fraction; there is no tolerance
anywhere. Elimination always takes the first nonzero pivot in a column.
"""
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterator, List, Sequence, Tuple, Union

from .exceptions import DimensionMismatch, NonSquareMatrix, SingularMatrix

Rational = Fraction
Scalar = Union[int, Fraction, str]


def to_rational(value: Scalar) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a canonical Fraction"""
    if isinstance(value, bool):
        raise TypeError("booleans are not rational scalars")
    if isinstance(value, (_RationalABC, str)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class RatVector:
    """Immutable vector of exact rationals"""
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        entries = tuple(to_rational(v) for v in self.entries)
        if not entries:
            raise ValueError("RatVector needs at least one entry")
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def of(cls, *values: Scalar) -> 'RatVector':
        return cls(tuple(values))

    @classmethod
    def zeros(cls, length: int) -> 'RatVector':
        return cls((0,) * length)

    @classmethod
    def unit(cls, length: int, index: int) -> 'RatVector':
        return cls(tuple(1 if i == index else 0 for i in range(length)))

    @property
    def length(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.entries)

    def __getitem__(self, index: int) -> Fraction:
        return self.entries[index]

    def _check_same_length(self, other: 'RatVector', operation: str):
        if len(self) != len(other):
            raise DimensionMismatch(operation, (len(self),), (len(other),))

    def __add__(self, other: 'RatVector') -> 'RatVector':
        self._check_same_length(other, "vector add")
        return RatVector(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: 'RatVector') -> 'RatVector':
        self._check_same_length(other, "vector subtract")
        return RatVector(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> 'RatVector':
        return RatVector(tuple(-a for a in self))

    def scale(self, factor: Scalar) -> 'RatVector':
        factor = to_rational(factor)
        return RatVector(tuple(factor * a for a in self))

    def dot(self, other: 'RatVector') -> Fraction:
        self._check_same_length(other, "dot product")
        return sum((a * b for a, b in zip(self, other)), Fraction(0))

    def is_nonneg(self) -> bool:
        return all(a >= 0 for a in self)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self)

    def first_negative(self) -> int:
        """Index of the first negative entry, or -1"""
        for i, a in enumerate(self):
            if a < 0:
                return i
        return -1


@dataclass(frozen=True)
class RatMatrix:
    """Immutable dense row-major matrix of exact rationals"""
    rows: int
    cols: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"RatMatrix needs rows >= 1 and cols >= 1, got {self.rows}x{self.cols}")
        entries = tuple(to_rational(v) for v in self.entries)
        if len(entries) != self.rows * self.cols:
            raise ValueError(
                f"RatMatrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Scalar]]) -> 'RatMatrix':
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("RatMatrix needs at least one row and one column")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged rows")
        return cls(len(rows), width, tuple(v for r in rows for v in r))

    @classmethod
    def identity(cls, n: int) -> 'RatMatrix':
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'RatMatrix':
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def diagonal(cls, values: Sequence[Scalar]) -> 'RatMatrix':
        n = len(values)
        return cls(n, n, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def column(cls, v: RatVector) -> 'RatMatrix':
        return cls(len(v), 1, v.entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: Tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Tuple[Fraction, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.entries)

    def __matmul__(self, other):
        if isinstance(other, RatVector):
            return mat_vec(self, other)
        return mat_mul(self, other)

    def __add__(self, other: 'RatMatrix') -> 'RatMatrix':
        if self.shape != other.shape:
            raise DimensionMismatch("matrix add", self.shape, other.shape)
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'RatMatrix') -> 'RatMatrix':
        if self.shape != other.shape:
            raise DimensionMismatch("matrix subtract", self.shape, other.shape)
        return RatMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, factor: Scalar) -> 'RatMatrix':
        factor = to_rational(factor)
        return RatMatrix(self.rows, self.cols, tuple(factor * a for a in self.entries))

    def transpose(self) -> 'RatMatrix':
        return transpose(self)


def mat_mul(lhs: RatMatrix, rhs: RatMatrix) -> RatMatrix:
    """Exact matrix product"""
    if lhs.cols != rhs.rows:
        raise DimensionMismatch("mat_mul", lhs.shape, rhs.shape)
    rhs_cols = [rhs.col(j) for j in range(rhs.cols)]
    entries = []
    for i in range(lhs.rows):
        row = lhs.row(i)
        for col in rhs_cols:
            entries.append(sum((a * b for a, b in zip(row, col)), Fraction(0)))
    return RatMatrix(lhs.rows, rhs.cols, tuple(entries))


def mat_vec(m: RatMatrix, v: RatVector) -> RatVector:
    if m.cols != len(v):
        raise DimensionMismatch("mat_vec", m.shape, (len(v),))
    return RatVector(tuple(
        sum((a * b for a, b in zip(m.row(i), v)), Fraction(0)) for i in range(m.rows)
    ))


def transpose(m: RatMatrix) -> RatMatrix:
    return RatMatrix(m.cols, m.rows, tuple(v for j in range(m.cols) for v in m.col(j)))


def determinant(m: RatMatrix) -> Fraction:
    """Exact determinant by pivoted elimination"""
    if not m.is_square():
        raise NonSquareMatrix("determinant", m.shape)
    a = m.to_rows()
    n = m.rows
    det = Fraction(1)
    for col in range(n):
        pivot = _first_nonzero(a, col, col)
        if pivot < 0:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col]
            if f:
                f = f / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def inverse(m: RatMatrix) -> RatMatrix:
    """Exact inverse by Gauss-Jordan elimination"""
    if not m.is_square():
        raise NonSquareMatrix("inverse", m.shape)
    n = m.rows
    aug = [row + [Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i, row in enumerate(m.to_rows())]
    _gauss_jordan(aug, n, "inverse")
    return RatMatrix(n, n, tuple(v for row in aug for v in row[n:]))


def solve_linear(m: RatMatrix, rhs: RatVector) -> RatVector:
    """Exact solution x of m·x = rhs for square nonsingular m"""
    if not m.is_square():
        raise NonSquareMatrix("solve_linear", m.shape)
    if len(rhs) != m.rows:
        raise DimensionMismatch("solve_linear", m.shape, (len(rhs),))
    aug = [row + [b] for row, b in zip(m.to_rows(), rhs)]
    _gauss_jordan(aug, m.rows, "solve_linear")
    return RatVector(tuple(row[-1] for row in aug))


def rref(rows: Sequence[Sequence[Scalar]], ncols: int) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form of a (possibly empty) list of rows and its pivot columns"""
    a = [[to_rational(v) for v in r] for r in rows]
    for r in a:
        if len(r) != ncols:
            raise DimensionMismatch("rref", (len(a), len(r)), (len(a), ncols))
    pivots = []
    lead = 0
    for col in range(ncols):
        pivot = _first_nonzero(a, col, lead)
        if pivot < 0:
            continue
        a[lead], a[pivot] = a[pivot], a[lead]
        p = a[lead][col]
        a[lead] = [x / p for x in a[lead]]
        for r in range(len(a)):
            if r != lead and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[lead])]
        pivots.append(col)
        lead += 1
        if lead == len(a):
            break
    return a[:lead], pivots


def rank(m: RatMatrix) -> int:
    return len(rref(m.to_rows(), m.cols)[1])


def null_space(rows: Sequence[Sequence[Scalar]], n: int) -> List[RatVector]:
    """Basis of {x : rows·x = 0}; the identity basis when rows is empty"""
    reduced, pivots = rref(rows, n)
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -reduced[r][f]
        basis.append(RatVector(tuple(x)))
    return basis


def _first_nonzero(a: List[List[Fraction]], col: int, start: int) -> int:
    for r in range(start, len(a)):
        if a[r][col] != 0:
            return r
    return -1


def _gauss_jordan(aug: List[List[Fraction]], n: int, operation: str):
    for col in range(n):
        pivot = _first_nonzero(aug, col, col)
        if pivot < 0:
            raise SingularMatrix(f"{operation}: matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
