"""
Exact linear algebra over the rationals and over the two-element field
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

Rational = Fraction
RationalLike = Union[int, str, Fraction]
WeightVector = Tuple[Fraction, ...]


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an int, a Fraction or a "p/q" string; floats are rejected"""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"Inexact value {value!r} cannot be used as a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or "." in text or "e" in text.lower():
            raise ValueError(f"Invalid rational literal: {value!r}")
        return Fraction(text)
    raise TypeError(f"Unsupported rational value: {value!r}")


def format_rational(value: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1"""
    return str(Fraction(value))


def mask_vector(mask: int, dim: int) -> Tuple[int, ...]:
    """0-1 vector of length dim with entry i equal to bit i of mask"""
    return tuple((mask >> i) & 1 for i in range(dim))


def mask_members(mask: int) -> List[int]:
    """1-based members of a bit mask"""
    return [i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1]


def members_mask(members: Iterable[int]) -> int:
    """Bit mask for 1-based members"""
    mask = 0
    for member in members:
        if member < 1:
            raise ValueError(f"Members are 1-based, got {member}")
        mask |= 1 << (member - 1)
    return mask


class QMatrix:
    """Dense rational matrix, immutable"""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence[RationalLike]]):
        rows = tuple(tuple(parse_rational(x) for x in row) for row in entries)
        if rows and any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("QMatrix rows must have equal length")
        self.entries = rows

    @classmethod
    def from_columns(cls, columns: Sequence[int], n: int) -> "QMatrix":
        """0-1 matrix whose column j is the characteristic vector of columns[j]"""
        return cls([[(col >> i) & 1 for col in columns] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    def multiply(self, vector: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        if len(vector) != self.cols:
            raise ValueError(f"Vector length {len(vector)} does not match {self.cols} columns")
        return tuple(sum((a * x for a, x in zip(row, vector)), Fraction(0)) for row in self.entries)

    def to_payload(self) -> List[List[str]]:
        return [[format_rational(x) for x in row] for row in self.entries]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QMatrix) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"QMatrix({self.to_payload()})"


class F2Matrix:
    """Matrix over the two-element field with rows packed into integers (bit j = column j)"""

    __slots__ = ("rows", "cols")

    def __init__(self, rows: Sequence[int], cols: int):
        if any(row < 0 or row >> cols for row in rows):
            raise ValueError(f"F2Matrix rows must fit in {cols} bits")
        self.rows = tuple(rows)
        self.cols = cols

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "F2Matrix":
        """Build from a row-major list of 0/1 entries"""
        cols = len(bits[0]) if bits else 0
        packed = []
        for row in bits:
            if len(row) != cols or any(b not in (0, 1) for b in row):
                raise ValueError("F2Matrix entries must be 0/1 with equal row lengths")
            packed.append(sum(b << j for j, b in enumerate(row)))
        return cls(packed, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[int], n: int) -> "F2Matrix":
        """n-row matrix whose column j has bit i set iff row i is in columns[j]"""
        rows = [sum(((col >> i) & 1) << j for j, col in enumerate(columns)) for i in range(n)]
        return cls(rows, len(columns))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def columns(self) -> Tuple[int, ...]:
        """Columns as row-index bit masks"""
        return tuple(sum(((row >> j) & 1) << i for i, row in enumerate(self.rows)) for j in range(self.cols))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, F2Matrix) and self.rows == other.rows and self.cols == other.cols

    def __hash__(self) -> int:
        return hash((self.rows, self.cols))

    def __repr__(self) -> str:
        return f"F2Matrix(rows={self.rows}, cols={self.cols})"


class SolveStatus(str, Enum):
    UNIQUE = "unique"
    RANK_DEFICIENT = "rank-deficient"
    INCONSISTENT = "inconsistent"


class SolveResult(NamedTuple):
    status: SolveStatus
    weights: Optional[WeightVector] = None

    @property
    def found(self) -> bool:
        return self.status is SolveStatus.UNIQUE


def _primitive(values: List[int]) -> List[int]:
    g = math.gcd(*values)
    if g > 1:
        return [v // g for v in values]
    return values


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    """Scale each rational row by the lcm of its denominators"""
    scaled = []
    for row in rows:
        scale = math.lcm(*(Fraction(x).denominator for x in row)) if row else 1
        scaled.append([int(Fraction(x) * scale) for x in row])
    return scaled


def integer_rref(rows: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[int]]:
    """
    Fraction-free reduced row echelon form

    Every pivot column is zero outside its pivot row; rows stay integral and primitive.

    Returns:
        (reduced rows, pivot column indices in increasing order)
    """
    work = [list(r) for r in rows]
    if not work:
        return work, []
    ncols = len(work[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        pivot_row = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        p = work[r]
        pc = p[c]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = _primitive([pc * a - f * b for a, b in zip(work[i], p)])
        pivots.append(c)
        r += 1
    return work, pivots


def rank_q(M: QMatrix) -> int:
    """Rank over the rationals"""
    if M.rows == 0 or M.cols == 0:
        raise ValueError("rank_q requires a nonempty matrix")
    _, pivots = integer_rref(_integer_rows(M.entries))
    return len(pivots)


def rank_of_masks(masks: Sequence[int], dim: int) -> int:
    """Rational rank of 0-1 vectors given as bit masks of length dim"""
    basis = IncrementalBasis(dim)
    for mask in masks:
        extended = basis.add(mask_vector(mask, dim))
        if extended is not None:
            basis = extended
            if basis.rank == dim:
                break
    return basis.rank


def _solve_integer(rows: List[List[int]], cols: int) -> SolveResult:
    reduced, pivots = integer_rref(rows)
    if sum(1 for c in pivots if c < cols) < cols:
        return SolveResult(SolveStatus.RANK_DEFICIENT)
    if cols in pivots:
        return SolveResult(SolveStatus.INCONSISTENT)
    weights = tuple(Fraction(reduced[k][cols], reduced[k][c]) for k, c in enumerate(pivots))
    return SolveResult(SolveStatus.UNIQUE, weights)


def solve_unique(M: QMatrix, b: Optional[Sequence[RationalLike]] = None) -> SolveResult:
    """
    Solve M x = b exactly when the solution exists and is unique

    Args:
        M: coefficient matrix
        b: right-hand side, the all-ones vector when omitted

    Returns:
        SolveResult with the weights, or a rank-deficient / inconsistent reason
    """
    rhs = [Fraction(1)] * M.rows if b is None else [parse_rational(x) for x in b]
    if len(rhs) != M.rows:
        raise ValueError(f"Right-hand side has {len(rhs)} entries, expected {M.rows}")
    if M.cols == 0:
        return SolveResult(SolveStatus.RANK_DEFICIENT)
    augmented = _integer_rows([list(row) + [x] for row, x in zip(M.entries, rhs)])
    return _solve_integer(augmented, M.cols)


def solve_columns(columns: Sequence[int], n: int) -> SolveResult:
    """solve_unique for a 0-1 matrix given by column masks, right-hand side all ones"""
    m = len(columns)
    if m == 0 or m > n:
        return SolveResult(SolveStatus.RANK_DEFICIENT)
    rows = [[(col >> i) & 1 for col in columns] + [1] for i in range(n)]
    return _solve_integer(rows, m)


def kernel_vector(M: QMatrix) -> Optional[WeightVector]:
    """A nonzero d with M d = 0, or None when the columns are independent"""
    reduced, pivots = integer_rref(_integer_rows(M.entries))
    free = [c for c in range(M.cols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    d = [Fraction(0)] * M.cols
    d[f] = Fraction(1)
    for k, c in enumerate(pivots):
        d[c] = Fraction(-reduced[k][f], reduced[k][c])
    return tuple(d)


def rank_f2(M: F2Matrix) -> int:
    """Rank over the two-element field by XOR elimination on packed rows"""
    pivots: dict = {}
    for row in M.rows:
        while row:
            top = row.bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                break
            row ^= pivots[top]
    return len(pivots)


class F2Basis:
    """Incrementally grown XOR basis over bit-packed vectors"""

    __slots__ = ("_pivots",)

    def __init__(self):
        self._pivots: dict = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def reduce(self, vector: int) -> int:
        while vector:
            top = vector.bit_length() - 1
            if top not in self._pivots:
                return vector
            vector ^= self._pivots[top]
        return 0

    def add(self, vector: int) -> bool:
        """Insert vector; False when it already lies in the span"""
        reduced = self.reduce(vector)
        if not reduced:
            return False
        self._pivots[reduced.bit_length() - 1] = reduced
        return True


class IncrementalBasis:
    """
    Immutable echelon basis over the rationals, kept integral

    Each stored row is reduced against the rows before it, so reducing a vector
    in insertion order clears every pivot. The all-ones vector is carried reduced
    alongside; it lies in the span exactly when its residual is zero.
    """

    __slots__ = ("dim", "_rows", "_residual")

    def __init__(
        self, dim: int, rows: Tuple[Tuple[int, Tuple[int, ...]], ...] = (), residual: Optional[Tuple[int, ...]] = None
    ):
        self.dim = dim
        self._rows = rows
        self._residual = residual if residual is not None else (1,) * dim

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def spans_ones(self) -> bool:
        return not any(self._residual)

    def _reduce(self, vector: Sequence[int]) -> List[int]:
        v = list(vector)
        for pivot, row in self._rows:
            f = v[pivot]
            if f:
                g = row[pivot]
                v = [g * a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, vector: Sequence[int]) -> bool:
        return not any(self._reduce(vector))

    def add(self, vector: Sequence[int]) -> Optional["IncrementalBasis"]:
        """New basis extended by vector, or None when vector is dependent"""
        reduced = self._reduce(vector)
        pivot = next((i for i, x in enumerate(reduced) if x), None)
        if pivot is None:
            return None
        row = tuple(_primitive(reduced))
        residual = self._residual
        f = residual[pivot]
        if f:
            g = row[pivot]
            residual = tuple(_primitive([g * a - f * b for a, b in zip(residual, row)]))
        return IncrementalBasis(self.dim, self._rows + ((pivot, row),), residual)


def satisfies_ones(columns: Sequence[int], n: int, weights: Sequence[Fraction]) -> bool:
    """Exact check that the 0-1 matrix with these columns maps weights to the all-ones vector"""
    if len(columns) != len(weights):
        return False
    for i in range(n):
        total = Fraction(0)
        for col, w in zip(columns, weights):
            if (col >> i) & 1:
                total += w
        if total != 1:
            return False
    return True


def distinct_permutations(values: Sequence[Fraction]) -> int:
    """Number of distinct orderings of values: len! / product of repetition factorials"""
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    result = math.factorial(len(values))
    for c in counts.values():
        result //= math.factorial(c)
    return result


def solve_rows(rows: Sequence[int], m: int) -> SolveResult:
    """solve_unique for a 0-1 matrix given by row masks of length m, right-hand side all ones"""
    if not rows or m == 0:
        return SolveResult(SolveStatus.RANK_DEFICIENT)
    return _solve_integer([[(r >> j) & 1 for j in range(m)] + [1] for r in rows], m)


def subset_sums(vector: Sequence[Fraction]) -> List[Fraction]:
    """sums[mask] = sum of vector[j] over the bits j of mask"""
    sums = [Fraction(0)] * (1 << len(vector))
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + vector[low.bit_length() - 1]
    return sums
