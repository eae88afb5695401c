"""
Column-inversion action on 0-1 matrices and the two-element-field lift of nonzero matrices
"""

import random
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence

from balanced.errors import PreconditionError, VerificationError
from balanced.models import InversionOutcome, OrbitMember, OrbitSummary, ZeroOneMatrix
from balanced.services.model_service import classify_weights
from balanced.services.weights_service import unificators
from balanced.utils.exact_utils import (
    F2Basis,
    F2Matrix,
    SolveStatus,
    WeightVector,
    rank_f2,
    rank_of_masks,
    satisfies_ones,
    solve_columns,
)
from balanced.utils.logging_utils import get_logger

logger = get_logger(__name__)


def compose(I: int, J: int) -> int:
    """Inversion equal to applying J then I: the symmetric difference of the masks"""
    return I ^ J


def apply_inversion(M: ZeroOneMatrix, I: int) -> ZeroOneMatrix:
    """Complement in [n] every column whose index bit is set in I"""
    if I < 0 or I >> M.m:
        raise ValueError(f"Inversion mask {I} does not fit {M.m} columns")
    full = (1 << M.n) - 1
    columns = tuple(full ^ col if (I >> j) & 1 else col for j, col in enumerate(M.columns))
    return ZeroOneMatrix(n=M.n, columns=columns)


def _nonzero_weights(M: ZeroOneMatrix) -> WeightVector:
    result = solve_columns(M.columns, M.n)
    if not result.found:
        raise PreconditionError(f"Matrix has no unique weight vector ({result.status.value})")
    if any(w == 0 for w in result.weights):
        raise PreconditionError("Matrix weight vector has a zero coordinate")
    return result.weights


def _inverted_weights(weights: WeightVector, I: int) -> Optional[WeightVector]:
    """λ' for z_I, or None when the inverted coordinates sum to one"""
    s = sum((w for j, w in enumerate(weights) if (I >> j) & 1), Fraction(0))
    if s == 1:
        return None
    scale = 1 - s
    return tuple(-w / scale if (I >> j) & 1 else w / scale for j, w in enumerate(weights))


def transformed_weights(M: ZeroOneMatrix, I: int) -> InversionOutcome:
    """
    Weight vector of z_I(M) from the weight vector of M

    With s the sum of λ over I, the new weights are -λ_i/(1-s) on I and λ_i/(1-s)
    off I. When s = 1 the inverted matrix loses rank.

    Raises:
        PreconditionError: M is not full rank with nowhere-zero weights
        VerificationError: the formula disagrees with exact substitution
    """
    weights = _nonzero_weights(M)
    inverted = apply_inversion(M, I)
    new_weights = _inverted_weights(weights, I)
    if new_weights is None:
        if rank_of_masks(inverted.columns, M.n) >= M.m:
            raise VerificationError(f"[Orbit] Inversion {I} with unit weight sum kept full rank")
        return InversionOutcome(kind="rank-collapse")
    if not satisfies_ones(inverted.columns, M.n, new_weights):
        raise VerificationError(f"[Orbit] Inverted weights fail substitution for I = {I}")
    return InversionOutcome(kind="weights", weights=new_weights)


def _classify(columns: Sequence[int], n: int) -> OrbitMember:
    result = solve_columns(columns, n)
    if result.status is SolveStatus.RANK_DEFICIENT:
        return OrbitMember(inversion=0, classification="rank-collapsed")
    if result.status is SolveStatus.INCONSISTENT:
        return OrbitMember(inversion=0, classification="inconsistent")
    weights = result.weights
    if all(w > 0 for w in weights):
        label = "positive"
    elif all(w != 0 for w in weights):
        label = "nonzero"
    else:
        label = "zero-weight"
    return OrbitMember(inversion=0, classification=label, weights=weights)


def orbit_summary(M: ZeroOneMatrix, full: bool = False) -> OrbitSummary:
    """
    Walk all 2^m inversions of M in Gray-code order and classify each image

    Every image is solved directly and compared with the sign-flip formula.
    formula_consistent records whether the nonzero orbit has 2^m - |U(λ)|
    members and, for m ≥ 2, whether exactly z_neg(M) and z_pos(M) are positive.

    Args:
        M: full-rank matrix with nowhere-zero weights
        full: include every member's classification in the summary

    Returns:
        OrbitSummary for the orbit of M
    """
    weights = _nonzero_weights(M)
    m, n = M.m, M.n
    full_mask = (1 << n) - 1
    columns: List[int] = list(M.columns)
    members = []
    size_nonzero = size_positive = 0
    positive_inversions = []

    for k in range(1 << m):
        I = k ^ (k >> 1)
        if k:
            flipped = (I ^ ((k - 1) ^ ((k - 1) >> 1))).bit_length() - 1
            columns[flipped] ^= full_mask
        member = _classify(columns, n).model_copy(update={"inversion": I})

        expected = _inverted_weights(weights, I)
        if expected is None:
            if member.classification != "rank-collapsed":
                raise VerificationError(f"[Orbit] Inversion {I} has unit weight sum but {member.classification} image")
        elif member.weights != expected:
            raise VerificationError(f"[Orbit] Sign-flip formula disagrees with direct solve at I = {I}")

        if member.classification in ("positive", "nonzero"):
            size_nonzero += 1
        if member.classification == "positive":
            size_positive += 1
            positive_inversions.append(I)
        if full:
            members.append(member)

    unificator_count = unificators(weights).size
    pos, neg = classify_weights(weights)
    consistent = size_nonzero == (1 << m) - unificator_count
    if m >= 2:
        consistent = consistent and sorted(positive_inversions) == sorted({pos, neg})
    if not consistent:
        logger.warning(f"[Orbit] Orbit of {M.to_payload()} departs from the orbit formulas")

    return OrbitSummary(
        base=M,
        weights=weights,
        size_nonzero=size_nonzero,
        size_positive=size_positive,
        unificator_count=unificator_count,
        positive_inversions=tuple(sorted(positive_inversions)),
        formula_consistent=consistent,
        members=tuple(members) if full else None,
    )


def _check_lift_input(n: int, A: F2Matrix) -> None:
    if A.nrows != n or A.cols != n:
        raise PreconditionError(f"Lift needs an {n}×{n} matrix, got {A.nrows}×{A.cols}")
    if any(not row & 1 for row in A.rows):
        raise PreconditionError("First column of the lifted matrix must be all ones")
    if rank_f2(A) != n:
        raise PreconditionError("Lift needs a matrix of full rank over the two-element field")


def f2_lift(n: int, A: F2Matrix) -> ZeroOneMatrix:
    """
    Nowhere-zero n×n 0-1 matrix from a full-rank F₂ matrix with an all-ones first column

    The ones column is dropped and a column equal to 1 plus the row sums mod 2 of
    the remaining columns is appended.
    """
    _check_lift_input(n, A)
    kept = A.columns()[1:]
    last = (1 << n) - 1
    for col in kept:
        last ^= col
    lifted = ZeroOneMatrix(n=n, columns=tuple(kept) + (last,))

    result = solve_columns(lifted.columns, n)
    if not result.found:
        raise VerificationError(f"[Orbit] Lift of {A!r} is not of full rational rank")
    if any(w == 0 for w in result.weights):
        raise VerificationError(f"[Orbit] Lift of {A!r} has a zero weight")
    return lifted


def count_f2_matrices(n: int, m: int) -> int:
    """Full-rank n×m F₂ matrices with a fixed nonzero first column: ∏_{k=1}^{m-1} (2^n - 2^k)"""
    if not 1 <= m <= n:
        raise ValueError(f"count_f2_matrices needs 1 ≤ m ≤ n, got n = {n}, m = {m}")
    total = 1
    for k in range(1, m):
        total *= (1 << n) - (1 << k)
    return total


def random_f2_full_rank(n: int, m: int, rng: random.Random) -> F2Matrix:
    """Rejection-sample a full-rank n×m F₂ matrix whose first column is all ones"""
    if not 1 <= m <= n:
        raise ValueError(f"random_f2_full_rank needs 1 ≤ m ≤ n, got n = {n}, m = {m}")
    ones = (1 << n) - 1
    basis = F2Basis()
    basis.add(ones)
    columns = [ones]
    while len(columns) < m:
        candidate = rng.randrange(1, 1 << n)
        if basis.add(candidate):
            columns.append(candidate)
    return F2Matrix.from_columns(columns, n)


def iter_f2_full_rank(n: int, m: int) -> Iterator[F2Matrix]:
    """Every full-rank n×m F₂ matrix with an all-ones first column, columns in ascending order per position"""
    if not 1 <= m <= n:
        raise ValueError(f"iter_f2_full_rank needs 1 ≤ m ≤ n, got n = {n}, m = {m}")
    ones = (1 << n) - 1

    def extend(columns: List[int], span: frozenset) -> Iterator[List[int]]:
        if len(columns) == m:
            yield columns
            return
        for candidate in range(1, 1 << n):
            if candidate in span:
                continue
            yield from extend(columns + [candidate], span | {s ^ candidate for s in span})

    for columns in extend([ones], frozenset({0, ones})):
        yield F2Matrix.from_columns(columns, n)
