"""
Balancedness predicates, minimality certificates and the definition-based oracle
"""

from fractions import Fraction
from typing import Optional, Sequence, Tuple

from balanced.config import config
from balanced.errors import SizeLimitError, VerificationError
from balanced.models import BalanceCertificate, BalanceKind, Collection, WeightClassification, ZeroOneMatrix
from balanced.utils.exact_utils import QMatrix, SolveStatus, WeightVector, kernel_vector, solve_columns
from balanced.utils.logging_utils import get_logger
from balanced.utils.lp_utils import LPStatus, solve_lp

logger = get_logger(__name__)


def classify_weights(weights: Sequence[Fraction]) -> Tuple[int, int]:
    """(pos, neg) supports of a weight vector as index bit masks"""
    pos = sum(1 << j for j, w in enumerate(weights) if w > 0)
    neg = sum(1 << j for j, w in enumerate(weights) if w < 0)
    return pos, neg


def matrix_classification(M: ZeroOneMatrix) -> WeightClassification:
    """Solve M λ = 1 and report supports of the unique solution when there is one"""
    result = solve_columns(M.columns, M.n)
    if not result.found:
        return WeightClassification(status=result.status.value)
    pos, neg = classify_weights(result.weights)
    return WeightClassification(status="unique", weights=result.weights, pos_support=pos, neg_support=neg)


def is_weakly_balanced(c: Collection) -> Tuple[bool, Optional[WeightVector]]:
    """
    Decide whether some λ ≥ 0 satisfies M(c) λ = 1

    Returns:
        (decision, one feasible λ when the decision is true)
    """
    rows = QMatrix.from_columns(c.sets, c.n).entries
    result = solve_lp([0] * c.size, rows, [1] * c.n)
    if result.status is LPStatus.INFEASIBLE:
        return False, None
    return True, result.x


def balanced_weights(c: Collection) -> Optional[WeightVector]:
    """A strictly positive λ with M(c) λ = 1, or None when c is not balanced"""
    m, n = c.size, c.n
    # variables: λ_1..λ_m, t, s_1..s_m, w ; maximize t with λ_j - t - s_j = 0 and t + w = 1
    width = 2 * m + 2
    A = []
    b = []
    for i in range(n):
        row = [0] * width
        for j, mask in enumerate(c.sets):
            if (mask >> i) & 1:
                row[j] = 1
        A.append(row)
        b.append(1)
    for j in range(m):
        row = [0] * width
        row[j] = 1
        row[m] = -1
        row[m + 1 + j] = -1
        A.append(row)
        b.append(0)
    row = [0] * width
    row[m] = 1
    row[-1] = 1
    A.append(row)
    b.append(1)
    cost = [0] * width
    cost[m] = -1

    result = solve_lp(cost, A, b)
    if result.status is not LPStatus.OPTIMAL or result.x[m] <= 0:
        return None
    return result.x[:m]


def is_balanced(c: Collection) -> bool:
    """Decide whether some strictly positive λ satisfies M(c) λ = 1"""
    return balanced_weights(c) is not None


def _interpolation_witness(c: Collection, weights: WeightVector) -> Collection:
    """
    Proper balanced subcollection of a balanced, rank-deficient collection

    Moves from the positive solution along a kernel direction until the first
    coordinate reaches zero; the support of the endpoint is balanced.
    """
    d = kernel_vector(QMatrix.from_columns(c.sets, c.n))
    if d is None:
        raise VerificationError(f"[Model] Expected a rank-deficient matrix for {c.key()}")
    if not any(x > 0 for x in d):
        d = tuple(-x for x in d)
    t = min(w / x for w, x in zip(weights, d) if x > 0)
    endpoint = [w - t * x for w, x in zip(weights, d)]
    selector = sum(1 << j for j, w in enumerate(endpoint) if w > 0)
    return c.subcollection(selector)


def minimality_certificate(c: Collection) -> BalanceCertificate:
    """Classify c as not weakly balanced, weakly balanced, balanced, or minimal balanced"""
    result = solve_columns(c.sets, c.n)

    if result.status is SolveStatus.UNIQUE:
        if all(w > 0 for w in result.weights):
            return BalanceCertificate(kind=BalanceKind.MINIMAL_BALANCED, collection=c, weights=result.weights)
        if all(w >= 0 for w in result.weights):
            return BalanceCertificate(kind=BalanceKind.WEAKLY_BALANCED, collection=c, weights=result.weights)
        return BalanceCertificate(kind=BalanceKind.NOT_WEAKLY_BALANCED, collection=c)

    if result.status is SolveStatus.INCONSISTENT:
        return BalanceCertificate(kind=BalanceKind.NOT_WEAKLY_BALANCED, collection=c)

    positive = balanced_weights(c)
    if positive is not None:
        witness = _interpolation_witness(c, positive)
        logger.debug(f"[Model] {c.key()} is balanced but not minimal, witness {witness.key()}")
        return BalanceCertificate(kind=BalanceKind.BALANCED, collection=c, weights=positive, witness=witness)

    weak, weights = is_weakly_balanced(c)
    if weak:
        return BalanceCertificate(kind=BalanceKind.WEAKLY_BALANCED, collection=c, weights=weights)
    return BalanceCertificate(kind=BalanceKind.NOT_WEAKLY_BALANCED, collection=c)


def definition_minimality_oracle(c: Collection) -> bool:
    """Minimality straight from the definition: balanced, and no proper nonempty subcollection balanced"""
    if c.size > config.MAX_DEFINITION_ORACLE_SIZE:
        raise SizeLimitError(f"Definition oracle supports at most {config.MAX_DEFINITION_ORACLE_SIZE} members, got {c.size}")
    if not c.covers_all() or not is_balanced(c):
        return False
    full = (1 << c.size) - 1
    for selector in range(1, full):
        sub = c.subcollection(selector)
        # an uncovered player rules out balancedness
        if sub.covers_all() and is_balanced(sub):
            return False
    return True
