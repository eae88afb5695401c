"""
Core nonemptiness of transferable-utility games: the balanced-collection criterion and an exact LP oracle
"""

import random
from fractions import Fraction
from typing import List, Optional, Tuple

from balanced.config import config
from balanced.errors import PreconditionError, SizeLimitError, VerificationError
from balanced.models import Collection, CoreReport, EnumerationResult, MinimalCollection, TUGame
from balanced.utils.exact_utils import RationalLike, WeightVector, parse_rational
from balanced.utils.logging_utils import get_logger
from balanced.utils.lp_utils import LPStatus, solve_lp

logger = get_logger(__name__)

GAME_KINDS = ("uniform", "superadditive")


def _allocation_holds(g: TUGame, x: WeightVector) -> bool:
    if sum(x) != g.grand_worth:
        return False
    for mask in range(1, 1 << g.n):
        if sum((x[i] for i in range(g.n) if (mask >> i) & 1), Fraction(0)) < g.worth(mask):
            return False
    return True


def _weighted_worth(g: TUGame, item: MinimalCollection) -> Fraction:
    return sum((w * g.worth(s) for s, w in zip(item.collection.sets, item.weights)), Fraction(0))


def core_nonempty_bondareva(g: TUGame, mbcs: EnumerationResult) -> CoreReport:
    """
    Core test through minimal balanced collections

    The core is nonempty iff Σ λ_S v(S) ≤ v([n]) for every minimal balanced
    collection. The first violated collection in canonical order is returned;
    a nonempty core carries an allocation from the LP oracle.

    Raises:
        PreconditionError: the enumeration is incomplete or for another n
    """
    if mbcs.n != g.n:
        raise PreconditionError(f"Collections are for n = {mbcs.n}, game has n = {g.n}")
    if not mbcs.complete:
        raise PreconditionError("Core test needs a complete enumeration")

    tightest: Optional[Fraction] = None
    for item in mbcs.items:
        slack = _weighted_worth(g, item) - g.grand_worth
        if slack > 0:
            logger.debug(f"[Game] Violated by {item.collection.key()} with slack {slack}")
            return CoreReport(nonempty=False, method="bondareva", violating=item, slack=slack)
        if tightest is None or slack > tightest:
            tightest = slack

    lp_report = core_nonempty_lp(g)
    if not lp_report.nonempty:
        raise VerificationError("[Game] Balanced-collection test and LP disagree on core nonemptiness")
    return CoreReport(nonempty=True, method="bondareva", slack=tightest, allocation=lp_report.allocation)


def _violating_collection(g: TUGame) -> Tuple[MinimalCollection, Fraction]:
    """
    Maximize Σ λ_S v(S) over λ ≥ 0 with Σ λ_S 1_S = 1

    An optimal vertex has independent support columns and positive weights on
    them, so its support is a minimal balanced collection.
    """
    n = g.n
    masks = list(range(1, 1 << n))
    A = [[(mask >> i) & 1 for mask in masks] for i in range(n)]
    result = solve_lp([-g.worth(mask) for mask in masks], A, [1] * n)
    if result.status is not LPStatus.OPTIMAL:
        raise VerificationError(f"[Game] Balanced-weight LP ended {result.status.value}")
    support = [(mask, w) for mask, w in zip(masks, result.x) if w > 0]
    collection = Collection(n=n, sets=tuple(mask for mask, _ in support))
    item = MinimalCollection(collection=collection, weights=tuple(w for _, w in support))
    return item, -result.value


def core_nonempty_lp(g: TUGame) -> CoreReport:
    """
    Exact feasibility of x(S) ≥ v(S) for all S with x([n]) = v([n])

    Shifts x by the singleton worths, keeps only coalitions whose shifted worth
    is positive and minimizes the total shifted payoff. An empty core is
    certified by the optimal vertex of the dual balanced-weight LP.
    """
    n = g.n
    if n > config.MAX_LP_GAME_N:
        raise SizeLimitError(f"LP core test supports n ≤ {config.MAX_LP_GAME_N}, got {n}")
    singles = [g.worth(1 << i) for i in range(n)]
    budget = g.grand_worth - sum(singles)

    demands: List[Tuple[int, Fraction]] = []
    for mask in range(1, (1 << n) - 1):
        if mask & (mask - 1) == 0:
            continue
        excess = g.worth(mask) - sum(singles[i] for i in range(n) if (mask >> i) & 1)
        if excess > 0:
            demands.append((mask, excess))

    # variables y_1..y_n then one surplus per demand row
    width = n + len(demands)
    A = []
    for k, (mask, _) in enumerate(demands):
        row = [0] * width
        for i in range(n):
            if (mask >> i) & 1:
                row[i] = 1
        row[n + k] = -1
        A.append(row)
    cost = [1] * n + [0] * len(demands)
    if demands:
        result = solve_lp(cost, A, [excess for _, excess in demands])
        if result.status is not LPStatus.OPTIMAL:
            raise VerificationError(f"[Game] Allocation LP ended {result.status.value}")
        y, needed = list(result.x[:n]), result.value
    else:
        y, needed = [Fraction(0)] * n, Fraction(0)

    if needed > budget:
        violating, value = _violating_collection(g)
        slack = value - g.grand_worth
        if slack <= 0:
            raise VerificationError("[Game] Allocation LP infeasible but no balanced collection is violated")
        return CoreReport(nonempty=False, method="lp", violating=violating, slack=slack)

    y[0] += budget - needed
    allocation = tuple(y[i] + singles[i] for i in range(n))
    if not _allocation_holds(g, allocation):
        raise VerificationError(f"[Game] Allocation {allocation} fails a coalition constraint")
    return CoreReport(nonempty=True, method="lp", slack=needed - budget, allocation=allocation)


def random_game(
    n: int, rng: random.Random, kind: str = "uniform", max_numerator: int = 12, max_denominator: int = 4
) -> TUGame:
    """
    Random game with small-denominator rational worths

    "uniform" draws every worth independently; "superadditive" fixes singleton
    worths at 0 and raises each worth to the best split of its coalition.
    """
    if kind not in GAME_KINDS:
        raise ValueError(f"Unknown game kind '{kind}', expected one of {', '.join(GAME_KINDS)}")

    def draw() -> Fraction:
        return Fraction(rng.randint(0, max_numerator), rng.randint(1, max_denominator))

    v = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        if kind == "superadditive" and mask & (mask - 1) == 0:
            continue
        v[mask] = draw()
        if kind == "superadditive":
            sub = (mask - 1) & mask
            while sub:
                v[mask] = max(v[mask], v[sub] + v[mask ^ sub])
                sub = (sub - 1) & mask
    return TUGame(n=n, v=tuple(v))


def scale_game(g: TUGame, factor: RationalLike) -> TUGame:
    """Multiply every worth by a positive rational"""
    factor = parse_rational(factor)
    if factor <= 0:
        raise ValueError("Scale factor must be positive")
    return TUGame(n=g.n, v=tuple(w * factor for w in g.v))
