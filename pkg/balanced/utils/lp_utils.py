"""
Exact rational linear programming: two-phase tableau simplex with Bland's rule
"""

from enum import Enum
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from balanced.utils.exact_utils import RationalLike, parse_rational


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LPResult(NamedTuple):
    status: LPStatus
    x: Optional[Tuple[Fraction, ...]] = None
    value: Optional[Fraction] = None

    @property
    def feasible(self) -> bool:
        return self.status is not LPStatus.INFEASIBLE


def _pivot(T: List[List[Fraction]], basis: List[int], r: int, c: int) -> None:
    pivot_row = T[r]
    pv = pivot_row[c]
    if pv != 1:
        pivot_row = [x / pv for x in pivot_row]
        T[r] = pivot_row
    for i, row in enumerate(T):
        if i != r:
            f = row[c]
            if f:
                T[i] = [a - f * b for a, b in zip(row, pivot_row)]
    basis[r] = c


def _optimize(T: List[List[Fraction]], basis: List[int], columns: int) -> bool:
    """Run Bland-rule pivots on T (objective in the last row); False when unbounded"""
    while True:
        objective = T[-1]
        entering = next((j for j in range(columns) if objective[j] < 0), None)
        if entering is None:
            return True
        best = None
        for i in range(len(T) - 1):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, basis, best[1], entering)


def solve_lp(c: Sequence[RationalLike], A_eq: Sequence[Sequence[RationalLike]], b_eq: Sequence[RationalLike]) -> LPResult:
    """
    Minimize c·x subject to A_eq x = b_eq and x ≥ 0, in exact arithmetic

    Args:
        c: objective coefficients, one per variable
        A_eq: equality constraint rows
        b_eq: right-hand sides

    Returns:
        LPResult with status, an optimal vertex and its value when optimal
    """
    nvar = len(c)
    cost = [parse_rational(x) for x in c]
    if len(A_eq) != len(b_eq):
        raise ValueError("A_eq and b_eq must have the same number of rows")

    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for row, value in zip(A_eq, b_eq):
        if len(row) != nvar:
            raise ValueError(f"Constraint row has {len(row)} entries, expected {nvar}")
        parsed = [parse_rational(x) for x in row]
        value = parse_rational(value)
        if value < 0:
            parsed = [-x for x in parsed]
            value = -value
        rows.append(parsed)
        rhs.append(value)

    m = len(rows)
    if m == 0:
        if any(x < 0 for x in cost):
            return LPResult(LPStatus.UNBOUNDED)
        return LPResult(LPStatus.OPTIMAL, tuple(Fraction(0) for _ in range(nvar)), Fraction(0))

    # Phase 1: one artificial per row
    T = [rows[i] + [Fraction(int(i == k)) for k in range(m)] + [rhs[i]] for i in range(m)]
    basis = [nvar + i for i in range(m)]
    phase1 = [-sum((T[i][j] for i in range(m)), Fraction(0)) for j in range(nvar)] + [Fraction(0)] * m
    phase1.append(-sum(rhs, Fraction(0)))
    T.append(phase1)
    _optimize(T, basis, nvar + m)
    if -T[-1][-1] > 0:
        return LPResult(LPStatus.INFEASIBLE)

    # Drive remaining artificials out of the basis; rows where that fails are redundant
    redundant = []
    for i in range(m):
        if basis[i] >= nvar:
            j = next((j for j in range(nvar) if T[i][j] != 0), None)
            if j is None:
                redundant.append(i)
            else:
                _pivot(T, basis, i, j)
    keep = [i for i in range(m) if i not in redundant]
    T = [T[i][:nvar] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    # Phase 2
    objective = [cost[j] - sum((cost[basis[i]] * T[i][j] for i in range(len(T))), Fraction(0)) for j in range(nvar)]
    objective.append(-sum((cost[basis[i]] * T[i][-1] for i in range(len(T))), Fraction(0)))
    T.append(objective)
    if not _optimize(T, basis, nvar):
        return LPResult(LPStatus.UNBOUNDED)

    x = [Fraction(0)] * nvar
    for i, var in enumerate(basis):
        x[var] = T[i][-1]
    value = sum((a * b for a, b in zip(cost, x)), Fraction(0))
    return LPResult(LPStatus.OPTIMAL, tuple(x), value)
