"""
Exact counts of minimal balanced collections by size, closed forms, estimates and bound checks
"""

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from balanced.config import config
from balanced.errors import SizeLimitError, VerificationError
from balanced.models import BoundLemmaReport, BoundReport, CountTable, EstimateRow, LambdaSet, LemmaCheck, MatrixSpaceScan
from balanced.services.storage_service import LambdaCacheStore
from balanced.services.weights_service import full_rank_subset_counts, generate_lambda, unificators
from balanced.utils.logging_utils import Stopwatch, get_logger
from balanced.utils.parallel_utils import run_tasks

logger = get_logger(__name__)

ALPHA_TERMS = 60


def surjections(k: int, n: int) -> int:
    """Number of maps from an n-set onto a k-set: Σ_l (-1)^(k-l) C(k,l) l^n"""
    if k < 0 or n < 0:
        raise ValueError("k and n must be nonnegative")
    return sum((-1) ** (k - l) * math.comb(k, l) * pow(l, n) for l in range(k + 1))


def _class_contribution(task) -> int:
    n, vector = task
    counts = full_rank_subset_counts(unificators(vector))
    return sum(c * surjections(k, n) for k, c in enumerate(counts) if c)


def count_positive_matrices(n: int, m: int, lam: LambdaSet, jobs: Optional[int] = None) -> int:
    """
    Number of n×m 0-1 matrices of rank m whose weight vector is positive

    Sums C_k(λ)·surj(k, n) over k and over the classes of lam, each class
    weighted by its multiplicity. Classes are reduced in their stored order.
    """
    if lam.m != m:
        raise ValueError(f"Weight-vector set is for m = {lam.m}, expected {m}")
    if n < m:
        raise ValueError(f"Counting needs n ≥ m, got n = {n}, m = {m}")
    tasks = [(n, cls_.vector) for cls_ in lam.classes]
    contributions = run_tasks(_class_contribution, tasks, jobs)
    return sum(cls_.multiplicity * value for cls_, value in zip(lam.classes, contributions))


def count_b(n: int, m: int, store: Optional[LambdaCacheStore] = None, jobs: Optional[int] = None) -> int:
    """B_{n,m}: minimal balanced collections of size m on [n]"""
    if not 1 <= m <= n:
        raise ValueError(f"count_b needs 1 ≤ m ≤ n, got n = {n}, m = {m}")
    lam = generate_lambda(m, store=store, jobs=jobs)
    matrices = count_positive_matrices(n, m, lam, jobs=jobs)
    quotient, remainder = divmod(matrices, math.factorial(m))
    if remainder:
        raise VerificationError(f"[Count] {matrices} positive matrices at n={n}, m={m} is not divisible by {m}!")
    return quotient


def count_b_total(
    n: int, store: Optional[LambdaCacheStore] = None, jobs: Optional[int] = None, extended: Optional[bool] = None
) -> CountTable:
    """B_{n,m} for every m and the total B_n; n = 7 needs extended mode (config.EXTENDED when None)"""
    limit = config.MAX_EXTENDED_N
    if n < 1 or n > limit:
        raise SizeLimitError(f"Totals are supported for 1 ≤ n ≤ {limit}, got {n}")
    extended = config.EXTENDED if extended is None else extended
    if n > config.MAX_ENUMERATION_N and not extended:
        raise SizeLimitError(f"n = {n} requires the extended mode (BALANCED_EXTENDED=true)")
    watch = Stopwatch()
    per_m = tuple(count_b(n, m, store=store, jobs=jobs) for m in range(1, n + 1))
    logger.info(f"[Count] B_{n} = {sum(per_m)} in {watch}")
    return CountTable(n=n, per_m=per_m, total=sum(per_m))


def closed_form(n: int, m: int) -> int:
    """Published closed forms for B_{n,m}, m ≤ 4, evaluated exactly"""
    if not 1 <= m <= 4:
        raise ValueError(f"Closed forms exist for m ≤ 4, got {m}")
    if n < m:
        raise ValueError(f"Closed forms need n ≥ m, got n = {n}, m = {m}")
    if m == 1:
        value = Fraction(1)
    elif m == 2:
        value = Fraction(2**n, 2) - 1
    elif m == 3:
        value = Fraction(3**n, 3) - 2**n + 1
    else:
        value = Fraction(6**n, 24) + Fraction(7 * 4**n, 24) - 2 * 3**n + Fraction(29 * 2**n, 8) - Fraction(8, 3)
    if value.denominator != 1:
        raise VerificationError(f"[Count] Closed form for n={n}, m={m} is not integral: {value}")
    return value.numerator


def _estimate_factor(m: int) -> int:
    # two extremal classes when m is odd
    return 2 if m % 2 and m > 1 else 1


def fixed_m_lower_estimate(n: int, m: int) -> int:
    """
    Contribution of the classes with the largest unificator sets

    For even m the class (2/m)·1, for odd m the two uniform classes with
    k = (m ± 1)/2; each has C(m, ⌈m/2⌉) unificators forming one spanning set,
    so surj(C(m, ⌈m/2⌉), n)/m! per class is a lower bound for B_{n,m}.
    """
    if not 1 <= m <= config.MAX_LAMBDA_M:
        raise ValueError(f"Estimate supports 1 ≤ m ≤ {config.MAX_LAMBDA_M}, got {m}")
    width = math.comb(m, (m + 1) // 2)
    quotient, remainder = divmod(_estimate_factor(m) * surjections(width, n), math.factorial(m))
    if remainder:
        raise VerificationError(f"[Count] Estimate for n={n}, m={m} is not integral")
    return quotient


def lower_estimate_report(m: int, n_values: Sequence[int], store: Optional[LambdaCacheStore] = None) -> List[EstimateRow]:
    """Estimate, exact count and asymptotic form per n; records where the asymptotic regime begins"""
    width = math.comb(m, (m + 1) // 2)
    rows = []
    for n in n_values:
        estimate = fixed_m_lower_estimate(n, m)
        count = count_b(n, m, store=store)
        asymptotic = Fraction(_estimate_factor(m) * width**n, math.factorial(m))
        rows.append(
            EstimateRow(
                n=n,
                m=m,
                estimate=estimate,
                count=count,
                asymptotic=asymptotic,
                ratio_to_asymptotic=Fraction(estimate) / asymptotic,
                share_of_count=Fraction(estimate, count) if count else Fraction(0),
            )
        )
    return rows


def alpha_constant(terms: int) -> Fraction:
    """Partial product ∏_{k=1}^{terms} (1 - 2^-k)"""
    if terms < 1:
        raise ValueError("terms must be at least 1")
    numerator = 1
    for k in range(1, terms + 1):
        numerator *= 2**k - 1
    return Fraction(numerator, 2 ** (terms * (terms + 1) // 2))


def theorem1_bounds(n: int, b_n: int) -> BoundReport:
    """Evaluate 0.288/n!·2^((n-1)^2) < B_n < 120/n!·2^(n^2-n) exactly"""
    if n < 3:
        raise ValueError("The total-count bounds are stated for n ≥ 3")
    factorial = math.factorial(n)
    lower = Fraction(288, 1000) * Fraction(2 ** ((n - 1) ** 2), factorial)
    upper = Fraction(120 * 2 ** (n * n - n), factorial)
    alpha_lower = alpha_constant(ALPHA_TERMS) * Fraction(2 ** ((n - 1) ** 2), factorial)
    report = BoundReport(
        n=n,
        b_n=b_n,
        lower=lower,
        upper=upper,
        alpha_lower=alpha_lower,
        lower_approx=float(lower),
        upper_approx=float(upper),
        lower_holds=lower < b_n,
        upper_holds=b_n < upper,
    )
    logger.debug(f"[Count] Bounds at n={n}: {report.lower_approx:.3f} < {b_n} < {report.upper_approx:.3f}")
    return report


def _check(name: str, n: int, m: int, lhs: Fraction, rhs: Fraction, strict: bool) -> LemmaCheck:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    holds = lhs < rhs if strict else lhs <= rhs
    return LemmaCheck(name=name, n=n, m=m, lhs=lhs, rhs=rhs, relation="<" if strict else "<=", holds=holds, margin=rhs - lhs)


def _lift_product(n: int) -> Fraction:
    """2^(n^2-n) ∏_{k=1}^{n-1} (1 - 2^-(n-k))"""
    value = Fraction(2 ** (n * n - n))
    for k in range(1, n):
        value *= 1 - Fraction(1, 2 ** (n - k))
    return value


def bound_lemma_checks(n: int, scans: Dict[int, MatrixSpaceScan]) -> BoundLemmaReport:
    """
    Matrix-count inequalities checked against exhaustive scans

    Args:
        n: number of rows
        scans: MatrixSpaceScan per m for this n

    Returns:
        BoundLemmaReport with one LemmaCheck per inequality evaluated
    """
    if n > config.MAX_ENUMERATION_N:
        raise SizeLimitError(f"Bound lemma checks support n ≤ {config.MAX_ENUMERATION_N}")
    checks: List[LemmaCheck] = []
    for m, scan in sorted(scans.items()):
        if scan.n != n or scan.m != m:
            raise ValueError(f"Scan for ({scan.n}, {scan.m}) filed under ({n}, {m})")
        width = math.comb(m, (m + 1) // 2)
        if m >= 2:
            checks.append(_check("orbit-lower", n, m, Fraction(2, 2**m - m) * scan.nonzero, scan.positive, strict=False))
            checks.append(_check("orbit-upper", n, m, scan.positive, Fraction(2, 2**m - width) * scan.nonzero, strict=False))
        if m == n:
            checks.append(_check("lift-lower", n, m, _lift_product(n), scan.nonzero, strict=False))
        if m < n:
            checks.append(_check("nonzero-upper", n, m, scan.nonzero, Fraction(2 ** (n * m) * 2, m + 1), strict=True))
        if m == n - 1 and n >= 2:
            checks.append(_check("nonzero-upper-square", n, m, scan.nonzero, Fraction(2 ** (n * n - n + 1), n), strict=True))
    report = BoundLemmaReport(n=n, checks=tuple(checks))
    failed = [c.name for c in report.checks if not c.holds]
    if failed:
        logger.warning(f"[Count] Bound lemma checks failing at n={n}: {failed}")
    return report


def bound_ladder(table: CountTable) -> BoundLemmaReport:
    """Size-resolved upper and lower bounds on B_{n,m} evaluated on a count table"""
    n = table.n
    checks: List[LemmaCheck] = []
    for m, count in enumerate(table.per_m, start=1):
        width = math.comb(m, (m + 1) // 2)
        if m < n:
            cap = Fraction(4, math.factorial(m + 1) * (2**m - width)) * 2 ** (n * m)
            checks.append(_check("size-upper", n, m, count, cap, strict=False))
            coarse = Fraction(8, math.factorial(m + 1)) * 2 ** (n * m - m)
            checks.append(_check("size-upper-coarse", n, m, count, coarse, strict=True))
        else:
            cap = Fraction(2, math.factorial(n) * (2**n - width)) * 2 ** (n * n)
            checks.append(_check("square-upper", n, m, count, cap, strict=False))
            if n >= 2:
                floor = Fraction(2, math.factorial(n) * (2**n - n)) * _lift_product(n)
                checks.append(_check("square-lower", n, m, floor, count, strict=False))
    checks.append(_check("square-dominates", n, n, table.total, 30 * table.per_m[-1], strict=True))
    return BoundLemmaReport(n=n, checks=tuple(checks))
