"""
Unificators, the rank criterion for weight vectors, generation of the weight-vector
sets by size, and counts of spanning unificator subsets
"""

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from balanced.config import config
from balanced.errors import SizeLimitError
from balanced.models import LambdaClass, LambdaSet, UnificatorExtremes, UnificatorSet
from balanced.utils.exact_utils import (
    IncrementalBasis,
    WeightVector,
    distinct_permutations,
    mask_vector,
    rank_of_masks,
    solve_rows,
    subset_sums,
)
from balanced.utils.logging_utils import Stopwatch, get_logger
from balanced.utils.parallel_utils import run_tasks

if TYPE_CHECKING:
    from balanced.services.storage_service import LambdaCacheStore

logger = get_logger(__name__)

MAX_UNIFICATOR_DIM = 16

ONE = Fraction(1)


def canonical_class(weights: Sequence[Fraction]) -> WeightVector:
    """Descending representative of the permutation class"""
    return tuple(sorted(weights, reverse=True))


def class_multiplicity(weights: Sequence[Fraction]) -> int:
    return distinct_permutations(weights)


def expand_class(vector: Sequence[Fraction]) -> Iterator[WeightVector]:
    """Every distinct coordinate ordering of vector, each exactly once"""
    values = sorted(vector)
    if not values:
        yield ()
        return

    def build(remaining: List[Fraction]) -> Iterator[Tuple[Fraction, ...]]:
        if not remaining:
            yield ()
            return
        for i, value in enumerate(remaining):
            if i and remaining[i - 1] == value:
                continue
            for rest in build(remaining[:i] + remaining[i + 1 :]):
                yield (value,) + rest

    yield from build(values)


def uniform_vector(m: int, k: int) -> WeightVector:
    """(1/k, ..., 1/k) of length m"""
    return tuple(Fraction(1, k) for _ in range(m))


def unificators(weights: Sequence[Fraction]) -> UnificatorSet:
    """All masks u with u·λ = 1, by exact scan of the 2^m masks"""
    m = len(weights)
    if m > MAX_UNIFICATOR_DIM:
        raise SizeLimitError(f"Unificator scan supports m ≤ {MAX_UNIFICATOR_DIM}, got {m}")
    sums = subset_sums(weights)
    rows = tuple(mask for mask in range(1, 1 << m) if sums[mask] == ONE)
    return UnificatorSet(weights=tuple(weights), rows=rows, rank=rank_of_masks(rows, m) if rows else 0)


def is_in_lambda(weights: Sequence[Fraction]) -> bool:
    """True iff every coordinate is positive and the unificators have rank m"""
    if not weights or any(w <= 0 for w in weights):
        return False
    return unificators(weights).rank == len(weights)


@lru_cache(maxsize=8192)
def _spanning_counts(rows: Tuple[int, ...], m: int) -> Tuple[int, ...]:
    """
    counts[k] = number of k-subsets of rows whose span is the whole of Q^m

    Dynamic programme over closures: every subset of the rows seen so far is
    tallied under its closure, so adding a row either keeps a closed set or joins
    it to the closure of the union.
    """
    size = len(rows)
    vectors = [mask_vector(r, m) for r in rows]
    if rank_of_masks(rows, m) < m:
        return tuple([0] * (size + 1))

    bases: Dict[int, IncrementalBasis] = {0: IncrementalBasis(m)}
    joins: Dict[Tuple[int, int], int] = {}

    def join(closed: int, e: int) -> int:
        key = (closed, e)
        if key not in joins:
            basis = bases[closed].add(vectors[e])
            closure = closed | (1 << e)
            for k, vector in enumerate(vectors):
                if not (closure >> k) & 1 and basis.contains(vector):
                    closure |= 1 << k
            bases.setdefault(closure, basis)
            joins[key] = closure
        return joins[key]

    states: Dict[int, List[int]] = {0: [1]}
    for e in range(size):
        updated = {closed: list(counts) for closed, counts in states.items()}
        for closed, counts in states.items():
            target = closed if (closed >> e) & 1 else join(closed, e)
            tally = updated.setdefault(target, [])
            if len(tally) < len(counts) + 1:
                tally.extend([0] * (len(counts) + 1 - len(tally)))
            for k, value in enumerate(counts):
                tally[k + 1] += value
        states = updated

    top = states.get((1 << size) - 1, [])
    return tuple(top[k] if k < len(top) else 0 for k in range(size + 1))


def full_rank_subset_counts(u: UnificatorSet) -> Tuple[int, ...]:
    """C_0 .. C_|U|: numbers of k-subsets of the unificators with rank m"""
    return _spanning_counts(tuple(u.rows), u.m)


def count_full_rank_subsets(u: UnificatorSet, k: int) -> int:
    """C_k(λ)"""
    if k < 0:
        raise ValueError("k must be nonnegative")
    counts = full_rank_subset_counts(u)
    return counts[k] if k < len(counts) else 0


def _insertion_candidates(vector: WeightVector) -> Set[WeightVector]:
    """Insert 1 - λ(I) as a new coordinate, optionally taking it from some λ_σ with σ outside I"""
    found: Set[WeightVector] = set()
    sums = subset_sums(vector)
    for subset, s in enumerate(sums):
        if s >= 1:
            continue
        w = ONE - s
        found.add(canonical_class(vector + (w,)))
        for sigma, value in enumerate(vector):
            if (subset >> sigma) & 1 or not ONE - value < s:
                continue
            reduced = list(vector)
            reduced[sigma] -= w
            found.add(canonical_class(tuple(reduced) + (w,)))
    return found


def _combination_candidates(task: Tuple[int, WeightVector, WeightVector]) -> Set[WeightVector]:
    """
    Convex combinations of two zero-padded weight vectors whose supports cover m slots

    The first vector fills the leading slots; the second takes the trailing slots
    plus every choice of overlap slots, in every distinct ordering. For each subset
    I with λ(I) ≠ ω(I), t = (1 - λ(I)) / (ω(I) - λ(I)) in (0, 1) gives a candidate.
    """
    m, lam, omega = task
    k, l = len(lam), len(omega)
    overlap = k + l - m
    found: Set[WeightVector] = set()
    if overlap < 0:
        return found
    lam_hat = lam + (Fraction(0),) * (m - k)
    lam_sums = subset_sums(lam_hat)
    seen = set()
    for shared in itertools.combinations(range(k), overlap):
        slots = list(shared) + list(range(k, m))
        for ordering in expand_class(omega):
            omega_hat = [Fraction(0)] * m
            for slot, value in zip(slots, ordering):
                omega_hat[slot] = value
            omega_hat = tuple(omega_hat)
            if omega_hat in seen:
                continue
            seen.add(omega_hat)
            omega_sums = subset_sums(omega_hat)
            ts = set()
            for a, b in zip(lam_sums, omega_sums):
                if a != b:
                    t = (ONE - a) / (b - a)
                    if 0 < t < 1:
                        ts.add(t)
            for t in ts:
                candidate = tuple((1 - t) * x + t * y for x, y in zip(lam_hat, omega_hat))
                if all(x > 0 for x in candidate):
                    found.add(canonical_class(candidate))
    return found


def _validate_batch(batch: Tuple[WeightVector, ...]) -> List[WeightVector]:
    return [v for v in batch if is_in_lambda(v)]


def _admit(candidates: Set[WeightVector], jobs: Optional[int]) -> Set[WeightVector]:
    ordered = sorted(candidates)
    batch_size = 256
    batches = [tuple(ordered[i : i + batch_size]) for i in range(0, len(ordered), batch_size)]
    admitted: Set[WeightVector] = set()
    for accepted in run_tasks(_validate_batch, batches, jobs):
        admitted.update(accepted)
    return admitted


def _generate_level(m: int, lower: Dict[int, LambdaSet], jobs: Optional[int]) -> LambdaSet:
    watch = Stopwatch()
    candidates: Set[WeightVector] = set()
    for cls_ in lower[m - 1].classes:
        candidates |= _insertion_candidates(cls_.vector)
    logger.debug(f"[Lambda] m={m}: {len(candidates)} insertion candidates")

    tasks = []
    for k in range(m - 1, 0, -1):
        for l in range(k, 0, -1):
            if k + l < m:
                continue
            for i, first in enumerate(lower[k].classes):
                for j, second in enumerate(lower[l].classes):
                    if k == l and j < i:
                        continue
                    tasks.append((m, first.vector, second.vector))
    for found in run_tasks(_combination_candidates, tasks, jobs):
        candidates |= found
    logger.debug(f"[Lambda] m={m}: {len(candidates)} candidates after combinations")

    admitted = _admit(candidates, jobs)
    rejected = candidates - admitted

    # Re-feed newly admitted classes through the combination step until nothing new appears
    frontier = set(admitted)
    rounds = 0
    while frontier and m <= config.LAMBDA_FIXPOINT_MAX_M:
        rounds += 1
        pool = sorted(admitted)
        refeed = [(m, new, old) for new in sorted(frontier) for old in pool]
        fresh: Set[WeightVector] = set()
        for found in run_tasks(_combination_candidates, refeed, jobs):
            fresh |= found
        fresh -= admitted | rejected
        accepted = _admit(fresh, jobs)
        rejected |= fresh - accepted
        frontier = accepted
        admitted |= accepted

    result = LambdaSet.from_vectors(m, admitted)
    logger.info(
        f"[Lambda] Generated m={m}: {len(result.classes)} classes, {result.total_vectors} vectors, "
        f"{rounds} re-feed rounds in {watch}"
    )
    return result


_generated: Dict[Tuple[int, int], LambdaSet] = {}


def generate_lambda(m: int, store: Optional["LambdaCacheStore"] = None, jobs: Optional[int] = None) -> LambdaSet:
    """
    Weight-vector set of size m built level by level from all smaller sizes

    Args:
        m: vector length
        store: optional cache consulted first and filled afterwards
        jobs: worker processes for candidate generation and validation

    Returns:
        LambdaSet of validated classes
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > config.MAX_LAMBDA_M:
        raise SizeLimitError(f"Weight-vector generation supports m ≤ {config.MAX_LAMBDA_M}, got {m}")

    levels: Dict[int, LambdaSet] = {}
    for k in range(1, m + 1):
        memo_key = (k, config.LAMBDA_FIXPOINT_MAX_M)
        level = _generated.get(memo_key)
        cached = store.load(k) if store is not None else None
        if level is None:
            level = cached
        if level is None:
            if k == 1:
                level = LambdaSet(m=1, classes=(LambdaClass.from_vector((ONE,)),))
            else:
                level = _generate_level(k, levels, jobs)
        # a warm memo still fills a cold store
        if store is not None and cached is None:
            store.save(level)
        _generated[memo_key] = level
        levels[k] = level
    return levels[m]


def _oracle_batch(task: Tuple[int, Tuple[Tuple[int, ...], ...]]) -> Set[WeightVector]:
    m, row_sets = task
    found: Set[WeightVector] = set()
    for rows in row_sets:
        result = solve_rows(rows, m)
        if result.found and all(w > 0 for w in result.weights):
            found.add(canonical_class(result.weights))
    return found


def lambda_bruteforce_oracle(m: int, jobs: Optional[int] = None) -> LambdaSet:
    """
    Weight vectors of every invertible m×m 0-1 system A λ = 1 with λ > 0

    Scans sets of m distinct rows; row order never changes the solution and
    invertible matrices never repeat a row, so this covers every matrix.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > config.MAX_LAMBDA_ORACLE_M:
        raise SizeLimitError(f"Brute-force weight oracle supports m ≤ {config.MAX_LAMBDA_ORACLE_M}, got {m}")
    watch = Stopwatch()
    row_sets = list(itertools.combinations(range(1, 1 << m), m))
    batch_size = 4096
    tasks = [(m, tuple(row_sets[i : i + batch_size])) for i in range(0, len(row_sets), batch_size)]
    positive: Set[WeightVector] = set()
    for found in run_tasks(_oracle_batch, tasks, jobs):
        positive |= found
    admitted = {v for v in positive if is_in_lambda(v)}
    result = LambdaSet.from_vectors(m, admitted)
    logger.info(f"[Lambda] Oracle m={m}: {len(result.classes)} classes from {len(row_sets)} row sets in {watch}")
    return result


def unificator_extremes(lam: LambdaSet) -> UnificatorExtremes:
    """Smallest and largest |U(λ)| over the set, and inclusion pairs inside any U(λ)"""
    sizes = []
    violations = 0
    for cls_ in lam.classes:
        rows = unificators(cls_.vector).rows
        sizes.append(len(rows))
        for u, v in itertools.permutations(rows, 2):
            if u & v == u:
                violations += 1
    return UnificatorExtremes(m=lam.m, min_size=min(sizes), max_size=max(sizes), antichain_violations=violations)
