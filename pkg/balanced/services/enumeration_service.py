"""
Enumeration of minimal balanced collections, definition-based oracle enumeration,
0-1 matrix-space scans and the census of collections of 2-element sets
"""

import hashlib
import itertools
import math
from collections import Counter
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from balanced.config import config
from balanced.errors import PreconditionError, ResourceLimitError, SizeLimitError, VerificationError
from balanced.models import (
    Collection,
    EnumerationResult,
    LambdaSet,
    MatrixSpaceScan,
    MinimalCollection,
    TwoElementCensus,
)
from balanced.services.model_service import balanced_weights
from balanced.services.weights_service import generate_lambda, unificators
from balanced.utils.exact_utils import IncrementalBasis, WeightVector, mask_vector, satisfies_ones, solve_columns
from balanced.utils.logging_utils import Stopwatch, get_logger
from balanced.utils.parallel_utils import resolve_jobs, run_tasks

logger = get_logger(__name__)

MODES = ("search", "lambda-route")

Item = Tuple[Tuple[int, ...], WeightVector]


def _sort_key(item: Item) -> Tuple[int, Tuple[int, ...]]:
    return len(item[0]), item[0]


def _fingerprint(key: str) -> int:
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big")


def collection_checksum(keys: Iterable[str]) -> str:
    """Order-independent 64-bit fold of per-collection hashes"""
    total = 0
    for key in keys:
        total = (total + _fingerprint(key)) & 0xFFFFFFFFFFFFFFFF
    return f"{total:016x}"


def collection_digest(keys: Iterable[str]) -> str:
    """sha256 over keys in the given (canonical) order"""
    h = hashlib.sha256()
    for key in keys:
        h.update(key.encode())
        h.update(b"\n")
    return h.hexdigest()


def _build_result(n: int, mode: str, items: Iterable[Item], complete: bool = True) -> EnumerationResult:
    ordered = sorted(items, key=_sort_key)
    minimal = tuple(MinimalCollection(collection=Collection(n=n, sets=sets), weights=weights) for sets, weights in ordered)
    keys = [m.collection.key() for m in minimal]
    per_m = Counter(len(sets) for sets, _ in ordered)
    return EnumerationResult(
        n=n,
        mode=mode,
        items=minimal,
        per_m_counts=tuple(per_m.get(m, 0) for m in range(1, n + 1)),
        checksum=collection_checksum(keys),
        digest=collection_digest(keys),
        complete=complete,
    )


def collect_result(n: int, items: Iterable[MinimalCollection], mode: str = "file") -> EnumerationResult:
    """Canonical, checksummed result from collections read back from disk or a stream"""
    pairs: Dict[Tuple[int, ...], WeightVector] = {}
    for item in items:
        if item.collection.n != n:
            raise PreconditionError(f"Collection {item.collection.key()} is not on [{n}]")
        _check_item(n, item.collection.sets, item.weights)
        pairs[item.collection.sets] = item.weights
    return _build_result(n, mode, pairs.items())


def _check_item(n: int, sets: Sequence[int], weights: WeightVector) -> None:
    if any(w <= 0 for w in weights) or not satisfies_ones(sets, n, weights):
        raise VerificationError(f"[Enumerate] Emitted weights for {sets} do not certify minimality")


# --- search mode ---------------------------------------------------------------


def _search_task(task: Tuple[int, Tuple[int, ...], int]) -> Tuple[List[Item], int, bool]:
    """
    Depth-first search below a fixed prefix of coalitions

    A branch extends with larger masks while the columns stay independent. Once
    the ones vector lies in the span the solution is unique, and every independent
    extension keeps it with a zero appended, so the branch stops there.
    """
    n, prefix, budget = task
    full = (1 << n) - 1
    items: List[Item] = []
    nodes = 0
    basis: Optional[IncrementalBasis] = IncrementalBasis(n)
    for mask in prefix:
        basis = basis.add(mask_vector(mask, n)) if basis is not None else None
    if basis is None:
        return items, nodes, False

    stack: List[Tuple[Tuple[int, ...], IncrementalBasis]] = [(prefix, basis)]
    while stack:
        sets, basis = stack.pop()
        nodes += 1
        if budget and nodes > budget:
            return items, nodes, True
        if basis.spans_ones:
            result = solve_columns(sets, n)
            if not result.found:
                raise VerificationError(f"[Enumerate] Spanning prefix {sets} has no unique solution")
            if all(w > 0 for w in result.weights):
                items.append((sets, result.weights))
            continue
        if basis.rank == n:
            continue
        children = []
        for mask in range(sets[-1] + 1, full + 1):
            extended = basis.add(mask_vector(mask, n))
            if extended is not None:
                children.append((sets + (mask,), extended))
        stack.extend(reversed(children))
    return items, nodes, False


def _search_prefixes(n: int) -> List[Tuple[int, ...]]:
    """Depth-two prefixes, plus the grand coalition which closes at depth one"""
    full = (1 << n) - 1
    # distinct nonzero 0-1 vectors are pairwise independent
    prefixes: List[Tuple[int, ...]] = list(itertools.combinations(range(1, full + 1), 2))
    prefixes.append((full,))
    return prefixes


def _iter_search(n: int, jobs: Optional[int], node_budget: Optional[int]) -> Iterator[Item]:
    tasks = _search_prefixes(n)
    chunk = max(1, resolve_jobs(jobs) * 8)
    spent = 0
    for start in range(0, len(tasks), chunk):
        remaining = 0
        if node_budget:
            remaining = node_budget - spent
            if remaining <= 0:
                raise ResourceLimitError(f"[Enumerate] Node budget {node_budget} exhausted", partial=start)
        batch = [(n, prefix, remaining) for prefix in tasks[start : start + chunk]]
        for found, nodes, truncated in run_tasks(_search_task, batch, jobs):
            spent += nodes
            yield from found
            if truncated:
                raise ResourceLimitError(f"[Enumerate] Node budget {node_budget} exhausted", partial=start)


# --- lambda-route mode ---------------------------------------------------------


def _tie_pairs(vector: WeightVector) -> Tuple[int, ...]:
    """Column indices j whose weight equals that of column j + 1"""
    return tuple(j for j in range(len(vector) - 1) if vector[j] == vector[j + 1])


def _iter_route_class(n: int, vector: WeightVector) -> Iterator[Item]:
    """
    Collections on [n] with weight class vector

    Rows of U(vector) are assigned to players n..1. Columns of equal weight must be
    strictly increasing as masks, which fixes one column order per collection; the
    top player is the most significant bit so ties resolve from the first row down.
    """
    m = len(vector)
    rows = unificators(vector).rows
    ties = _tie_pairs(vector)
    tie_bits = [((1 << j), (1 << (j + 1))) for j in ties]
    row_vectors = {u: mask_vector(u, m) for u in rows}

    def assign(player: int, columns: Tuple[int, ...], basis: IncrementalBasis, open_ties: int) -> Iterator[Item]:
        if basis.rank + player + 1 < m:
            return
        if player < 0:
            if basis.rank == m and not open_ties:
                pairs = sorted(zip(columns, vector))
                yield tuple(c for c, _ in pairs), tuple(w for _, w in pairs)
            return
        for u in rows:
            still_open = 0
            for k, (lo, hi) in enumerate(tie_bits):
                if not (open_ties >> k) & 1:
                    continue
                a, b = bool(u & lo), bool(u & hi)
                if a and not b:
                    break
                if a == b:
                    still_open |= 1 << k
            else:
                extended = basis.add(row_vectors[u])
                next_columns = tuple(c | (((u >> j) & 1) << player) for j, c in enumerate(columns))
                yield from assign(player - 1, next_columns, extended or basis, still_open)

    yield from assign(n - 1, (0,) * m, IncrementalBasis(m), (1 << len(tie_bits)) - 1)


def _route_task(task: Tuple[int, WeightVector]) -> List[Item]:
    n, vector = task
    return list(_iter_route_class(n, vector))


def _route_vectors(n: int, jobs: Optional[int]) -> List[WeightVector]:
    vectors: List[WeightVector] = []
    for m in range(1, n + 1):
        vectors.extend(cls_.vector for cls_ in generate_lambda(m, jobs=jobs).classes)
    return vectors


def _iter_route(n: int, jobs: Optional[int]) -> Iterator[Item]:
    vectors = _route_vectors(n, jobs)
    if resolve_jobs(jobs) == 1:
        for vector in vectors:
            yield from _iter_route_class(n, vector)
        return
    for found in run_tasks(_route_task, [(n, v) for v in vectors], jobs):
        yield from found


# --- public entry points -------------------------------------------------------


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"Unknown enumeration mode '{mode}', expected one of {', '.join(MODES)}")


def stream_minimal(
    n: int, mode: str = "lambda-route", jobs: Optional[int] = None, node_budget: Optional[int] = None
) -> Iterator[MinimalCollection]:
    """
    Yield every minimal balanced collection on [n] without holding them all

    Order is deterministic (task order) but not canonical; use enumerate_minimal
    for a sorted, checksummed result.
    """
    _check_mode(mode)
    if n < 1 or n > config.enumeration_limit:
        raise SizeLimitError(f"Streaming enumeration supports 1 ≤ n ≤ {config.enumeration_limit}, got {n}")
    source = _iter_search(n, jobs, node_budget) if mode == "search" else _iter_route(n, jobs)
    for sets, weights in source:
        _check_item(n, sets, weights)
        yield MinimalCollection(collection=Collection(n=n, sets=sets), weights=weights)


def enumerate_minimal(
    n: int, mode: str = "search", jobs: Optional[int] = None, node_budget: Optional[int] = None
) -> EnumerationResult:
    """
    All minimal balanced collections on [n], sorted by (size, masks)

    Args:
        n: number of players, at most 6 in memory
        mode: "search" (independent-column DFS) or "lambda-route" (assignments of unificator rows)
        jobs: worker processes
        node_budget: abort the search after this many nodes

    Raises:
        ResourceLimitError: budget exhausted; partial holds the EnumerationResult so far
    """
    _check_mode(mode)
    if n < 1 or n > config.MAX_ENUMERATION_N:
        raise SizeLimitError(
            f"In-memory enumeration supports 1 ≤ n ≤ {config.MAX_ENUMERATION_N}, got {n}; stream to disk instead"
        )
    watch = Stopwatch()
    logger.info(f"[Enumerate] Starting {mode} enumeration at n={n}")
    items: Dict[Tuple[int, ...], WeightVector] = {}
    source = _iter_search(n, jobs, node_budget) if mode == "search" else _iter_route(n, jobs)
    try:
        for sets, weights in source:
            _check_item(n, sets, weights)
            if sets in items:
                if items[sets] != weights:
                    raise VerificationError(f"[Enumerate] Collection {sets} produced with two weight vectors")
                continue
            items[sets] = weights
    except ResourceLimitError as e:
        partial = _build_result(n, mode, items.items(), complete=False)
        logger.warning(f"[Enumerate] Aborted after {partial.total} collections: {e}")
        raise ResourceLimitError(str(e), partial=partial) from e

    result = _build_result(n, mode, items.items())
    logger.info(f"[Enumerate] {mode} n={n}: {result.total} collections, checksum {result.checksum} in {watch}")
    return result


# --- definition-based oracle ---------------------------------------------------


def _oracle_task(task: Tuple[int, Tuple[Tuple[int, ...], ...], FrozenSet[Tuple[int, ...]]]) -> List[Item]:
    n, candidates, known = task
    full = (1 << n) - 1
    found: List[Item] = []
    for sets in candidates:
        union = 0
        for s in sets:
            union |= s
        if union != full:
            continue
        # a collection holding a smaller minimal balanced collection is not minimal
        if any(sub in known for r in range(1, len(sets)) for sub in itertools.combinations(sets, r)):
            continue
        weights = balanced_weights(Collection(n=n, sets=sets))
        if weights is not None:
            found.append((sets, weights))
    return found


def bruteforce_oracle_enumerate(n: int, jobs: Optional[int] = None) -> EnumerationResult:
    """
    Minimal balanced collections from the definition alone

    Sizes are scanned in increasing order, so a balanced collection is minimal
    exactly when no already-found minimal collection is contained in it.
    """
    if n < 1 or n > config.MAX_ORACLE_N:
        raise SizeLimitError(f"Brute-force oracle supports 1 ≤ n ≤ {config.MAX_ORACLE_N}, got {n}")
    watch = Stopwatch()
    coalitions = range(1, 1 << n)
    known: set = set()
    items: List[Item] = []
    batch_size = 2048
    for m in range(1, n + 1):
        frozen = frozenset(known)
        combos = list(itertools.combinations(coalitions, m))
        tasks = [(n, tuple(combos[i : i + batch_size]), frozen) for i in range(0, len(combos), batch_size)]
        for found in run_tasks(_oracle_task, tasks, jobs):
            items.extend(found)
            known.update(sets for sets, _ in found)
        logger.debug(f"[Enumerate] Oracle n={n}, m={m}: {len(combos)} collections scanned")
    result = _build_result(n, "oracle", items)
    logger.info(f"[Enumerate] Oracle n={n}: {result.total} collections in {watch}")
    return result


# --- matrix space --------------------------------------------------------------


def _check_scan_size(n: int, m: int) -> None:
    if not 1 <= m <= n:
        raise ValueError(f"Matrix scans need 1 ≤ m ≤ n, got n = {n}, m = {m}")
    if n * m > config.MAX_SCAN_CELLS:
        raise SizeLimitError(f"Matrix scans support n·m ≤ {config.MAX_SCAN_CELLS}, got {n * m}")


def _iter_space(n: int, m: int, first: int) -> Iterator[Tuple[Tuple[int, ...], WeightVector]]:
    for rest in itertools.product(range(1, 1 << n), repeat=m - 1):
        columns = (first,) + rest
        if len(set(columns)) < m:
            continue
        result = solve_columns(columns, n)
        if result.found:
            yield columns, result.weights


def iter_matrix_space(n: int, m: int) -> Iterator[Tuple[Tuple[int, ...], WeightVector]]:
    """Every full-rank n×m 0-1 matrix with a weight vector, as (columns, λ)"""
    _check_scan_size(n, m)
    for first in range(1, 1 << n):
        yield from _iter_space(n, m, first)


def _scan_task(task: Tuple[int, int, int]) -> Tuple[int, int, int, Dict[int, int]]:
    n, m, first = task
    full_rank = nonzero = positive = 0
    per_support: Dict[int, int] = {}
    for _, weights in _iter_space(n, m, first):
        full_rank += 1
        support = sum(1 << j for j, w in enumerate(weights) if w != 0)
        per_support[support] = per_support.get(support, 0) + 1
        if all(w != 0 for w in weights):
            nonzero += 1
            if all(w > 0 for w in weights):
                positive += 1
    return full_rank, nonzero, positive, per_support


def scan_matrix_space(n: int, m: int, jobs: Optional[int] = None) -> MatrixSpaceScan:
    """
    Classify all 2^(nm) n×m 0-1 matrices

    Matrices with a zero or repeated column are rank deficient and skipped before
    solving. per_support counts full-rank matrices by the support of λ.
    """
    _check_scan_size(n, m)
    watch = Stopwatch()
    totals = [0, 0, 0]
    per_support: Dict[int, int] = {}
    for full_rank, nonzero, positive, supports in run_tasks(_scan_task, [(n, m, f) for f in range(1, 1 << n)], jobs):
        totals[0] += full_rank
        totals[1] += nonzero
        totals[2] += positive
        for support, count in supports.items():
            per_support[support] = per_support.get(support, 0) + count
    logger.debug(f"[Enumerate] Scanned {1 << (n * m)} matrices at n={n}, m={m} in {watch}")
    return MatrixSpaceScan(
        n=n, m=m, full_rank=totals[0], nonzero=totals[1], positive=totals[2], per_support=dict(sorted(per_support.items()))
    )


# --- 2-element sets ------------------------------------------------------------


def _component_shapes(n: int, smallest: int = 2) -> Iterator[Tuple[int, ...]]:
    """Partitions of n into parts 2 or odd ≥ 3, parts nondecreasing"""
    if n == 0:
        yield ()
        return
    for part in range(smallest, n + 1):
        if part != 2 and part % 2 == 0:
            continue
        for rest in _component_shapes(n - part, part):
            yield (part,) + rest


def _cycle_count(k: int) -> int:
    return 1 if k == 2 else math.factorial(k - 1) // 2


def enumerate_two_element(n: int) -> TwoElementCensus:
    """
    Count minimal balanced collections of 2-element sets by component shape

    Their graphs cover [n] with disjoint edges and odd cycles; each shape
    contributes n!/(∏ part! ∏ repeat!) block choices times the cycles per block.
    """
    if n < 2:
        raise PreconditionError("Collections of 2-element sets need n ≥ 2")
    if n > config.MAX_TWO_ELEMENT_N:
        raise SizeLimitError(f"Two-element census supports n ≤ {config.MAX_TWO_ELEMENT_N}, got {n}")
    by_shape: Dict[str, int] = {}
    for shape in _component_shapes(n):
        ways = math.factorial(n)
        for part in shape:
            ways //= math.factorial(part)
        for repeat in Counter(shape).values():
            ways //= math.factorial(repeat)
        for part in shape:
            ways *= _cycle_count(part)
        by_shape["+".join(str(p) for p in shape)] = ways
    return TwoElementCensus(n=n, by_shape=by_shape, total=sum(by_shape.values()))


def _cycles_on(block: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    """Edge masks of each undirected cycle through all vertices of block (0-based)"""
    if len(block) == 2:
        yield ((1 << block[0]) | (1 << block[1]),)
        return
    head, rest = block[0], block[1:]
    for order in itertools.permutations(rest):
        if order[0] > order[-1]:
            continue
        path = (head,) + order + (head,)
        yield tuple((1 << a) | (1 << b) for a, b in zip(path, path[1:]))


def iter_two_element_graphs(n: int) -> Iterator[Collection]:
    """Every cover of [n] by disjoint edges and odd cycles, as a collection of 2-element sets"""
    if n < 2:
        raise PreconditionError("Collections of 2-element sets need n ≥ 2")

    def cover(remaining: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
        if not remaining:
            yield ()
            return
        head, others = remaining[0], remaining[1:]
        for size in range(2, len(remaining) + 1):
            if size != 2 and size % 2 == 0:
                continue
            for mates in itertools.combinations(others, size - 1):
                left = tuple(v for v in others if v not in mates)
                for edges in _cycles_on((head,) + mates):
                    for tail in cover(left):
                        yield edges + tail

    for edges in cover(tuple(range(n))):
        yield Collection.from_masks(n, list(edges))


def harvest_lambda(result: EnumerationResult, m: int) -> LambdaSet:
    """Weight classes of the size-m collections of a complete enumeration"""
    if not result.complete:
        raise PreconditionError("Weight classes can only be harvested from a complete enumeration")
    if not 1 <= m <= result.n:
        raise ValueError(f"m must lie in 1..{result.n}, got {m}")
    vectors = [item.weights for item in result.items if item.collection.size == m]
    return LambdaSet.from_vectors(m, vectors)
