"""
Verification suites comparing computed values against golden tables and independent oracles
"""

import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from balanced import golden
from balanced.config import config
from balanced.models import (
    BalanceKind,
    Collection,
    CountTable,
    MatrixSpaceScan,
    TUGame,
    VerifyDiff,
    VerifySuiteReport,
    ZeroOneMatrix,
)
from balanced.services import counting_service, enumeration_service, game_service, orbit_service, weights_service
from balanced.services.model_service import definition_minimality_oracle, minimality_certificate
from balanced.services.storage_service import LambdaCacheStore
from balanced.utils.logging_utils import Stopwatch, get_logger
from balanced.utils.parallel_utils import run_tasks

logger = get_logger(__name__)

SUITES = ("tables", "formulas", "bounds", "orbits", "lambda", "two-element", "games", "oracles")


class _Tally:
    """Counts checks and records mismatches as diffs"""

    def __init__(self):
        self.checked = 0
        self.diffs: List[VerifyDiff] = []

    def check(self, key: str, expected, computed) -> bool:
        self.checked += 1
        if expected != computed:
            self.diffs.append(VerifyDiff(key=key, expected=str(expected), computed=str(computed)))
            return False
        return True

    def require(self, key: str, condition: bool, detail: str = "") -> bool:
        return self.check(key, True, condition if condition else f"False {detail}".strip())

    def report(self, name: str, scope: int) -> VerifySuiteReport:
        return VerifySuiteReport(name=name, scope=scope, passed=not self.diffs, checked=self.checked, diffs=tuple(self.diffs))


def _minimality_agreement(task: Tuple[int, Tuple[Tuple[int, ...], ...]]) -> List[Tuple[int, ...]]:
    """Collections where the rank certificate and the definition oracle disagree"""
    n, combos = task
    disagreements = []
    for sets in combos:
        c = Collection.from_masks(n, sets)
        by_rank = minimality_certificate(c).kind is BalanceKind.MINIMAL_BALANCED
        if by_rank != definition_minimality_oracle(c):
            disagreements.append(sets)
    return disagreements


class VerifyRunner:
    """Runs verification suites with shared cache, worker count and randomness"""

    def __init__(
        self,
        store: Optional[LambdaCacheStore] = None,
        jobs: Optional[int] = None,
        extended: Optional[bool] = None,
        seed: Optional[int] = None,
        samples: Optional[int] = None,
    ):
        self.store = store
        self.jobs = jobs
        self.extended = config.EXTENDED if extended is None else extended
        self.rng = random.Random(config.RANDOM_SEED if seed is None else seed)
        self.samples = samples
        self._tables: Dict[int, CountTable] = {}

    def _count_table(self, n: int) -> CountTable:
        if n not in self._tables:
            self._tables[n] = counting_service.count_b_total(n, store=self.store, jobs=self.jobs, extended=self.extended)
        return self._tables[n]

    def _enumeration_limit(self) -> int:
        return config.MAX_ENUMERATION_N if self.extended else 5

    def tables(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        for n in range(1, max_n + 1):
            if n > config.MAX_ENUMERATION_N and not self.extended:
                break
            table = self._count_table(n)
            tally.check(f"B_{n}", golden.TOTALS[n], table.total)
            if n in golden.BY_SIZE:
                for m, (expected, computed) in enumerate(zip(golden.BY_SIZE[n], table.per_m), start=1):
                    tally.check(f"B_{n},{m}", expected, computed)
            if n <= self._enumeration_limit():
                result = enumeration_service.enumerate_minimal(n, mode="lambda-route", jobs=self.jobs)
                tally.check(f"enumerated per_m n={n}", table.per_m, result.per_m_counts)
        return tally.report("tables", max_n)

    def formulas(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        for m in range(1, 5):
            for n in range(m, max_n + 1):
                tally.check(
                    f"closed_form({n},{m})",
                    counting_service.count_b(n, m, store=self.store, jobs=self.jobs),
                    counting_service.closed_form(n, m),
                )
        return tally.report("formulas", max_n)

    def bounds(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        previous = None
        for terms in range(1, 61):
            alpha = counting_service.alpha_constant(terms)
            if previous is not None:
                tally.require(f"alpha decreasing at {terms}", alpha < previous)
            previous = alpha
        in_range = Fraction(2887, 10000) <= previous <= Fraction(2889, 10000)
        tally.require("alpha in [0.2887, 0.2889]", in_range, str(float(previous)))

        # computed totals inside the scope, golden totals beyond it
        for n in range(3, max(golden.TOTALS) + 1):
            b_n = self._count_table(n).total if n <= min(max_n, config.MAX_ENUMERATION_N) else golden.TOTALS[n]
            report = counting_service.theorem1_bounds(n, b_n)
            tally.require(f"total bounds n={n}", report.holds, f"{report.lower_approx} < {b_n} < {report.upper_approx}")

        for n in range(2, min(max_n, config.MAX_ENUMERATION_N) + 1):
            for check in counting_service.bound_ladder(self._count_table(n)).checks:
                tally.require(f"{check.name} n={n} m={check.m}", check.holds, f"margin {check.margin}")

        for n in range(1, min(max_n, 5 if self.extended else 4) + 1):
            scans: Dict[int, MatrixSpaceScan] = {}
            for m in range(1, n + 1):
                if n * m <= config.MAX_SCAN_CELLS:
                    scans[m] = enumeration_service.scan_matrix_space(n, m, jobs=self.jobs)
            if not scans:
                continue
            for m, scan in scans.items():
                tally.check(f"|I>0| n={n} m={m}", math.factorial(m) * self._count_table(n).per_m[m - 1], scan.positive)
            for check in counting_service.bound_lemma_checks(n, scans).checks:
                tally.require(f"{check.name} n={n} m={check.m}", check.holds, f"margin {check.margin}")
        return tally.report("bounds", max_n)

    def _check_orbit(self, tally: _Tally, n: int, columns) -> None:
        M = ZeroOneMatrix(n=n, columns=tuple(columns))
        summary = orbit_service.orbit_summary(M, full=True)
        key = f"orbit {M.to_payload()['columns']} n={n}"
        tally.check(f"{key} nonzero", (1 << M.m) - summary.unificator_count, summary.size_nonzero)
        if M.m >= 2:
            tally.check(f"{key} positive", 2, summary.size_positive)
        for member in summary.members:
            if member.classification in ("positive", "nonzero"):
                size = weights_service.unificators(member.weights).size
                tally.check(f"{key} |U| under I={member.inversion}", summary.unificator_count, size)

    def orbits(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        exhaustive = min(max_n, 4 if self.extended else 3)
        for n in range(1, exhaustive + 1):
            for m in range(1, n + 1):
                for columns, weights in enumeration_service.iter_matrix_space(n, m):
                    if all(w != 0 for w in weights):
                        self._check_orbit(tally, n, columns)

        for n in range(1, min(max_n, 4) + 1):
            lifts = {orbit_service.f2_lift(n, A) for A in orbit_service.iter_f2_full_rank(n, n)}
            tally.check(f"distinct lifts n={n}", orbit_service.count_f2_matrices(n, n), len(lifts))

        samples = self.samples if self.samples is not None else (10_000 if self.extended else 100)
        for n in (5, 6):
            if n > max_n:
                continue
            for _ in range(samples):
                A = orbit_service.random_f2_full_rank(n, n, self.rng)
                self._check_orbit(tally, n, orbit_service.f2_lift(n, A).columns)
        return tally.report("orbits", max_n)

    def lambda_sets(self, max_m: int) -> VerifySuiteReport:
        tally = _Tally()
        for m in range(1, max_m + 1):
            generated = weights_service.generate_lambda(m, store=self.store, jobs=self.jobs)
            if m <= config.MAX_LAMBDA_ORACLE_M and (m <= 4 or self.extended):
                oracle = weights_service.lambda_bruteforce_oracle(m, jobs=self.jobs)
                tally.check(f"Lambda_{m} classes", sorted(oracle.keys()), sorted(generated.keys()))
            if m <= 6:
                extremes = weights_service.unificator_extremes(generated)
                tally.check(f"min |U| m={m}", m, extremes.min_size)
                tally.check(f"max |U| m={m}", math.comb(m, (m + 1) // 2), extremes.max_size)
                tally.check(f"antichain violations m={m}", 0, extremes.antichain_violations)

        for n in range(1, min(max_m, self._enumeration_limit()) + 1):
            result = enumeration_service.enumerate_minimal(n, mode="search", jobs=self.jobs)
            for m in range(1, n + 1):
                harvested = enumeration_service.harvest_lambda(result, m).keys()
                generated = weights_service.generate_lambda(m, store=self.store, jobs=self.jobs).keys()
                missing = str(sorted(harvested - generated))
                tally.require(f"harvest n={n} m={m} within Lambda_{m}", harvested <= generated, missing)
        return tally.report("lambda", max_m)

    def two_element(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        for n in range(2, min(max_n, config.MAX_TWO_ELEMENT_N) + 1):
            census = enumeration_service.enumerate_two_element(n).total
            if n in golden.TWO_ELEMENT:
                tally.check(f"two-element n={n}", golden.TWO_ELEMENT[n], census)
            if n <= 7:
                graphs = sum(1 for _ in enumeration_service.iter_two_element_graphs(n))
                tally.check(f"two-element graphs n={n}", census, graphs)
            if n <= self._enumeration_limit():
                result = enumeration_service.enumerate_minimal(n, mode="lambda-route", jobs=self.jobs)
                pairs_only = sum(1 for item in result.items if all(bin(s).count("1") == 2 for s in item.collection.sets))
                tally.check(f"two-element from enumeration n={n}", census, pairs_only)
        return tally.report("two-element", max_n)

    def _compare_game(self, tally: _Tally, key: str, g: TUGame, mbcs) -> None:
        by_collections = game_service.core_nonempty_bondareva(g, mbcs)
        by_lp = game_service.core_nonempty_lp(g)
        tally.check(f"{key} verdict", by_lp.nonempty, by_collections.nonempty)
        scaled = game_service.scale_game(g, Fraction(7, 3))
        tally.check(f"{key} scaled verdict", by_lp.nonempty, game_service.core_nonempty_lp(scaled).nonempty)

    def games(self, max_n: int) -> VerifySuiteReport:
        tally = _Tally()
        samples = self.samples if self.samples is not None else (1000 if self.extended else 50)
        for n in range(3, min(max_n, 5) + 1):
            mbcs = enumeration_service.enumerate_minimal(n, mode="lambda-route", jobs=self.jobs)
            for k in range(samples):
                kind = game_service.GAME_KINDS[k % len(game_service.GAME_KINDS)]
                self._compare_game(tally, f"n={n} {kind} #{k}", game_service.random_game(n, self.rng, kind), mbcs)
            if n == 3:
                for grand in (Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(2)):
                    v = [Fraction(0)] * 8
                    v[3] = v[5] = v[6] = Fraction(1)
                    v[7] = grand
                    self._compare_game(tally, f"majority v(N)={grand}", TUGame(n=3, v=tuple(v)), mbcs)
        return tally.report("games", max_n)

    def oracles(self, max_n: int) -> VerifySuiteReport:
        """Rank certificate against the definition on every collection of at most n + 1 coalitions"""
        tally = _Tally()
        batch_size = 512
        for n in range(1, min(max_n, 4) + 1):
            combos = [
                sets for size in range(1, n + 2) for sets in itertools.combinations(range(1, 1 << n), size)
            ]
            tasks = [(n, tuple(combos[i : i + batch_size])) for i in range(0, len(combos), batch_size)]
            disagreements = [sets for found in run_tasks(_minimality_agreement, tasks, self.jobs) for sets in found]
            tally.check(f"collections n={n}", sum(math.comb((1 << n) - 1, k) for k in range(1, n + 2)), len(combos))
            tally.check(f"certificate vs definition n={n}", [], disagreements[:20])
        return tally.report("oracles", max_n)


DEFAULT_SCOPES = {
    "tables": 5,
    "formulas": 10,
    "bounds": 5,
    "orbits": 4,
    "lambda": 4,
    "two-element": 7,
    "games": 5,
    "oracles": 4,
}


def run_suite(name: str, runner: VerifyRunner, max_n: Optional[int] = None) -> VerifySuiteReport:
    """Run one suite at max_n (or its default scope) and log the outcome"""
    suites: Dict[str, Callable[[int], VerifySuiteReport]] = {
        "tables": runner.tables,
        "formulas": runner.formulas,
        "bounds": runner.bounds,
        "orbits": runner.orbits,
        "lambda": runner.lambda_sets,
        "two-element": runner.two_element,
        "games": runner.games,
        "oracles": runner.oracles,
    }
    if name not in suites:
        raise ValueError(f"Unknown suite '{name}', expected one of {', '.join(SUITES)} or all")
    scope = DEFAULT_SCOPES[name] if max_n is None else max_n
    watch = Stopwatch()
    report = suites[name](scope)
    status = "passed" if report.passed else f"FAILED with {len(report.diffs)} diffs"
    logger.info(f"[Verify] Suite {name} (scope {scope}) {status}: {report.checked} checks in {watch}")
    return report
