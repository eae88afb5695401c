"""
Unit tests for utility functions
"""

import logging
import random
from fractions import Fraction

import pytest

from balanced.utils.exact_utils import (
    F2Basis,
    F2Matrix,
    IncrementalBasis,
    QMatrix,
    SolveStatus,
    distinct_permutations,
    format_rational,
    kernel_vector,
    mask_members,
    mask_vector,
    members_mask,
    parse_rational,
    rank_f2,
    rank_of_masks,
    rank_q,
    satisfies_ones,
    solve_columns,
    solve_rows,
    solve_unique,
    subset_sums,
)
from balanced.utils.logging_utils import Stopwatch, get_logger, setup_logging
from balanced.utils.lp_utils import LPStatus, solve_lp
from balanced.utils.parallel_utils import resolve_jobs, run_tasks

HALF = Fraction(1, 2)


def _square(x: int) -> int:
    return x * x


@pytest.mark.unit
class TestRationalHelpers:
    """Test cases for rational parsing and mask helpers"""

    def test_parse_rational(self):
        """Test parsing of exact literals"""
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational(" -2/6 ") == Fraction(-1, 3)
        assert parse_rational(5) == Fraction(5)
        assert parse_rational(Fraction(1, 7)) == Fraction(1, 7)

    def test_parse_rational_rejects_inexact(self):
        """Test that floats, booleans and decimal strings are rejected"""
        with pytest.raises(TypeError):
            parse_rational(0.5)
        with pytest.raises(TypeError):
            parse_rational(True)
        with pytest.raises(ValueError):
            parse_rational("0.5")

    def test_format_rational(self):
        """Test p/q formatting"""
        assert format_rational(Fraction(2, 4)) == "1/2"
        assert format_rational(Fraction(3)) == "3"

    def test_masks(self):
        """Test conversion between masks, members and vectors"""
        assert mask_members(0b101) == [1, 3]
        assert members_mask([1, 3]) == 0b101
        assert mask_vector(0b110, 3) == (0, 1, 1)
        with pytest.raises(ValueError):
            members_mask([0])

    def test_distinct_permutations(self):
        """Test multinomial count of orderings"""
        assert distinct_permutations((HALF, HALF, HALF)) == 1
        assert distinct_permutations((Fraction(2, 3), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))) == 4
        assert distinct_permutations((1, 2, 3)) == 6

    def test_subset_sums(self):
        """Test subset sums indexed by mask"""
        sums = subset_sums((Fraction(1), HALF, Fraction(1, 3)))
        assert sums[0] == 0
        assert sums[0b011] == Fraction(3, 2)
        assert sums[0b111] == Fraction(11, 6)


@pytest.mark.unit
class TestRationalRank:
    """Test cases for rank and solving over the rationals"""

    def test_rank_identity(self):
        """Test rank of the 4×4 identity"""
        assert rank_q(QMatrix([[int(i == j) for j in range(4)] for i in range(4)])) == 4

    def test_rank_repeated_column(self):
        """Test rank of the all-ones 3×2 matrix"""
        assert rank_q(QMatrix([[1, 1]] * 3)) == 1

    def test_rank_pairs(self):
        """Test rank of the three pairs in dimension 3"""
        assert rank_q(QMatrix.from_columns([0b011, 0b101, 0b110], 3)) == 3

    def test_rank_empty_matrix(self):
        """Test that the empty matrix is rejected"""
        with pytest.raises(ValueError):
            rank_q(QMatrix([]))

    def test_rank_of_masks(self):
        """Test incremental rank of mask vectors"""
        assert rank_of_masks([0b01, 0b10, 0b11], 2) == 2
        assert rank_of_masks([0b11, 0b11], 2) == 1

    def test_solve_partition(self):
        """Test solving a disjoint partition"""
        result = solve_unique(QMatrix.from_columns([0b001, 0b110], 3))
        assert result.status is SolveStatus.UNIQUE
        assert result.weights == (1, 1)

    def test_solve_pairs(self):
        """Test solving the three pairs"""
        result = solve_unique(QMatrix.from_columns([0b011, 0b101, 0b110], 3))
        assert result.weights == (HALF, HALF, HALF)

    def test_solve_rank_deficient(self):
        """Test that {1},{2},{1,2} has no unique solution"""
        result = solve_unique(QMatrix.from_columns([0b01, 0b10, 0b11], 2))
        assert result.status is SolveStatus.RANK_DEFICIENT
        assert result.weights is None
        assert not result.found

    def test_solve_inconsistent(self):
        """Test an independent system with no solution"""
        result = solve_columns([0b01, 0b11], 3)
        assert result.status is SolveStatus.INCONSISTENT

    def test_solve_custom_rhs(self):
        """Test solving against a given right-hand side"""
        result = solve_unique(QMatrix([[2, 0], [0, 3]]), ["1", "1"])
        assert result.weights == (HALF, Fraction(1, 3))

    def test_solve_rows_matches_columns(self):
        """Test that row and column entry points agree"""
        columns = [0b011, 0b101, 0b110]
        rows = [0b011, 0b101, 0b110]
        assert solve_rows(rows, 3).weights == solve_columns(columns, 3).weights

    def test_kernel_vector(self):
        """Test a kernel vector of a dependent matrix"""
        M = QMatrix.from_columns([0b01, 0b10, 0b11], 2)
        d = kernel_vector(M)
        assert any(d)
        assert M.multiply(d) == (0, 0)
        assert kernel_vector(QMatrix.from_columns([0b01, 0b10], 2)) is None

    def test_random_solutions_substitute(self):
        """Test that every found solution reproduces the ones vector exactly"""
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(1, 6)
            columns = [rng.randrange(1, 1 << n) for _ in range(rng.randint(1, n))]
            result = solve_columns(columns, n)
            if result.found:
                assert satisfies_ones(columns, n, result.weights)
                assert QMatrix.from_columns(columns, n).multiply(result.weights) == (1,) * n

    def test_rank_permutation_invariant(self):
        """Test that permuting rows and columns keeps the rank"""
        rng = random.Random(11)
        for _ in range(100):
            rows = [[rng.randint(0, 1) for _ in range(5)] for _ in range(5)]
            shuffled = [row[:] for row in rows]
            rng.shuffle(shuffled)
            order = list(range(5))
            rng.shuffle(order)
            shuffled = [[row[j] for j in order] for row in shuffled]
            assert rank_q(QMatrix(rows)) == rank_q(QMatrix(shuffled))


@pytest.mark.unit
class TestIncrementalBasis:
    """Test cases for the incremental rational basis"""

    def test_add_and_span_ones(self):
        """Test the ones residual while columns are added"""
        basis = IncrementalBasis(3)
        assert not basis.spans_ones
        basis = basis.add((1, 1, 0))
        assert basis.rank == 1 and not basis.spans_ones
        basis = basis.add((0, 0, 1))
        assert basis.rank == 2 and basis.spans_ones

    def test_dependent_vector(self):
        """Test that dependent vectors are refused"""
        basis = IncrementalBasis(2).add((1, 0)).add((0, 1))
        assert basis.add((1, 1)) is None
        assert basis.contains((3, 5))

    def test_immutable(self):
        """Test that extending leaves the original basis untouched"""
        basis = IncrementalBasis(2)
        extended = basis.add((1, 0))
        assert basis.rank == 0
        assert extended.rank == 1


@pytest.mark.unit
class TestF2:
    """Test cases for linear algebra over the two-element field"""

    def test_rank_identity(self):
        """Test rank of the 5×5 identity"""
        assert rank_f2(F2Matrix([1 << i for i in range(5)], 5)) == 5

    def test_rank_equal_rows(self):
        """Test rank of two equal rows"""
        assert rank_f2(F2Matrix.from_bits([[1, 1], [1, 1]])) == 1

    def test_rank_rows_xor_to_zero(self):
        """Test rows 110, 011, 101"""
        M = F2Matrix.from_bits([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert rank_f2(M) == 2
        assert rank_q(QMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 3

    def test_columns_round_trip(self):
        """Test column view of a packed matrix"""
        M = F2Matrix.from_columns([0b011, 0b110], 3)
        assert M.columns() == (0b011, 0b110)
        assert M.nrows == 3 and M.cols == 2

    def test_invalid_bits(self):
        """Test that non 0-1 entries are rejected"""
        with pytest.raises(ValueError):
            F2Matrix.from_bits([[1, 2]])

    def test_f2_rank_at_most_rational_rank(self):
        """Test rank_f2 ≤ rank_q on random 0-1 matrices"""
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 8)
            bits = [[rng.randint(0, 1) for _ in range(n)] for _ in range(n)]
            assert rank_f2(F2Matrix.from_bits(bits)) <= rank_q(QMatrix(bits))

    def test_basis(self):
        """Test the XOR basis"""
        basis = F2Basis()
        assert basis.add(0b011)
        assert basis.add(0b110)
        assert not basis.add(0b101)
        assert basis.rank == 2


@pytest.mark.unit
class TestLP:
    """Test cases for the exact simplex"""

    def test_optimal(self):
        """Test minimize -x - y with x + y + s = 1"""
        result = solve_lp([-1, -1, 0], [[1, 1, 1]], [1])
        assert result.status is LPStatus.OPTIMAL
        assert result.value == -1

    def test_infeasible(self):
        """Test x = 1 and x = 2"""
        result = solve_lp([0], [[1], [1]], [1, 2])
        assert result.status is LPStatus.INFEASIBLE
        assert not result.feasible

    def test_unbounded(self):
        """Test minimize -x with x - y = 0"""
        assert solve_lp([-1, 0], [[1, -1]], [0]).status is LPStatus.UNBOUNDED

    def test_redundant_rows(self):
        """Test a duplicated constraint"""
        result = solve_lp([1, 1], [[1, 1], [1, 1]], [2, 2])
        assert result.status is LPStatus.OPTIMAL
        assert result.value == 2

    def test_negative_rhs(self):
        """Test rows with negative right-hand sides"""
        result = solve_lp([1], [[-1]], [-3])
        assert result.x == (3,)

    def test_exact_fractional_vertex(self):
        """Test minimize y1 + y2 + y3 with every pair sum ≥ 1"""
        A = [[1, 1, 0, -1, 0, 0], [1, 0, 1, 0, -1, 0], [0, 1, 1, 0, 0, -1]]
        result = solve_lp([1, 1, 1, 0, 0, 0], A, [1, 1, 1])
        assert result.value == Fraction(3, 2)

    def test_mismatched_shapes(self):
        """Test validation of constraint shapes"""
        with pytest.raises(ValueError):
            solve_lp([1, 1], [[1]], [1])


@pytest.mark.unit
class TestParallelUtils:
    """Test cases for process fan-out"""

    def test_resolve_jobs(self):
        """Test worker count resolution"""
        assert resolve_jobs(4) == 4
        assert resolve_jobs(0) == 1
        assert resolve_jobs(None) == 1

    def test_inline(self):
        """Test in-process execution keeps order"""
        assert run_tasks(_square, [3, 1, 2], jobs=1) == [9, 1, 4]

    @pytest.mark.slow
    def test_pool(self):
        """Test worker processes keep task order"""
        assert run_tasks(_square, list(range(20)), jobs=2) == [x * x for x in range(20)]


@pytest.mark.unit
class TestLoggingUtils:
    """Test cases for logging setup"""

    def test_setup_console_only(self):
        """Test that an empty log file disables the file handler"""
        logger = setup_logging(log_file="", log_level="WARNING")
        assert logger.name == "balanced"
        assert logger.level == logging.WARNING
        assert len(logger.handlers) == 1

    def test_setup_with_file(self, tmp_path):
        """Test rotating file handler creation"""
        log_file = tmp_path / "logs" / "run.log"
        logger = setup_logging(log_file=str(log_file), log_level="DEBUG")
        assert len(logger.handlers) == 2
        logger.info("[Test] hello")
        for handler in logger.handlers:
            handler.flush()
        assert log_file.exists()
        setup_logging(log_file="", log_level="INFO")

    def test_get_logger(self):
        """Test module loggers live under the package logger"""
        assert get_logger("balanced.services.model_service").parent.name in ("balanced", "balanced.services")

    def test_stopwatch(self):
        """Test elapsed time formatting for log lines"""
        watch = Stopwatch()
        assert watch.seconds >= 0
        assert str(watch).endswith("s")
        assert float(str(watch)[:-1]) >= 0
