"""
Unit tests for the verification suites
"""

import pytest

from balanced import golden
from balanced.services.verify_service import DEFAULT_SCOPES, SUITES, VerifyRunner, run_suite


@pytest.fixture
def runner(store):
    return VerifyRunner(store=store, jobs=1, extended=False, seed=1, samples=5)


@pytest.mark.unit
class TestVerifySuites:
    """Test cases for individual suites at small scopes"""

    def test_tables(self, runner):
        """Test count tables against the published values"""
        report = run_suite("tables", runner, 4)
        assert report.passed
        assert report.checked > 0
        assert report.scope == 4

    def test_formulas(self, runner):
        """Test closed forms against counts"""
        assert run_suite("formulas", runner, 6).passed

    def test_bounds(self, runner):
        """Test bound checks with scans up to n = 3"""
        report = run_suite("bounds", runner, 3)
        assert report.passed, report.diffs

    def test_orbits(self, runner):
        """Test orbit formulas on every small matrix"""
        assert run_suite("orbits", runner, 3).passed

    def test_lambda(self, runner):
        """Test generated classes against the oracle and harvests"""
        assert run_suite("lambda", runner, 4).passed

    def test_two_element(self, runner):
        """Test the 2-element census"""
        assert run_suite("two-element", runner, 5).passed

    def test_games(self, runner):
        """Test the two core oracles agree on sampled games"""
        report = run_suite("games", runner, 3)
        assert report.passed
        # five samples plus the majority family, two checks each
        assert report.checked == 18

    def test_oracles(self, runner):
        """Test the rank certificate against the definition on small collections"""
        report = run_suite("oracles", runner, 3)
        assert report.passed, report.diffs
        # a collection count and an agreement check per n
        assert report.checked == 6

    @pytest.mark.slow
    def test_oracles_four_players(self, runner):
        """Test every collection of at most five coalitions on four players"""
        assert run_suite("oracles", runner, 4).passed

    def test_mismatch_reported(self, runner, monkeypatch):
        """Test a wrong reference value shows up as a diff"""
        monkeypatch.setitem(golden.TOTALS, 3, 7)
        report = run_suite("tables", runner, 3)
        assert not report.passed
        assert [d.key for d in report.diffs] == ["B_3"]
        assert report.diffs[0].expected == "7"
        assert report.diffs[0].computed == "6"

    def test_unknown_suite(self, runner):
        """Test suite name validation"""
        with pytest.raises(ValueError, match="Unknown suite"):
            run_suite("everything", runner)

    def test_default_scopes(self):
        """Test every suite has a default scope"""
        assert set(DEFAULT_SCOPES) == set(SUITES)

    @pytest.mark.slow
    def test_bounds_default_scope(self, runner):
        """Test bound checks at their default scope"""
        assert run_suite("bounds", runner).passed

    @pytest.mark.slow
    def test_orbits_sampled(self, runner):
        """Test sampled lifts at n = 5 and 6"""
        assert run_suite("orbits", runner, 6).passed

    @pytest.mark.extended
    def test_all_extended(self, store):
        """Test every suite at its default scope in extended mode"""
        extended = VerifyRunner(store=store, extended=True)
        for name in SUITES:
            assert run_suite(name, extended).passed, name
