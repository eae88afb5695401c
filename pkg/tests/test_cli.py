"""
Tests for the command-line interface
"""

import json

import pytest

from balanced import golden
from balanced.config import config
from balanced.main import EXIT_MISMATCH, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main


@pytest.fixture
def run(tmp_path, monkeypatch, capsys):
    """Invoke the CLI in-process and return (exit code, parsed stdout)"""
    monkeypatch.setattr(config, "CACHE_DIR", config.CACHE_DIR)
    monkeypatch.setattr(config, "EXTENDED", False)

    def _run(*argv, parse=True):
        code = main(["--log-file", "", "--log-level", "WARNING", "--jobs", "1", "--cache", str(tmp_path / "cache"), *argv])
        out = capsys.readouterr().out
        if parse and out.strip():
            return code, json.loads(out)
        return code, out

    return _run


def _write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.mark.integration
class TestCount:
    """Test cases for the count command"""

    def test_single_size(self, run):
        """Test B_{6,4} by the counting formula"""
        code, payload = run("count", "--n", "6", "--m", "4", "--method", "formula")
        assert code == EXIT_OK
        assert payload["count"] == 1910

    def test_all_sizes(self, run):
        """Test the full row for n = 4"""
        code, payload = run("count", "--n", "4")
        assert payload["per_m"] == [1, 7, 12, 22]
        assert payload["total"] == 42

    def test_methods_agree(self, run):
        """Test closed forms, formula and enumeration on n = 4"""
        for method in ("formula", "closed-form", "enumerate"):
            code, payload = run("count", "--n", "4", "--m", "3", "--method", method)
            assert payload["count"] == 12, method

    def test_csv(self, run):
        """Test CSV output"""
        code, out = run("count", "--n", "3", "--format", "csv", parse=False)
        assert out.splitlines() == ["n,m,B", "3,1,1", "3,2,3", "3,3,2"]

    def test_invalid_m(self, run):
        """Test m beyond n is a usage error"""
        code, _ = run("count", "--n", "3", "--m", "5")
        assert code == EXIT_USAGE

    def test_closed_form_range(self, run):
        """Test closed forms stop at m = 4"""
        code, _ = run("count", "--n", "6", "--m", "5", "--method", "closed-form")
        assert code == EXIT_USAGE


@pytest.mark.integration
class TestEnumerate:
    """Test cases for the enumerate command"""

    def test_summary(self, run):
        """Test the enumeration summary"""
        code, payload = run("enumerate", "--n", "3")
        assert code == EXIT_OK
        assert payload["total"] == 6
        assert payload["per_m"] == [1, 3, 2]
        assert payload["complete"] is True

    def test_out_file(self, run, tmp_path):
        """Test JSON-lines output"""
        out = tmp_path / "mbc4.jsonl"
        code, payload = run("enumerate", "--n", "4", "--mode", "lambda-route", "--out", str(out))
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert len(lines) == payload["total"] == 42
        assert json.loads(lines[0]) == {"n": 4, "sets": [[1, 2, 3, 4]], "weights": ["1"]}

    def test_two_element(self, run):
        """Test the 2-element census"""
        code, payload = run("enumerate", "--n", "5", "--two-element")
        assert payload["by_shape"] == {"2+3": 10, "5": 12}
        assert payload["total"] == 22

    def test_seven_needs_out(self, run):
        """Test n = 7 is refused without a stream target"""
        code, _ = run("enumerate", "--n", "7")
        assert code == EXIT_USAGE

    def test_budget(self, run):
        """Test an exhausted budget exits 3 with a partial summary"""
        code, payload = run("enumerate", "--n", "4", "--node-budget", "5")
        assert code == EXIT_RESOURCE
        assert payload["complete"] is False

    def test_unknown_mode(self, run):
        """Test argparse rejects unknown modes"""
        code, _ = run("enumerate", "--n", "3", "--mode", "guess", parse=False)
        assert code == EXIT_USAGE


@pytest.mark.integration
class TestLambdaOrbitCore:
    """Test cases for the lambda, orbit and core commands"""

    def test_lambda(self, run):
        """Test the classes for m = 3"""
        code, payload = run("lambda", "--m", "3", "--oracle")
        assert code == EXIT_OK
        assert payload["class_count"] == 2
        assert payload["oracle_agrees"] is True
        assert ["1/2", "1/2", "1/2"] in [c["vector"] for c in payload["classes"]]

    def test_orbit_columns(self, run):
        """Test the orbit of the triangle from inline columns"""
        code, payload = run("orbit", "--columns", "[[1, 2], [1, 3], [2, 3]]", "--n", "3")
        assert code == EXIT_OK
        assert payload["size_nonzero"] == 5
        assert payload["size_positive"] == 2
        assert payload["unificator_count"] == 3

    def test_orbit_file(self, run, tmp_path):
        """Test the orbit from a matrix file with every member"""
        path = _write(tmp_path / "m.json", {"n": 2, "columns": [[1], [2]]})
        code, payload = run("orbit", "--matrix", path, "--full")
        assert len(payload["members"]) == 4

    def test_orbit_needs_input(self, run):
        """Test the orbit command needs a matrix"""
        code, _ = run("orbit")
        assert code == EXIT_USAGE

    def test_orbit_singular(self, run):
        """Test matrices without a unique weight vector are refused"""
        code, _ = run("orbit", "--columns", "[[1, 2], [1, 2]]", "--n", "2")
        assert code == EXIT_USAGE

    def test_core_lp(self, run, tmp_path):
        """Test the majority game by LP"""
        path = _write(tmp_path / "g.json", {"n": 3, "v": ["0", "0", "0", "1", "0", "1", "1", "1"]})
        code, payload = run("core", "--game", path, "--method", "lp")
        assert code == EXIT_OK
        assert payload["nonempty"] is False
        assert payload["slack"] == "1/2"
        assert payload["violating"]["sets"] == [[1, 2], [1, 3], [2, 3]]

    def test_core_from_file(self, run, tmp_path):
        """Test the balanced-collection test with collections read from disk"""
        mbc = tmp_path / "mbc3.jsonl"
        run("enumerate", "--n", "3", "--out", str(mbc))
        path = _write(tmp_path / "g.json", {"n": 3, "v": ["0", "0", "0", "1", "0", "1", "1", "3/2"]})
        code, payload = run("core", "--game", path, "--mbc", str(mbc))
        assert code == EXIT_OK
        assert payload["nonempty"] is True
        assert payload["allocation"] == ["1/2", "1/2", "1/2"]

    def test_core_bad_game(self, run, tmp_path):
        """Test a malformed game document"""
        path = _write(tmp_path / "g.json", {"n": 2, "v": ["0", "1"]})
        code, _ = run("core", "--game", path)
        assert code == EXIT_USAGE


@pytest.mark.integration
class TestVerifyAndBench:
    """Test cases for the verify and bench commands"""

    def test_verify_pass(self, run):
        """Test a passing suite"""
        code, payload = run("verify", "--suite", "formulas", "--max-n", "5")
        assert code == EXIT_OK
        assert payload["passed"] is True
        assert payload["suites"][0]["name"] == "formulas"

    def test_verify_extended_leaves_config(self, run):
        """Test --extended reaches the runner without touching the global config"""
        code, payload = run("verify", "--suite", "formulas", "--max-n", "4", "--extended")
        assert code == EXIT_OK
        assert payload["passed"] is True
        assert config.EXTENDED is False

    def test_verify_mismatch(self, run, monkeypatch):
        """Test a failing suite exits 1"""
        monkeypatch.setitem(golden.TOTALS, 3, 7)
        code, payload = run("verify", "--suite", "tables", "--max-n", "3")
        assert code == EXIT_MISMATCH
        assert payload["passed"] is False

    def test_bench(self, run):
        """Test benchmark rows"""
        code, payload = run("bench", "--max-n", "2", "--routes", "formula", "search")
        assert code == EXIT_OK
        assert [(r["n"], r["route"], r["total"]) for r in payload["runs"]] == [
            (1, "formula", 1),
            (1, "search", 1),
            (2, "formula", 2),
            (2, "search", 2),
        ]


@pytest.mark.integration
class TestParser:
    """Test cases for global options"""

    def test_no_command(self, run):
        """Test a missing subcommand"""
        code, _ = run(parse=False)
        assert code == EXIT_USAGE

    def test_version(self, capsys):
        """Test --version exits cleanly"""
        assert main(["--version"]) == EXIT_OK
        assert capsys.readouterr().out.strip().endswith("1.0.0")

    def test_bad_jobs(self, run):
        """Test a zero worker count fails validation"""
        code = main(["--log-file", "", "--jobs", "0", "count", "--n", "2"])
        assert code == EXIT_USAGE
