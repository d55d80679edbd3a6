import pytest

from skewbench.services.validation import (
    CheckSuite,
    majority,
    non_decreasing,
    relative_match,
    strictly_increasing,
)


class TestOrderingHelpers:
    """Tests for the comparison helpers."""

    @pytest.mark.parametrize("trials,expected", [(1, 1), (2, 2), (3, 2), (4, 3), (5, 3)])
    def test_majority(self, trials, expected):
        """Test more than half of the trials."""
        assert majority(trials) == expected

    def test_strictly_increasing(self):
        """Test ties break strict increase."""
        assert strictly_increasing([0.1, 0.2, 0.3])
        assert not strictly_increasing([0.1, 0.1, 0.3])
        assert strictly_increasing([0.5])

    def test_non_decreasing(self):
        """Test ties keep a non-decreasing order."""
        assert non_decreasing([0.1, 0.1, 0.3])
        assert not non_decreasing([0.2, 0.1])

    def test_relative_match(self):
        """Test tolerance scales with the larger magnitude."""
        assert relative_match(1.0, 1.0 + 1e-10, 1e-9)
        assert not relative_match(1.0, 1.1, 1e-9)
        assert relative_match(0.0, 0.0, 1e-9)


class TestCheckSuite:
    """Tests for per-trial check bookkeeping."""

    def test_majority_requirement(self):
        """Test an undeclared requirement needs a majority of trials."""
        suite = CheckSuite()
        suite.declare("order", "values increase")
        suite.record_all("order", [True, False, True])
        (result,) = suite.results()
        assert (result.passes, result.trials, result.required) == (2, 3, 2)
        assert result.passed

    def test_require_all(self, caplog):
        """Test require_all fails on one bad trial and logs a warning."""
        suite = CheckSuite()
        suite.require_all("match", "values agree")
        suite.record_all("match", [True, True, False])
        with caplog.at_level("WARNING", logger="skewbench.services.validation"):
            (result,) = suite.results()
        assert result.required == 3
        assert not result.passed
        assert "Check failed" in caplog.text

    def test_explicit_requirement(self):
        """Test a fixed pass count."""
        suite = CheckSuite()
        suite.declare("loose", "at least one", required=1)
        suite.record_all("loose", [False, False, True])
        assert suite.results()[0].passed

    def test_checks_without_trials_are_dropped(self):
        """Test declared checks that never ran are not reported."""
        suite = CheckSuite()
        suite.declare("never", "no trials")
        suite.declare("once", "one trial")
        suite.record("once", True)
        assert [r.name for r in suite.results()] == ["once"]

    def test_redeclare_keeps_first(self):
        """Test declaring twice keeps the first description and recorded outcomes."""
        suite = CheckSuite()
        suite.declare("c", "first")
        suite.record("c", True)
        suite.declare("c", "second")
        (result,) = suite.results()
        assert result.description == "first"
        assert result.trials == 1
