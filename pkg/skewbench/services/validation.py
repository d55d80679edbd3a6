"""
Per-trial assertion bookkeeping for experiment runs.

Orderings are checked once per seed (or per setting and seed) and reported
with their pass counts; nothing is averaged before checking.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

from skewbench.models.experiment import CheckResult

logger = logging.getLogger(__name__)


def majority(trials: int) -> int:
    return trials // 2 + 1


def strictly_increasing(values: Sequence[float]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def non_decreasing(values: Sequence[float]) -> bool:
    return all(a <= b for a, b in zip(values, values[1:]))


def relative_match(a: float, b: float, tolerance: float) -> bool:
    scale = max(abs(a), abs(b))
    if scale == 0:
        return True
    return abs(a - b) <= tolerance * scale


@dataclass
class CheckSuite:
    """Collects trial outcomes per named check."""

    descriptions: Dict[str, str] = field(default_factory=dict)
    outcomes: Dict[str, List[bool]] = field(default_factory=dict)
    requirements: Dict[str, Optional[int]] = field(default_factory=dict)

    def declare(self, name: str, description: str, required: Optional[int] = None) -> None:
        """Register a check; required=None means a majority of its trials."""
        self.descriptions.setdefault(name, description)
        self.outcomes.setdefault(name, [])
        self.requirements.setdefault(name, required)

    def record(self, name: str, outcome: bool) -> None:
        self.outcomes[name].append(bool(outcome))

    def record_all(self, name: str, outcomes: Iterable[bool]) -> None:
        for outcome in outcomes:
            self.record(name, outcome)

    def require_all(self, name: str, description: str) -> None:
        self.declare(name, description, required=-1)

    def results(self) -> List[CheckResult]:
        results = []
        for name, outcomes in self.outcomes.items():
            trials = len(outcomes)
            if trials == 0:
                continue
            required = self.requirements[name]
            if required is None:
                required = majority(trials)
            elif required < 0:
                required = trials
            result = CheckResult(
                name=name,
                description=self.descriptions[name],
                passes=sum(outcomes),
                trials=trials,
                required=required,
            )
            if not result.passed:
                logger.warning(
                    "Check failed",
                    extra={"check": name, "passes": result.passes, "trials": trials},
                )
            results.append(result)
        return results
