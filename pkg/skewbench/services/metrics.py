"""
Precision/recall evaluation: confusion counts, PR curves with step-rule
AUPR, label-corrected re-scoring, empirical bias checks and ranked
per-anchor reports.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from skewbench.exceptions import DomainError, ValidityError
from skewbench.models.skew import BiasParams, SkewSpec, round_count
from skewbench.services.bias import (
    expected_precision_contaminated_two_class,
    expected_precision_two_class,
)
from skewbench.services.skew import derive_rng

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> Optional[float]:
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else None


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class PRCurve:
    """Operating points in descending threshold order with the step-rule area."""

    points: Tuple[PRPoint, ...]
    aupr: float
    prevalence: float

    @property
    def n_positive(self) -> int:
        first = self.points[0]
        return first.tp + first.fn

    def rows(self) -> List[Dict[str, float]]:
        return [
            {
                "threshold": p.threshold,
                "precision": p.precision,
                "recall": p.recall,
                "tp": p.tp,
                "fp": p.fp,
                "fn": p.fn,
            }
            for p in self.points
        ]


@dataclass(frozen=True)
class ScoredTestSet:
    """Scores with observed and true labels for one test set."""

    ids: np.ndarray
    scores: np.ndarray
    observed: np.ndarray
    true: np.ndarray

    def __len__(self) -> int:
        return int(self.scores.shape[0])

    @property
    def p_tilde(self) -> float:
        return float(self.observed.mean())

    @property
    def q_realized(self) -> float:
        """Hidden positives among observed negatives."""
        negatives = ~self.observed
        if not negatives.any():
            return 0.0
        return float(self.true[negatives].mean())


def _as_binary(labels: Sequence) -> np.ndarray:
    array = np.asarray(labels)
    if array.dtype != bool:
        if not np.isin(array, (0, 1)).all():
            raise DomainError("labels must be binary")
        array = array.astype(bool)
    return array


def _prepare(scores: Sequence[float], labels: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = _as_binary(labels)
    if scores.shape != labels.shape:
        raise DomainError("scores and labels differ in length")
    if scores.size == 0:
        raise DomainError("empty input")
    return scores, labels


def confusion_at_threshold(
    scores: Sequence[float], labels: Sequence, t: float
) -> Confusion:
    """Counts when every score >= t is predicted positive."""
    scores, labels = _prepare(scores, labels)
    predicted = scores >= t
    tp = int((predicted & labels).sum())
    fp = int((predicted & ~labels).sum())
    fn = int((~predicted & labels).sum())
    tn = int(scores.size - tp - fp - fn)
    return Confusion(tp=tp, fp=fp, tn=tn, fn=fn)


def pr_curve(scores: Sequence[float], labels: Sequence) -> PRCurve:
    """
    One operating point per distinct score, highest first; tied instances
    enter together. AUPR = sum of (R_i - R_{i-1}) * P_i with R_0 = 0.
    """
    scores, labels = _prepare(scores, labels)
    n_positive = int(labels.sum())
    if n_positive == 0:
        raise DomainError("undefined recall: no positive labels")

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    hits = np.cumsum(labels[order])
    ends = np.flatnonzero(np.append(sorted_scores[1:] != sorted_scores[:-1], True))

    points: List[PRPoint] = []
    aupr = 0.0
    previous_recall = 0.0
    for end, tp in zip(ends.tolist(), hits[ends].tolist()):
        fp = end + 1 - tp
        precision = tp / (tp + fp)
        recall = tp / n_positive
        aupr += (recall - previous_recall) * precision
        previous_recall = recall
        points.append(
            PRPoint(
                threshold=float(sorted_scores[end]),
                precision=precision,
                recall=recall,
                tp=tp,
                fp=fp,
                fn=n_positive - tp,
            )
        )
    return PRCurve(points=tuple(points), aupr=aupr, prevalence=n_positive / scores.size)


def corrected_pr(
    scores: Sequence[float], observed: Sequence, true: Sequence
) -> Tuple[PRCurve, PRCurve]:
    """Curves under the observed labels and after restoring the true labels."""
    observed = _as_binary(observed)
    true = _as_binary(true)
    if observed.shape != true.shape:
        raise DomainError("observed and true labels differ in length")
    return pr_curve(scores, observed), pr_curve(scores, true)


def threshold_dominance(observed_curve: PRCurve, corrected_curve: PRCurve) -> bool:
    """Corrected precision is at least the observed precision at every shared threshold."""
    if len(observed_curve.points) != len(corrected_curve.points):
        return False
    for seen, fixed in zip(observed_curve.points, corrected_curve.points):
        if seen.threshold != fixed.threshold:
            return False
        if fixed.tp < seen.tp or fixed.fp > seen.fp or fixed.precision < seen.precision:
            return False
    return True


def simulate_channel(
    alpha_pos: float,
    alpha_neg: float,
    p_tilde: float,
    q: float,
    N: int,
    seed: int,
) -> ScoredTestSet:
    """
    Test set scored by a label-flipping classifier with known accuracies.

    round(p_tilde * N) observed positives; round(q * negatives) of the
    observed negatives are hidden positives. Exactly round(alpha * n) of each
    true class is classified correctly, so the realized accuracies equal
    the requested ones up to rounding.
    """
    if not 0 < p_tilde < 1:
        raise DomainError(f"p_tilde {p_tilde} outside (0, 1)")
    if not 0 <= q < 1:
        raise DomainError(f"q {q} outside [0, 1)")
    rng = derive_rng(seed, "channel")
    n_observed_pos = round_count(p_tilde * N)
    n_observed_neg = N - n_observed_pos
    n_hidden = round_count(q * n_observed_neg)

    observed = np.zeros(N, dtype=bool)
    observed[:n_observed_pos] = True
    true = observed.copy()
    true[n_observed_pos:n_observed_pos + n_hidden] = True

    predicted = np.zeros(N, dtype=bool)
    for members, accuracy, correct_label in (
        (np.flatnonzero(true), alpha_pos, True),
        (np.flatnonzero(~true), alpha_neg, False),
    ):
        n_correct = round_count(accuracy * members.size)
        correct = np.zeros(members.size, dtype=bool)
        correct[rng.choice(members.size, size=n_correct, replace=False)] = True
        predicted[members] = np.where(correct, correct_label, not correct_label)

    permutation = rng.permutation(N)
    return ScoredTestSet(
        ids=np.arange(N),
        scores=predicted[permutation].astype(np.float64),
        observed=observed[permutation],
        true=true[permutation],
    )


def class_accuracies(
    scored: ScoredTestSet, threshold: float = DEFAULT_THRESHOLD
) -> Tuple[float, float]:
    """Fraction of true positives and of true negatives classified correctly at threshold."""
    predicted = np.asarray(scored.scores) >= threshold
    true = _as_binary(scored.true)
    if not true.any() or true.all():
        raise DomainError("degenerate class: both true classes are required")
    return float(predicted[true].mean()), float((~predicted[~true]).mean())


def _binomial_error(precision: float, n: int) -> float:
    return math.sqrt(max(precision * (1 - precision), 1e-12) / n)


@dataclass(frozen=True)
class EmpiricalComparison:
    alpha_pos: float
    alpha_neg: float
    p_tilde: float
    q: float
    n_predicted_positive: int
    measured_precision: Optional[float]
    corrected_precision: Optional[float]
    expected_two_class: float
    expected_contaminated: Optional[float]
    standard_error: Optional[float]
    corrected_standard_error: Optional[float] = None

    @staticmethod
    def _within(
        expected: Optional[float], measured: Optional[float], error: Optional[float], k: float
    ) -> bool:
        if expected is None or measured is None or error is None:
            return False
        return abs(measured - expected) <= k * error

    def measured_within(self, k: float = 3.0) -> bool:
        """Measured precision within k binomial standard errors of the two-class form."""
        return self._within(self.expected_two_class, self.measured_precision, self.standard_error, k)

    def corrected_within(self, k: float = 3.0) -> bool:
        """Corrected precision within k of its own binomial standard errors of the contaminated form."""
        return self._within(
            self.expected_contaminated, self.corrected_precision, self.corrected_standard_error, k
        )


def empirical_vs_expected(
    scored: ScoredTestSet,
    params: Optional[BiasParams] = None,
    spec: Optional[SkewSpec] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> EmpiricalComparison:
    """
    Measure class accuracies (against true labels) and precision at
    ``threshold``, next to the closed forms evaluated at the realized mixing
    and contamination. q comes from ``spec`` when given, otherwise from the
    test set itself.
    """
    alpha_pos, alpha_neg = class_accuracies(scored, threshold)
    predicted = np.asarray(scored.scores) >= threshold
    true = _as_binary(scored.true)
    observed = _as_binary(scored.observed)
    p_tilde = scored.p_tilde
    q = spec.q if spec is not None and spec.q is not None else scored.q_realized
    xi1 = params.xi1 if params is not None else 0.0
    xi2 = params.xi2 if params is not None else 0.0

    n_predicted = int(predicted.sum())
    measured = corrected = standard_error = corrected_error = None
    if n_predicted:
        measured = float((predicted & observed).sum() / n_predicted)
        corrected = float((predicted & true).sum() / n_predicted)
        standard_error = _binomial_error(measured, n_predicted)
        corrected_error = _binomial_error(corrected, n_predicted)

    expected = expected_precision_two_class(alpha_pos, alpha_neg, p_tilde, xi1, xi2).value
    try:
        contaminated: Optional[float] = expected_precision_contaminated_two_class(
            alpha_pos, alpha_neg, p_tilde, q, xi1, xi2
        ).value
    except ValidityError:
        contaminated = None

    return EmpiricalComparison(
        alpha_pos=alpha_pos,
        alpha_neg=alpha_neg,
        p_tilde=p_tilde,
        q=q,
        n_predicted_positive=n_predicted,
        measured_precision=measured,
        corrected_precision=corrected,
        expected_two_class=expected,
        expected_contaminated=contaminated,
        standard_error=standard_error,
        corrected_standard_error=corrected_error,
    )


def precision_at_k(ranked_ids: Sequence[str], known: Set[str], k: int) -> float:
    """Known ids among the first k, divided by k."""
    if k <= 0:
        raise DomainError("k must be positive")
    return sum(1 for c in ranked_ids[:k] if c in known) / k


@dataclass(frozen=True)
class RankedRow:
    rank: int
    candidate: str
    score: float
    is_known: bool


@dataclass(frozen=True)
class RankedReport:
    anchor: str
    rows: Tuple[RankedRow, ...]
    precision_at_k: Dict[int, float] = field(default_factory=dict)
    suggested_threshold: Optional[float] = None

    def count_at_or_above(self, threshold: Optional[float]) -> int:
        if threshold is None:
            return 0
        return sum(1 for r in self.rows if r.score >= threshold)


def _suggest_threshold(rows: Sequence[RankedRow], target_precision: float) -> Optional[float]:
    """Smallest score whose cumulative precision, through its last tied rank, meets the target."""
    suggested = None
    known = 0
    for index, row in enumerate(rows):
        known += row.is_known
        last_of_score = index + 1 == len(rows) or rows[index + 1].score != row.score
        if last_of_score and known / (index + 1) >= target_precision:
            suggested = row.score
    return suggested


def ranked_report(
    anchor: str,
    candidate_scores: Mapping[str, float],
    known: Iterable[str],
    k_max: int,
    target_precision: float,
) -> RankedReport:
    """Rank an anchor's candidates by score (ties by id) and scan down from the top."""
    known_set = set(known)
    ordered = sorted(candidate_scores.items(), key=lambda item: (-item[1], item[0]))
    rows = tuple(
        RankedRow(rank=i + 1, candidate=c, score=float(s), is_known=c in known_set)
        for i, (c, s) in enumerate(ordered)
    )
    ranked_ids = [r.candidate for r in rows]
    precision = {
        k: precision_at_k(ranked_ids, known_set, k) for k in range(1, min(k_max, len(rows)) + 1)
    }
    return RankedReport(
        anchor=anchor,
        rows=rows,
        precision_at_k=precision,
        suggested_threshold=_suggest_threshold(rows, target_precision),
    )


def pooled_threshold(
    reports: Sequence[RankedReport], target_precision: float
) -> Optional[float]:
    """Threshold chosen on all hub rows together, for use on other proteins."""
    pooled = sorted(
        (row for report in reports for row in report.rows),
        key=lambda r: (-r.score, r.candidate),
    )
    return _suggest_threshold(pooled, target_precision)
