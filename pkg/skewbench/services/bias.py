"""
Closed-form precision under test-set skew and unlabeled-pool contamination,
and the mixing correction that balances the two biases.

All formulas take the per-instance noise terms xi1/xi2 (noise count divided
by test size); they default to 0.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from skewbench.exceptions import DomainError, ValidityError
from skewbench.models.skew import (
    BalanceMethod,
    DEFAULT_ALPHA_GRID,
    BalanceResult,
    PrecisionValue,
    SkewSpec,
)

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2

VALIDITY_TOLERANCE = 1e-12
SEARCH_MARGIN = 1e-9


def _check_fraction(name: str, value: float, allow_one: bool = False) -> None:
    upper_ok = value <= 1 if allow_one else value < 1
    if not (value > 0 and upper_ok):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise DomainError(f"{name}={value} outside {bound}")


def _check_noise(xi1: float, xi2: float) -> None:
    if xi1 < 0 or xi2 < 0:
        raise DomainError(f"noise terms must be non-negative, got xi1={xi1}, xi2={xi2}")


def _ratio(numerator: float, denominator: float) -> PrecisionValue:
    if denominator <= 0:
        raise DomainError("degenerate bias model: non-positive denominator")
    return PrecisionValue.of(numerator / denominator)


def expected_precision_uniform(
    alpha: float, p_tilde: float, xi1: float = 0.0, xi2: float = 0.0
) -> PrecisionValue:
    """Precision measured on a test set mixed at p_tilde by a classifier of accuracy alpha."""
    _check_fraction("alpha", alpha, allow_one=True)
    _check_fraction("p_tilde", p_tilde)
    _check_noise(xi1, xi2)
    numerator = alpha + xi1 / p_tilde
    denominator = 2 * alpha - 1 + (1 - alpha) / p_tilde + (xi1 + xi2) / p_tilde
    return _ratio(numerator, denominator)


def expected_precision_two_class(
    alpha_pos: float,
    alpha_neg: float,
    p_tilde: float,
    xi1: float = 0.0,
    xi2: float = 0.0,
) -> PrecisionValue:
    """Uniform-form precision with separate accuracies on positives and negatives."""
    _check_fraction("alpha_pos", alpha_pos, allow_one=True)
    _check_fraction("alpha_neg", alpha_neg, allow_one=True)
    _check_fraction("p_tilde", p_tilde)
    _check_noise(xi1, xi2)
    numerator = alpha_pos + xi1 / p_tilde
    denominator = (
        alpha_pos + alpha_neg - 1 + (1 - alpha_neg) / p_tilde + (xi1 + xi2) / p_tilde
    )
    return _ratio(numerator, denominator)


def _check_contamination(q: float, bound: float) -> None:
    if not 0 <= q < 1:
        raise DomainError(f"contamination q={q} outside [0, 1)")
    if q > bound + VALIDITY_TOLERANCE:
        raise ValidityError(
            f"contamination exceeds model range: q={q} > {bound:.6g}"
        )


def expected_precision_contaminated(
    alpha: float, p_tilde: float, q: float, xi1: float = 0.0, xi2: float = 0.0
) -> PrecisionValue:
    """
    Precision when a fraction q of the sampled negatives are hidden positives.

    Valid only while q <= (1 - alpha) / alpha; beyond it the expression exceeds 1.
    """
    _check_fraction("alpha", alpha, allow_one=True)
    _check_fraction("p_tilde", p_tilde)
    _check_noise(xi1, xi2)
    _check_contamination(q, (1 - alpha) / alpha)
    numerator = alpha * p_tilde + alpha * q * (1 - p_tilde) + xi1
    denominator = alpha * p_tilde + (1 - alpha) * (1 - p_tilde) + xi1 + xi2
    return _ratio(numerator, denominator)


def expected_precision_contaminated_two_class(
    alpha_pos: float,
    alpha_neg: float,
    p_tilde: float,
    q: float,
    xi1: float = 0.0,
    xi2: float = 0.0,
) -> PrecisionValue:
    """Contaminated precision with class-conditional accuracies; q <= (1 - alpha_neg) / alpha_pos."""
    _check_fraction("alpha_pos", alpha_pos, allow_one=True)
    _check_fraction("alpha_neg", alpha_neg, allow_one=True)
    _check_fraction("p_tilde", p_tilde)
    _check_noise(xi1, xi2)
    _check_contamination(q, (1 - alpha_neg) / alpha_pos)
    numerator = alpha_pos * p_tilde + alpha_pos * q * (1 - p_tilde) + xi1
    denominator = alpha_pos * p_tilde + (1 - alpha_neg) * (1 - p_tilde) + xi1 + xi2
    return _ratio(numerator, denominator)


def exact_precision(alpha: float, p: float, xi1: float = 0.0, xi2: float = 0.0) -> PrecisionValue:
    """Precision the classifier achieves on the natural population of prevalence p."""
    _check_fraction("alpha", alpha, allow_one=True)
    _check_fraction("p", p)
    _check_noise(xi1, xi2)
    numerator = alpha * p + xi1
    denominator = alpha * p + (1 - alpha) * (1 - p) + xi1 + xi2
    return _ratio(numerator, denominator)


def overestimation_ratio(alpha: float, p_tilde: float, p: float) -> float:
    """How many times a test set mixed at p_tilde overstates the precision reached at p."""
    measured = expected_precision_uniform(alpha, p_tilde).value
    exact = exact_precision(alpha, p).value
    if exact == 0:
        raise DomainError("exact precision is zero")
    return measured / exact


def _objective_terms(p_tilde, alpha: float, p: float, q: float, xi1: float, xi2: float):
    """Both squared-difference terms of the balance objective; p_tilde may be an array."""
    shifted = (alpha + alpha * q * (1 - p_tilde) / p_tilde + xi1 / p_tilde) / (
        2 * alpha - 1 + (1 - alpha) / p_tilde + (xi1 + xi2) / p_tilde
    )
    reference = (alpha + xi1 / p) / (2 * alpha - 1 + (1 - alpha) / p + (xi1 + xi2) / p)
    return shifted, reference


def balance_objective(
    delta_p: float,
    alpha: float,
    p: float,
    q: float,
    xi1: float = 0.0,
    xi2: float = 0.0,
) -> float:
    """
    Squared gap between the contaminated precision at p + delta_p and the
    uncontaminated precision at p. Zero when the two biases cancel.
    """
    p_tilde = p + delta_p
    if not 0 < p_tilde < 1:
        raise DomainError(f"p + delta_p = {p_tilde} outside (0, 1)")
    shifted, reference = _objective_terms(p_tilde, alpha, p, q, xi1, xi2)
    return float((shifted - reference) ** 2)


def delta_p_closed_form(alpha: float, p: float, q: float) -> float:
    """
    Mixing offset m(p - 1)q / (mq + alpha - 1) with m = (2alpha - 1)p + 1 - alpha.

    Note the minimizer of balance_objective is the negation of this value;
    this form agrees with delta_p_simplified at alpha = 1/2.
    """
    _check_fraction("alpha", alpha)
    m = (2 * alpha - 1) * p + 1 - alpha
    denominator = m * q + alpha - 1
    if denominator == 0:
        raise DomainError("zero denominator in closed-form delta_p")
    return m * (p - 1) * q / denominator


def delta_p_simplified(p: float, q: float) -> float:
    """Closed-form offset at alpha = 1/2: (1 - p) q / (1 - q)."""
    if q >= 1:
        raise DomainError(f"contamination q={q} must be below 1")
    return (1 - p) * q / (1 - q)


def golden_section_minimize(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> Tuple[float, float]:
    """
    Golden-section search for the minimum of a unimodal f on [a, b].

    Returns:
        (x, f(x)) with x the midpoint of a final bracket of width <= tol
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h > tol:
        steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
        c = a + INV_PHI_SQUARE * h
        d = a + INV_PHI * h
        yc = f(c)
        yd = f(d)
        for _ in range(steps):
            if yc < yd:
                b, d, yd = d, c, yc
                h = INV_PHI * h
                c = a + INV_PHI_SQUARE * h
                yc = f(c)
            else:
                a, c, yc = c, d, yd
                h = INV_PHI * h
                d = a + INV_PHI * h
                yd = f(d)
    x = (a + b) / 2
    return x, f(x)


def delta_p_numeric(
    alpha: float,
    p: float,
    q: float,
    tol: float = 1e-15,
    grid_points: int = 10_001,
    xi1: float = 0.0,
    xi2: float = 0.0,
) -> BalanceResult:
    """
    Minimize balance_objective over delta_p by a grid scan refined with
    golden-section search. Always returns the best point found; inspect
    objective_value (or .converged) to see whether a root was reached.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    _check_fraction("p", p)
    lo = -p + SEARCH_MARGIN
    hi = 1 - p - SEARCH_MARGIN
    grid = np.linspace(lo, hi, max(grid_points, 10_000))

    with np.errstate(divide="ignore", invalid="ignore"):
        shifted, reference = _objective_terms(p + grid, alpha, p, q, xi1, xi2)
        values = (shifted - reference) ** 2
    values = np.where(np.isfinite(values), values, np.inf)
    best = int(np.argmin(values))
    left = grid[max(best - 1, 0)]
    right = grid[min(best + 1, len(grid) - 1)]

    def objective(delta: float) -> float:
        return balance_objective(delta, alpha, p, q, xi1, xi2)

    delta, value = golden_section_minimize(objective, float(left), float(right), tol)
    if values[best] < value:
        delta, value = float(grid[best]), float(values[best])

    logger.debug(
        "Numeric balance search finished",
        extra={"alpha": alpha, "p": p, "q": q, "delta_p": delta, "objective": value},
    )
    return BalanceResult(
        delta_p=delta,
        p_tilde_star=p + delta,
        objective_value=value,
        method=BalanceMethod.NUMERIC,
    )


def balance(spec: SkewSpec, alpha: Optional[float] = None) -> BalanceResult:
    """Closed-form balance for a spec; alpha=None uses the alpha = 1/2 simplification."""
    if alpha is None:
        delta = delta_p_simplified(spec.p, spec.q)
        method = BalanceMethod.SIMPLIFIED_HALF
    else:
        delta = delta_p_closed_form(alpha, spec.p, spec.q)
        method = BalanceMethod.CLOSED_FORM
    p_tilde_star = spec.p + delta
    if not 0 < p_tilde_star < 1:
        raise DomainError(f"recommended mixing {p_tilde_star} outside (0, 1)")
    objective = balance_objective(-delta, alpha if alpha is not None else 0.5, spec.p, spec.q)
    return BalanceResult(
        delta_p=delta,
        p_tilde_star=p_tilde_star,
        objective_value=objective,
        method=method,
    )


def recommended_mixing(spec: SkewSpec) -> float:
    """Test mixing p + (1 - p) q / (1 - q) that offsets contamination of the negatives."""
    return balance(spec).p_tilde_star


@dataclass(frozen=True)
class AlphaSweepRow:
    alpha: float
    delta_p: Optional[float]
    valid: bool
    error: Optional[str] = None
    delta_p_numeric: Optional[float] = None
    objective_value: Optional[float] = None


@dataclass(frozen=True)
class AlphaSweep:
    p: float
    q: float
    rows: List[AlphaSweepRow] = field(default_factory=list)

    @property
    def abs_delta_variance(self) -> float:
        values = [abs(r.delta_p) for r in self.rows if r.valid and r.delta_p is not None]
        if not values:
            return 0.0
        return float(np.var(values))


def alpha_sensitivity_sweep(
    p: float,
    q: float,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    with_numeric: bool = False,
) -> AlphaSweep:
    """
    Evaluate the closed-form offset across accuracies. Points where the
    formula is undefined become invalid rows instead of aborting the sweep.
    """
    rows: List[AlphaSweepRow] = []
    for alpha in alpha_grid:
        try:
            delta = delta_p_closed_form(alpha, p, q)
        except DomainError as e:
            rows.append(AlphaSweepRow(alpha=alpha, delta_p=None, valid=False, error=str(e)))
            continue
        numeric = None
        objective = None
        if with_numeric:
            result = delta_p_numeric(alpha, p, q)
            numeric = result.delta_p
            objective = result.objective_value
        rows.append(
            AlphaSweepRow(
                alpha=alpha,
                delta_p=delta,
                valid=0 < p + delta < 1,
                delta_p_numeric=numeric,
                objective_value=objective,
            )
        )
    return AlphaSweep(p=p, q=q, rows=rows)
