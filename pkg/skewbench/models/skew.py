"""
Value models of the population skew and of the analytic bias model.
"""
import math
from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Q_TOLERANCE = 1e-12
RANGE_TOLERANCE = 1e-12

DEFAULT_ALPHA_GRID: Tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 19))


def round_count(value: float) -> int:
    """Round a non-negative expected count half-up to the nearest integer."""
    return int(math.floor(value + 0.5))


def contamination(p: float, T: int, K: int) -> float:
    """Hidden-positive fraction of the unlabeled pool, (pT - K) / (T - K)."""
    return (p * T - K) / (T - K)


class SkewSpec(BaseModel):
    """Population skew: prevalence, population size, known positives and test mixing."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(..., gt=0, lt=1, description="True prevalence of the positive class")
    T: int = Field(..., ge=2, description="Total number of candidate pairs")
    K: int = Field(..., ge=0, description="Number of known (labeled) positives, set B")
    q: Optional[float] = Field(
        default=None, description="Hidden-positive contamination of the unlabeled pool"
    )
    p_tilde: Optional[float] = Field(
        default=None, gt=0, lt=1, description="Positive mixing fraction of a test set"
    )
    strict: bool = Field(
        default=True,
        description="Reject specs whose known positives exceed the estimated positive count",
    )

    @model_validator(mode="before")
    @classmethod
    def _derive(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        p, T, K = data.get("p"), data.get("T"), data.get("K")
        if p is None or T is None or K is None:
            return data
        if K >= T:
            raise ValueError("K must be smaller than T")
        derived = contamination(float(p), int(T), int(K))
        if data.get("q") is None:
            data["q"] = derived
        elif abs(float(data["q"]) - derived) > Q_TOLERANCE:
            raise ValueError(f"q={data['q']} does not match (pT - K)/(T - K) = {derived}")
        if data.get("p_tilde") is None:
            data["p_tilde"] = p
        return data

    @model_validator(mode="after")
    def _check_counts(self) -> "SkewSpec":
        if self.strict:
            if self.K > round_count(self.p * self.T):
                raise ValueError("more known positives than estimated positives")
            if self.q is not None and not 0 <= self.q < 1:
                raise ValueError(f"contamination q={self.q} outside [0, 1)")
        return self

    @property
    def expected_positives(self) -> int:
        return round_count(self.p * self.T)

    @property
    def hidden_positives(self) -> int:
        return self.expected_positives - self.K

    @classmethod
    def from_counts(
        cls, p: float, T: int, K: int, p_tilde: Optional[float] = None
    ) -> "SkewSpec":
        return cls(p=p, T=T, K=K, p_tilde=p_tilde)

    def with_mixing(self, p_tilde: float) -> "SkewSpec":
        return SkewSpec(p=self.p, T=self.T, K=self.K, p_tilde=p_tilde, strict=self.strict)


class BiasParams(BaseModel):
    """Inputs of the closed-form precision model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: Optional[float] = Field(default=None, gt=0, le=1, description="Shared accuracy")
    alpha_pos: Optional[float] = Field(
        default=None, gt=0, le=1, description="Accuracy on the positive class"
    )
    alpha_neg: Optional[float] = Field(
        default=None, gt=0, le=1, description="Accuracy on the negative class"
    )
    xi1: float = Field(default=0.0, ge=0, description="Per-instance noise on positives")
    xi2: float = Field(default=0.0, ge=0, description="Per-instance noise on negatives")
    N: Optional[int] = Field(default=None, ge=1, description="Test-set size")

    @model_validator(mode="after")
    def _one_accuracy_form(self) -> "BiasParams":
        pair = (self.alpha_pos, self.alpha_neg)
        has_pair = all(a is not None for a in pair)
        if any(a is not None for a in pair) and not has_pair:
            raise ValueError("alpha_pos and alpha_neg must be given together")
        if (self.alpha is None) == (not has_pair):
            raise ValueError("give exactly one of alpha or (alpha_pos, alpha_neg)")
        return self

    @property
    def is_two_class(self) -> bool:
        return self.alpha is None

    def class_accuracies(self) -> Tuple[float, float]:
        if self.alpha is not None:
            return self.alpha, self.alpha
        return self.alpha_pos, self.alpha_neg  # type: ignore[return-value]


class BalanceMethod(str, Enum):
    CLOSED_FORM = "closed_form"
    SIMPLIFIED_HALF = "simplified_half"
    NUMERIC = "numeric"


class BalanceResult(BaseModel):
    """Outcome of choosing a test mixing that balances contamination."""

    model_config = ConfigDict(frozen=True)

    delta_p: float = Field(..., description="Correction added to p")
    p_tilde_star: float = Field(..., gt=0, lt=1, description="Recommended mixing p + delta_p")
    objective_value: float = Field(..., ge=0, description="Balance objective at the solution")
    method: BalanceMethod

    @property
    def converged(self) -> bool:
        return self.objective_value <= 1e-18


class PrecisionValue(BaseModel):
    """A closed-form precision; values above 1 fall outside the model's meaning."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0)
    in_model_range: bool

    @classmethod
    def of(cls, value: float) -> "PrecisionValue":
        return cls(value=value, in_model_range=value <= 1 + RANGE_TOLERANCE)

    def __float__(self) -> float:
        return self.value
