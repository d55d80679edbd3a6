"""
Experiment configuration and run summaries.
"""
import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from skewbench.models.datasets import GaussianSpec
from skewbench.models.forest import ForestParams
from skewbench.models.skew import DEFAULT_ALPHA_GRID

DEFAULT_P_TILDES = [0.004, 0.01, 0.05, 0.10]


class ExperimentName(str, Enum):
    SKEW_SWEEP = "skew_sweep"
    PARTIAL_LABEL_SWEEP = "partial_label_sweep"
    LABEL_CORRECTION = "label_correction"
    THREEWAY = "threeway"
    ALPHA_SWEEP = "alpha_sweep"
    HUB_REPORT = "hub_report"
    BIAS_TABLES = "bias_tables"


def _check_fractions(values: List[float], name: str) -> List[float]:
    for value in values:
        if not 0 < value < 1:
            raise ValueError(f"{name} entry {value} outside (0, 1)")
    return values


class PopulationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gaussian: GaussianSpec = Field(
        default_factory=lambda: GaussianSpec(dim=5, centroid_offset=2.0),
        description="Feature generator; its seed is replaced by each run seed",
    )
    n_total: int = Field(default=500_000, ge=100, description="Population size")
    prevalence: float = Field(default=0.01, gt=0, lt=1, description="True positive fraction")
    known_fraction: float = Field(
        default=0.2, gt=0, le=1, description="Fraction of positives that are known (set B)"
    )


class SplitConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train_size: int = Field(default=1_000, ge=2)
    pos_neg_ratio: Tuple[int, int] = Field(default=(1, 4))
    test_size: int = Field(default=5_000, ge=1)
    p_tildes: List[float] = Field(default_factory=lambda: list(DEFAULT_P_TILDES), min_length=1)

    @field_validator("p_tildes")
    @classmethod
    def _valid_mixings(cls, values: List[float]) -> List[float]:
        return _check_fractions(values, "p_tildes")

    @field_validator("pos_neg_ratio")
    @classmethod
    def _positive_ratio(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if min(value) < 1:
            raise ValueError("pos_neg_ratio parts must be at least 1")
        return value


class AlphaSweepConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p_values: List[float] = Field(default_factory=lambda: [1 / 100, 1 / 300, 1 / 1000])
    q_ratio: float = Field(default=0.01, ge=0, lt=1, description="q = q_ratio * p")
    alpha_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_ALPHA_GRID))
    with_numeric: bool = True
    variance_bound: float = Field(default=1e-6, gt=0)
    relative_tolerance: float = Field(default=1e-9, gt=0)

    @field_validator("p_values", "alpha_grid")
    @classmethod
    def _valid_fractions(cls, values: List[float]) -> List[float]:
        return _check_fractions(values, "grid")


class SyntheticInteractomeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_proteins: int = Field(default=400, ge=10)
    n_hubs: int = Field(default=5, ge=1)
    hub_degree: int = Field(default=70, ge=1)
    background_degree: float = Field(default=3.0, ge=0)
    hub_known_fraction: float = Field(default=0.95, gt=0, le=1)
    known_fraction: float = Field(default=0.2, gt=0, le=1)
    gaussian: GaussianSpec = Field(
        default_factory=lambda: GaussianSpec(dim=20, centroid_offset=0.5)
    )
    train_size: int = Field(default=2_000, ge=2)


class HubConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    pair_list: Optional[str] = Field(default=None, description="TSV of known interactions")
    has_header: bool = False
    scores: Optional[str] = Field(default=None, description="CSV of pair_id,score")
    hub_threshold: int = Field(default=50, ge=0, description="Anchors need more known partners")
    k_max: int = Field(default=20, ge=1)
    target_precision: float = Field(default=0.9, gt=0, le=1)
    synthetic: SyntheticInteractomeConfig = Field(default_factory=SyntheticInteractomeConfig)

    @model_validator(mode="after")
    def _paired_inputs(self) -> "HubConfig":
        if (self.pair_list is None) != (self.scores is None):
            raise ValueError("pair_list and scores must be given together")
        return self


class BiasTableConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: float = Field(default=0.01, gt=0, lt=1, description="Natural prevalence for exact precision")
    alphas: List[float] = Field(default_factory=lambda: [0.5, 0.7, 0.8, 0.9, 1.0])
    p_tildes: List[float] = Field(default_factory=lambda: list(DEFAULT_P_TILDES))
    qs: List[float] = Field(default_factory=lambda: [0.0, 0.001, 0.01])
    channel_size: int = Field(default=20_000, ge=10)

    @field_validator("alphas")
    @classmethod
    def _valid_alphas(cls, values: List[float]) -> List[float]:
        for value in values:
            if not 0 < value <= 1:
                raise ValueError(f"alpha {value} outside (0, 1]")
        return values

    @field_validator("p_tildes")
    @classmethod
    def _valid_mixings(cls, values: List[float]) -> List[float]:
        return _check_fractions(values, "p_tildes")

    @field_validator("qs")
    @classmethod
    def _valid_qs(cls, values: List[float]) -> List[float]:
        for value in values:
            if not 0 <= value < 1:
                raise ValueError(f"q {value} outside [0, 1)")
        return values


class ExperimentConfig(BaseModel):
    """A complete, hashable description of one experiment run."""

    model_config = ConfigDict(extra="forbid")

    experiment: ExperimentName
    population: PopulationConfig = Field(default_factory=PopulationConfig)
    split: SplitConfig = Field(default_factory=SplitConfig)
    forest: ForestParams = Field(default_factory=ForestParams)
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    output_dir: Optional[str] = None
    alpha_sweep: AlphaSweepConfig = Field(default_factory=AlphaSweepConfig)
    hub: HubConfig = Field(default_factory=HubConfig)
    bias_tables: BiasTableConfig = Field(default_factory=BiasTableConfig)

    @field_validator("seeds")
    @classmethod
    def _non_negative_seeds(cls, values: List[int]) -> List[int]:
        if any(seed < 0 for seed in values):
            raise ValueError("seeds must be non-negative")
        return values

    @classmethod
    def from_json_file(
        cls, path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None
    ) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        data.update(overrides or {})
        return cls.model_validate(data)

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form; output_dir does not take part."""
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class RecordStatus(str, Enum):
    OK = "ok"
    ERROR = "error"
    SKIPPED = "skipped"


class RunRecord(BaseModel):
    """One evaluated (setting, seed, case) combination."""

    setting: str
    seed: int
    case: str
    p_tilde: Optional[float] = None
    p_tilde_realized: Optional[float] = None
    q_pool: Optional[float] = None
    delta_p: Optional[float] = None
    aupr: Optional[float] = None
    alpha_pos: Optional[float] = None
    alpha_neg: Optional[float] = None
    curve_path: Optional[str] = None
    status: RecordStatus = RecordStatus.OK
    message: Optional[str] = None


class CheckResult(BaseModel):
    """An assertion evaluated once per trial, reported with its pass count."""

    name: str
    description: str
    passes: int = Field(..., ge=0)
    trials: int = Field(..., ge=0)
    required: int = Field(..., ge=0)

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.passes >= self.required


class RunSummary(BaseModel):
    experiment: ExperimentName
    config_hash: str
    seeds: List[int]
    output_dir: str
    records: List[RunRecord] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)
    tables: Dict[str, str] = Field(default_factory=dict)
    notices: List[str] = Field(default_factory=list)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def records_for(self, case: Optional[str] = None, setting: Optional[str] = None) -> List[RunRecord]:
        return [
            r
            for r in self.records
            if (case is None or r.case == case) and (setting is None or r.setting == setting)
        ]
