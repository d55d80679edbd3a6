from skewbench.models.datasets import GaussianSpec, LabelSource
from skewbench.models.experiment import (
    AlphaSweepConfig,
    BiasTableConfig,
    CheckResult,
    ExperimentConfig,
    ExperimentName,
    HubConfig,
    PopulationConfig,
    RecordStatus,
    RunRecord,
    RunSummary,
    SplitConfig,
    SyntheticInteractomeConfig,
)
from skewbench.models.forest import ForestParams
from skewbench.models.skew import (
    BalanceMethod,
    BalanceResult,
    BiasParams,
    PrecisionValue,
    SkewSpec,
)

__all__ = [
    "GaussianSpec",
    "LabelSource",
    "AlphaSweepConfig",
    "BiasTableConfig",
    "CheckResult",
    "ExperimentConfig",
    "ExperimentName",
    "HubConfig",
    "PopulationConfig",
    "RecordStatus",
    "RunRecord",
    "RunSummary",
    "SplitConfig",
    "SyntheticInteractomeConfig",
    "ForestParams",
    "BalanceMethod",
    "BalanceResult",
    "BiasParams",
    "PrecisionValue",
    "SkewSpec",
]
