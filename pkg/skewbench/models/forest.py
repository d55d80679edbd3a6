import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class ForestParams(BaseModel):
    """Random-forest configuration; defaults follow the 30-tree, log2-feature setup."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_trees: int = Field(default=30, ge=1, description="Number of trees")
    features_per_node: Optional[int] = Field(
        default=None, ge=1, description="Features sampled per node; None means floor(log2 F) + 1"
    )
    max_depth: Optional[int] = Field(default=None, ge=1, description="None means unlimited")
    min_leaf: int = Field(default=1, ge=1, description="Minimum instances per leaf")
    bootstrap: bool = Field(default=True, description="Train each tree on a bootstrap resample")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Master seed")

    def resolve_features_per_node(self, n_features: int) -> int:
        if self.features_per_node is not None:
            return self.features_per_node
        return min(n_features, int(math.floor(math.log2(n_features))) + 1)
