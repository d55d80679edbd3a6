from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class LabelSource(str, Enum):
    """Which positive set supplies observed labels."""

    IDEAL_A = "ideal_A"
    REAL_B = "real_B"


class GaussianSpec(BaseModel):
    """Two shared-variance Gaussian classes whose means differ by a constant per coordinate."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = Field(default=100, ge=1, description="Feature dimension")
    centroid_offset: float = Field(
        default=0.1, description="Per-coordinate shift of the positive mean"
    )
    variance: float = Field(default=1.0, gt=0, description="Shared per-coordinate variance")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Generator seed")
