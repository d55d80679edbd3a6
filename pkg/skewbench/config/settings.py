"""
Configuration settings for skewbench.
"""
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SKEWBENCH_",
        case_sensitive=True,
        extra="ignore",
    )

    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False
    LOG_FILE: Optional[str] = None
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Thread count for per-tree training; results never depend on it.
    WORKERS: int = Field(default=1, ge=1)

    OUTPUT_DIR: str = "results"
    CSV_FLOAT_FORMAT: str = "%.10g"


settings = Settings()

__all__ = ["settings", "Settings"]
