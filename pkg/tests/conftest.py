import logging
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from skewbench.config.settings import settings
from skewbench.models.datasets import GaussianSpec
from skewbench.models.experiment import ExperimentConfig
from skewbench.services.datagen import Population, generate_population, partition_known


@pytest.fixture(autouse=True)
def reset_package_logger():
    """setup_logging detaches the package logger from root; undo it so caplog sees records."""
    yield
    package_logger = logging.getLogger("skewbench")
    for handler in package_logger.handlers:
        handler.close()
    package_logger.handlers = []
    package_logger.propagate = True
    package_logger.setLevel(logging.NOTSET)


@pytest.fixture
def gspec() -> GaussianSpec:
    return GaussianSpec(dim=5, centroid_offset=1.0, seed=7)


@pytest.fixture
def population(gspec: GaussianSpec) -> Population:
    """10,000 candidates, 100 positives, 20 of them known."""
    pop = generate_population(gspec, n_total=10_000, prevalence=0.01)
    return partition_known(pop, known_fraction=0.2, seed=7)


@pytest.fixture
def large_population() -> Population:
    """50,000 candidates, 1,000 positives, 200 of them known."""
    pop = generate_population(GaussianSpec(dim=5, centroid_offset=1.0, seed=3), 50_000, 0.02)
    return partition_known(pop, known_fraction=0.2, seed=3)


@pytest.fixture
def separable_data():
    """Positives have feature 0 in [1, 2], negatives in [-2, -1]; feature 1 is noise."""
    rng = np.random.default_rng(0)
    positives = np.column_stack([rng.uniform(1, 2, 20), rng.uniform(-1, 1, 20)])
    negatives = np.column_stack([rng.uniform(-2, -1, 20), rng.uniform(-1, 1, 20)])
    X = np.vstack([positives, negatives])
    y = np.array([1] * 20 + [0] * 20)
    return X, y


@pytest.fixture
def xor_data():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 1, 0])
    return X, y


@pytest.fixture
def small_config() -> Callable[..., ExperimentConfig]:
    """Desk-scale config small enough for unit tests; keyword overrides merge at top level."""

    def build(experiment: str, **overrides) -> ExperimentConfig:
        data = {
            "experiment": experiment,
            "population": {
                "gaussian": {"dim": 5, "centroid_offset": 1.0},
                "n_total": 5_000,
                "prevalence": 0.02,
                "known_fraction": 0.5,
            },
            "split": {
                "train_size": 50,
                "pos_neg_ratio": [1, 4],
                "test_size": 200,
                "p_tildes": [0.05, 0.10],
            },
            "forest": {"n_trees": 5},
            "seeds": [0, 1],
        }
        data.update(overrides)
        return ExperimentConfig.model_validate(data)

    return build


@pytest.fixture
def workers(monkeypatch) -> Callable[[int], None]:
    def set_workers(count: int) -> None:
        monkeypatch.setattr(settings, "WORKERS", count)

    return set_workers


def write_lines(path: Path, *lines: str) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
