"""
Random-forest classifier built from Gini CART trees, scoring instances by
the fraction of trees voting positive.
"""
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from skewbench.config.settings import settings
from skewbench.exceptions import DomainError, ParseError
from skewbench.models.forest import ForestParams
from skewbench.services import reports
from skewbench.services.logging import log_timing
from skewbench.services.skew import derive_rng

logger = logging.getLogger(__name__)

MODEL_FORMAT = "skewbench.forest"
MODEL_VERSION = 1
LEAF = -1


@dataclass(frozen=True)
class DecisionTree:
    """
    Binary tree in flat arrays. Node 0 is the root; internal nodes send
    x[feature] <= threshold to ``left``, leaves have feature == -1.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    vote: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.nonzero(active)[0]
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[node] != LEAF
        return self.vote[node]

    def to_nested(self, index: int = 0) -> Dict[str, Any]:
        if self.feature[index] == LEAF:
            return {"vote": int(self.vote[index])}
        return {
            "feature": int(self.feature[index]),
            "threshold": float(self.threshold[index]),
            "left": self.to_nested(int(self.left[index])),
            "right": self.to_nested(int(self.right[index])),
        }

    @classmethod
    def from_nested(cls, root: Dict[str, Any]) -> "DecisionTree":
        builder = _TreeBuilder()

        def visit(node: Dict[str, Any]) -> int:
            if "vote" in node:
                return builder.add_leaf(int(node["vote"]))
            index = builder.add_split(int(node["feature"]), float(node["threshold"]))
            builder.link(index, visit(node["left"]), visit(node["right"]))
            return index

        visit(root)
        return builder.build()


class _TreeBuilder:
    def __init__(self):
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.vote: List[int] = []

    def _add(self, feature: int, threshold: float, vote: int) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.vote.append(vote)
        return len(self.feature) - 1

    def add_leaf(self, vote: int) -> int:
        return self._add(LEAF, 0.0, vote)

    def add_split(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, 0)

    def link(self, index: int, left: int, right: int) -> None:
        self.left[index] = left
        self.right[index] = right

    def build(self) -> DecisionTree:
        return DecisionTree(
            feature=np.asarray(self.feature, dtype=np.int64),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int64),
            right=np.asarray(self.right, dtype=np.int64),
            vote=np.asarray(self.vote, dtype=np.int8),
        )


@dataclass(frozen=True)
class ForestModel:
    trees: Tuple[DecisionTree, ...]
    params: ForestParams
    n_features: int

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def to_json(self) -> str:
        document = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "n_features": self.n_features,
            "params": self.params.model_dump(mode="json"),
            "trees": [tree.to_nested() for tree in self.trees],
        }
        return json.dumps(document, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ForestModel":
        document = json.loads(text)
        if document.get("format") != MODEL_FORMAT or document.get("version") != MODEL_VERSION:
            raise DomainError("unsupported model document format or version")
        return cls(
            trees=tuple(DecisionTree.from_nested(t) for t in document["trees"]),
            params=ForestParams(**document["params"]),
            n_features=int(document["n_features"]),
        )


def _leaf_vote(n_positive: int, n_total: int) -> int:
    # majority; ties go to the negative class
    return 1 if 2 * n_positive > n_total else 0


def _best_split(
    X: np.ndarray, y: np.ndarray, features: Sequence[int], min_leaf: int
) -> Optional[Tuple[int, float]]:
    n = y.shape[0]
    total_pos = int(y.sum())
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)

    best_cost = math.inf
    best: Optional[Tuple[int, float]] = None
    for f in features:
        order = np.argsort(X[:, f], kind="mergesort")
        xs = X[order, f]
        pos_left = np.cumsum(y[order])[:-1].astype(np.float64)
        pos_right = total_pos - pos_left
        # size-weighted Gini impurity of the two children
        cost = 2 * (
            pos_left * (n_left - pos_left) / n_left
            + pos_right * (n_right - pos_right) / n_right
        )
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        cost = np.where(valid, cost, np.inf)
        i = int(np.argmin(cost))
        if cost[i] < best_cost:
            threshold = (xs[i] + xs[i + 1]) / 2
            if threshold >= xs[i + 1]:
                threshold = xs[i]
            best_cost = float(cost[i])
            best = (int(f), float(threshold))
    return best


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    features_per_node: int,
    rng: np.random.Generator,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
) -> DecisionTree:
    """Grow one CART tree, sampling features_per_node candidate features at every node."""
    n_features = X.shape[1]
    builder = _TreeBuilder()
    stack: List[Tuple[np.ndarray, int, int, str]] = [(np.arange(y.shape[0]), 0, -1, "")]

    while stack:
        rows, depth, parent, side = stack.pop()
        y_node = y[rows]
        n_pos = int(y_node.sum())
        n = rows.shape[0]

        split = None
        splittable = (
            0 < n_pos < n
            and n >= 2 * min_leaf
            and (max_depth is None or depth < max_depth)
        )
        if splittable:
            features = rng.choice(n_features, size=features_per_node, replace=False)
            split = _best_split(X[rows], y_node, features, min_leaf)

        if split is None:
            index = builder.add_leaf(_leaf_vote(n_pos, n))
        else:
            index = builder.add_split(*split)
            goes_left = X[rows, split[0]] <= split[1]
            stack.append((rows[~goes_left], depth + 1, index, "right"))
            stack.append((rows[goes_left], depth + 1, index, "left"))

        if parent >= 0:
            if side == "left":
                builder.left[parent] = index
            else:
                builder.right[parent] = index

    return builder.build()


def _as_arrays(train_set: Any) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(train_set, tuple):
        X, y = train_set
    else:
        X, y = train_set.features, train_set.observed
    return np.asarray(X, dtype=np.float64), np.asarray(y).astype(np.int64)


@log_timing()
def train(
    train_set: Any, params: ForestParams, workers: Optional[int] = None
) -> ForestModel:
    """
    Train a forest on a LabeledSet (observed labels) or an (X, y) tuple.

    Tree i draws from its own random stream derived from (seed, i), so the
    model is identical for any number of workers.
    """
    X, y = _as_arrays(train_set)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DomainError("degenerate training set: need at least 2 instances")
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == y.shape[0]:
        raise DomainError("degenerate training set: both classes are required")

    n, n_features = X.shape
    features_per_node = params.resolve_features_per_node(n_features)
    if not 1 <= features_per_node <= n_features:
        raise DomainError(
            f"features_per_node={features_per_node} outside [1, {n_features}]"
        )

    def fit_one(index: int) -> DecisionTree:
        rng = derive_rng(params.seed, "tree", index)
        rows = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
        return grow_tree(
            X[rows], y[rows], features_per_node, rng, params.max_depth, params.min_leaf
        )

    workers = workers or settings.WORKERS
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(fit_one, range(params.n_trees)))
    else:
        trees = [fit_one(i) for i in range(params.n_trees)]

    logger.debug(
        "Trained forest",
        extra={"n_trees": params.n_trees, "n_instances": n, "workers": workers},
    )
    return ForestModel(trees=tuple(trees), params=params, n_features=n_features)


def predict_scores(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Fraction of trees voting positive for every row of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DomainError(
            f"dimension mismatch: model expects {model.n_features} features"
        )
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in model.trees:
        votes += tree.predict(X)
    return votes / model.n_trees


def predict_score(model: ForestModel, instance: Sequence[float]) -> float:
    instance = np.asarray(instance, dtype=np.float64)
    if instance.ndim != 1:
        raise DomainError("a single instance must be one-dimensional")
    return float(predict_scores(model, instance[np.newaxis, :])[0])


def save_model(model: ForestModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.to_json(), encoding="utf-8")
    return path


def load_model(path: Union[str, Path]) -> ForestModel:
    return ForestModel.from_json(Path(path).read_text(encoding="utf-8"))


def write_scores(path: Union[str, Path], ids: Sequence[Any], scores: Sequence[float]) -> Path:
    """Write an id,score CSV readable by load_scores."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"id": list(ids), "score": np.asarray(scores, dtype=np.float64)})
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def load_scores(path: Union[str, Path]) -> List[Tuple[str, float]]:
    """
    Read id,score rows as written by write_scores. A leading "id,score"
    header is skipped; quoted ids may contain commas.

    Raises:
        ParseError: malformed row, score outside [0, 1] or duplicate id
    """
    path = Path(path)
    rows = reports.read_rows(path, ",", width=2)
    if rows and [f.lower() for f in rows[0][1]] == ["id", "score"]:
        rows = rows[1:]
    scores: List[Tuple[str, float]] = []
    seen = set()
    for line_number, fields in rows:
        if len(fields) != 2 or not fields[0]:
            raise ParseError("expected 'id,score'", str(path), line_number)
        identifier, raw_score = fields
        try:
            score = float(raw_score)
        except ValueError:
            raise ParseError(f"score {raw_score!r} is not a number", str(path), line_number)
        if not 0 <= score <= 1:
            raise ParseError(f"score {score} outside [0, 1]", str(path), line_number)
        if identifier in seen:
            raise ParseError(f"duplicate id {identifier!r}", str(path), line_number)
        seen.add(identifier)
        scores.append((identifier, score))
    return scores
