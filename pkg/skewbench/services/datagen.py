"""
Synthetic populations with partial positive labels, skewed train/test
splits, and interaction pair lists.

A population holds all candidates (mu), the true positives (set A) and the
known positives (set B, a subset of A). Observed labels come from A for
the ideal case and from B for the realistic case, where every unknown
positive is observed as a negative.
"""
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from skewbench.config.settings import settings
from skewbench.exceptions import CapacityError, DomainError, ParseError
from skewbench.models.datasets import GaussianSpec, LabelSource
from skewbench.models.skew import round_count
from skewbench.services import reports
from skewbench.services.skew import derive_rng

logger = logging.getLogger(__name__)

MIN_POPULATION = 100
PAIR_SEPARATOR = "|"

Pair = Tuple[str, str]


@dataclass(frozen=True)
class Population:
    """Candidate instances with true labels and the known-positive mask."""

    ids: np.ndarray
    features: np.ndarray
    labels: np.ndarray
    known: np.ndarray
    prevalence: float
    gspec: GaussianSpec

    @property
    def n_total(self) -> int:
        return int(self.ids.shape[0])

    @property
    def n_positive(self) -> int:
        return int(self.labels.sum())

    @property
    def n_known(self) -> int:
        return int(self.known.sum())

    @property
    def known_ids(self) -> np.ndarray:
        return self.ids[self.known]

    @property
    def q_pool(self) -> float:
        """Hidden positives over all unlabeled candidates, |A \\ B| / |mu \\ B|."""
        return (self.n_positive - self.n_known) / (self.n_total - self.n_known)

    def observed_labels(self, source: LabelSource) -> np.ndarray:
        if LabelSource(source) is LabelSource.IDEAL_A:
            return self.labels
        return self.known


@dataclass(frozen=True)
class LabeledSet:
    """Rows drawn from a population: features with observed and true labels."""

    ids: np.ndarray
    features: np.ndarray
    observed: np.ndarray
    true: np.ndarray
    label_source: LabelSource

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @property
    def n_observed_positive(self) -> int:
        return int(self.observed.sum())

    @property
    def hidden_positives(self) -> int:
        """True positives carrying a negative observed label."""
        return int((self.true & ~self.observed).sum())


@dataclass(frozen=True)
class TestSet(LabeledSet):
    p_tilde: float = 0.0

    __test__ = False


@dataclass(frozen=True)
class DatasetSplit:
    train: LabeledSet
    test: TestSet
    label_source: LabelSource
    p_tilde: float

    @property
    def disjoint(self) -> bool:
        return not np.intersect1d(self.train.ids, self.test.ids).size


@dataclass(frozen=True)
class PairList:
    """Undirected, de-duplicated interaction pairs without self pairs."""

    proteins: FrozenSet[str]
    pairs: FrozenSet[Pair]
    raw_rows: Optional[int] = field(default=None, compare=False)

    def degree(self) -> dict:
        counts: dict = {}
        for a, b in self.pairs:
            counts[a] = counts.get(a, 0) + 1
            counts[b] = counts.get(b, 0) + 1
        return counts

    def partners(self, protein: str) -> FrozenSet[str]:
        return frozenset(b if a == protein else a for a, b in self.pairs if protein in (a, b))


def canonical_pair(a: str, b: str) -> Pair:
    return (a, b) if a <= b else (b, a)


def pair_id(a: str, b: str) -> str:
    """Order-independent identifier of a protein pair."""
    return PAIR_SEPARATOR.join(canonical_pair(a, b))


def make_pair_list(pairs: Iterable[Pair], raw_rows: Optional[int] = None) -> PairList:
    kept = {canonical_pair(a, b) for a, b in pairs if a != b}
    proteins = {p for pair in kept for p in pair}
    return PairList(proteins=frozenset(proteins), pairs=frozenset(kept), raw_rows=raw_rows)


def _gaussian_features(
    rng: np.random.Generator, labels: np.ndarray, gspec: GaussianSpec
) -> np.ndarray:
    features = rng.standard_normal((labels.shape[0], gspec.dim)) * np.sqrt(gspec.variance)
    features[labels] += gspec.centroid_offset
    return features


def generate_population(gspec: GaussianSpec, n_total: int, prevalence: float) -> Population:
    """
    Draw a population with exactly round(n_total * prevalence) positives.

    Negatives follow N(0, variance I); positives are shifted by
    centroid_offset on every coordinate.
    """
    if n_total < MIN_POPULATION:
        raise DomainError(f"population size {n_total} below {MIN_POPULATION}")
    if not 0 < prevalence < 1:
        raise DomainError(f"prevalence {prevalence} outside (0, 1)")
    n_positive = round_count(n_total * prevalence)
    if n_positive == 0:
        raise DomainError("no positives: n_total * prevalence rounds to 0")

    rng = derive_rng(gspec.seed, "population")
    labels = np.zeros(n_total, dtype=bool)
    labels[rng.choice(n_total, size=n_positive, replace=False)] = True
    features = _gaussian_features(rng, labels, gspec)

    logger.debug(
        "Generated population",
        extra={"n_total": n_total, "n_positive": n_positive, "dim": gspec.dim},
    )
    return Population(
        ids=np.arange(n_total, dtype=np.int64),
        features=features,
        labels=labels,
        known=np.zeros(n_total, dtype=bool),
        prevalence=prevalence,
        gspec=gspec,
    )


def partition_known(pop: Population, known_fraction: float, seed: int) -> Population:
    """Mark a uniform sample of round(known_fraction * |A|) positives as known."""
    if not 0 < known_fraction <= 1:
        raise DomainError(f"known_fraction {known_fraction} outside (0, 1]")
    positive_ids = pop.ids[pop.labels]
    n_known = round_count(known_fraction * positive_ids.size)
    rng = derive_rng(seed, "known")
    known = np.zeros(pop.n_total, dtype=bool)
    known[rng.choice(positive_ids, size=n_known, replace=False)] = True
    result = replace(pop, known=known)
    logger.debug(
        "Partitioned known positives",
        extra={"n_known": n_known, "q_pool": result.q_pool},
    )
    return result


def _eligible(pop: Population, source: LabelSource, exclude: Optional[np.ndarray]):
    observed = pop.observed_labels(source)
    available = np.ones(pop.n_total, dtype=bool)
    if exclude is not None and len(exclude):
        available[np.asarray(exclude, dtype=np.int64)] = False
    return pop.ids[observed & available], pop.ids[~observed & available]


def _draw(
    pop: Population,
    n_positive: int,
    n_negative: int,
    source: LabelSource,
    exclude: Optional[np.ndarray],
    seed: int,
    *stream: str,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Leading n_positive / n_negative ids of two seeded permutations of the pools.

    Positives and negatives are ordered by separate streams, so two draws on
    one stream are nested: the one with more positives and fewer negatives
    extends the positives and keeps a prefix of the negatives of the other.
    """
    pos_pool, neg_pool = _eligible(pop, source, exclude)
    if n_positive > pos_pool.size:
        raise CapacityError("positive", n_positive, int(pos_pool.size))
    if n_negative > neg_pool.size:
        raise CapacityError("negative", n_negative, int(neg_pool.size))
    pos = derive_rng(seed, *stream, "positive").permutation(pos_pool)[:n_positive]
    neg = derive_rng(seed, *stream, "negative").permutation(neg_pool)[:n_negative]
    return np.sort(pos), np.sort(neg)


def _labeled_rows(pop: Population, ids: np.ndarray, source: LabelSource) -> dict:
    return {
        "ids": ids,
        "features": pop.features[ids],
        "observed": pop.observed_labels(source)[ids],
        "true": pop.labels[ids],
        "label_source": LabelSource(source),
    }


def build_training_set(
    pop: Population,
    size: int,
    pos_neg_ratio: Tuple[int, int] = (1, 4),
    label_source: LabelSource = LabelSource.IDEAL_A,
    seed: int = 0,
    exclude: Optional[np.ndarray] = None,
) -> LabeledSet:
    """
    Sample a training set with an exact positive:negative ratio.

    Positives come from the observed-positive pool of the label source and
    negatives uniformly from its complement, which for real_B still holds
    the hidden positives.
    """
    ratio_pos, ratio_neg = pos_neg_ratio
    if ratio_pos < 1 or ratio_neg < 1:
        raise DomainError(f"ratio parts must be positive, got {pos_neg_ratio}")
    n_positive = round_count(size * ratio_pos / (ratio_pos + ratio_neg))
    n_negative = size - n_positive
    source = LabelSource(label_source)
    pos, neg = _draw(pop, n_positive, n_negative, source, exclude, seed, "train", source.value)
    ids = np.concatenate([pos, neg])
    return LabeledSet(**_labeled_rows(pop, ids, label_source))


def build_test_set(
    pop: Population,
    size: int,
    p_tilde: float,
    label_source: LabelSource = LabelSource.IDEAL_A,
    seed: int = 0,
    exclude: Optional[np.ndarray] = None,
    stream: Optional[str] = None,
) -> TestSet:
    """
    Sample a test set holding exactly round(p_tilde * size) observed positives.

    By default each mixing fraction draws from its own stream. Test sets
    built with the same ``stream`` name are nested instead: raising p_tilde
    only swaps trailing negatives for further positives.
    """
    if not 0 < p_tilde < 1:
        raise DomainError(f"p_tilde {p_tilde} outside (0, 1)")
    n_positive = round_count(p_tilde * size)
    source = LabelSource(label_source)
    key = stream if stream is not None else f"{p_tilde:.12g}"
    pos, neg = _draw(
        pop, n_positive, size - n_positive, source, exclude, seed, "test", source.value, key
    )
    ids = np.concatenate([pos, neg])
    return TestSet(**_labeled_rows(pop, ids, source), p_tilde=p_tilde)


def make_split(train: LabeledSet, test: TestSet) -> DatasetSplit:
    split = DatasetSplit(
        train=train, test=test, label_source=test.label_source, p_tilde=test.p_tilde
    )
    if not split.disjoint:
        raise DomainError("train and test sets share instances")
    return split


def export_population(pop: Population, path: Union[str, Path]) -> Path:
    """Write id,label,known,f0..f{d-1} rows for use by external classifiers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        pop.features, columns=[f"f{i}" for i in range(pop.features.shape[1])]
    )
    frame.insert(0, "known", pop.known.astype(int))
    frame.insert(0, "label", pop.labels.astype(int))
    frame.insert(0, "id", pop.ids)
    frame.to_csv(path, index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


def ingest_pair_list(
    path: Union[str, Path], has_header: bool = False, delimiter: str = "\t"
) -> PairList:
    """
    Read a two-column interaction file.

    Blank lines and lines starting with '#' are ignored. Pairs are made
    undirected and de-duplicated; self pairs are dropped.
    """
    path = Path(path)
    rows = reports.read_rows(path, delimiter, width=2)
    if has_header:
        rows = rows[1:]
    raw = []
    for line_number, fields in rows:
        if len(fields) != 2 or not fields[0]:
            raise ParseError("expected two protein id columns", str(path), line_number)
        raw.append((fields[0], fields[1]))

    pair_list = make_pair_list(raw, raw_rows=len(raw))
    if not pair_list.pairs:
        raise DomainError(f"{path}: no non-self interaction pairs")
    logger.info(
        "Ingested pair list",
        extra={
            "path": str(path),
            "raw_rows": len(raw),
            "unique_pairs": len(pair_list.pairs),
            "proteins": len(pair_list.proteins),
        },
    )
    return pair_list


def sample_protein_subset(
    pl: PairList, protein_fraction: float, seed: int, mode: str = "both"
) -> PairList:
    """
    Keep the pairs induced by a uniform sample of proteins.

    mode="both" keeps pairs whose two endpoints were sampled; mode="any"
    keeps pairs with at least one sampled endpoint.
    """
    if not 0 < protein_fraction <= 1:
        raise DomainError(f"protein_fraction {protein_fraction} outside (0, 1]")
    if mode not in ("both", "any"):
        raise DomainError(f"unknown induction mode {mode!r}")
    proteins = sorted(pl.proteins)
    n_sampled = round_count(protein_fraction * len(proteins))
    rng = derive_rng(seed, "protein_subset")
    sampled = {proteins[i] for i in rng.choice(len(proteins), size=n_sampled, replace=False)}
    if mode == "both":
        kept = [pair for pair in pl.pairs if pair[0] in sampled and pair[1] in sampled]
    else:
        kept = [pair for pair in pl.pairs if pair[0] in sampled or pair[1] in sampled]
    return make_pair_list(kept)


def synthesize_interactome(
    n_proteins: int,
    n_hubs: int,
    hub_degree: int,
    background_degree: float,
    hub_known_fraction: float,
    known_fraction: float,
    seed: int,
) -> Tuple[PairList, PairList]:
    """
    Random interactome with a few densely connected, well-annotated hubs.

    Returns:
        (true pairs, known pairs); the known pairs are a per-group uniform
        sample of the true pairs
    """
    if n_hubs >= n_proteins or hub_degree >= n_proteins:
        raise DomainError("hub settings exceed the number of proteins")
    names = [f"P{i:05d}" for i in range(n_proteins)]
    rng = derive_rng(seed, "interactome")

    hub_pairs = set()
    for hub in range(n_hubs):
        others = np.delete(np.arange(n_proteins), hub)
        for partner in rng.choice(others, size=hub_degree, replace=False):
            hub_pairs.add(canonical_pair(names[hub], names[int(partner)]))

    background = set()
    n_background = round_count(n_proteins * background_degree / 2)
    while len(background) < n_background:
        a, b = rng.choice(np.arange(n_hubs, n_proteins), size=2, replace=False)
        pair = canonical_pair(names[int(a)], names[int(b)])
        if pair not in hub_pairs:
            background.add(pair)

    known = set()
    for group, fraction in ((sorted(hub_pairs), hub_known_fraction), (sorted(background), known_fraction)):
        n_known = round_count(fraction * len(group))
        for index in rng.choice(len(group), size=n_known, replace=False):
            known.add(group[int(index)])

    return make_pair_list(hub_pairs | background), make_pair_list(known)


def pair_population(
    proteins: Sequence[str], true: PairList, known: PairList, gspec: GaussianSpec
) -> Tuple[Population, List[str]]:
    """
    Population over every unordered pair of ``proteins``: labels from the
    true pairs, the known mask from the known pairs, Gaussian features drawn
    per label.

    Returns:
        (population, pair ids indexed by population id)
    """
    if not known.pairs <= true.pairs:
        raise DomainError("known pairs must be a subset of the true pairs")
    ordered = sorted(set(proteins))
    pairs = [(a, b) for i, a in enumerate(ordered) for b in ordered[i + 1:]]
    labels = np.fromiter((pair in true.pairs for pair in pairs), dtype=bool, count=len(pairs))
    known_mask = np.fromiter((pair in known.pairs for pair in pairs), dtype=bool, count=len(pairs))
    if len(pairs) < MIN_POPULATION:
        raise DomainError(f"{len(pairs)} candidate pairs is below {MIN_POPULATION}")
    if not labels.any():
        raise DomainError("no true pairs among the candidate proteins")

    rng = derive_rng(gspec.seed, "pair_population")
    population = Population(
        ids=np.arange(len(pairs), dtype=np.int64),
        features=_gaussian_features(rng, labels, gspec),
        labels=labels,
        known=known_mask,
        prevalence=float(labels.mean()),
        gspec=gspec,
    )
    return population, [PAIR_SEPARATOR.join(pair) for pair in pairs]
