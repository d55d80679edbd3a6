"""
Population skew model: contamination of the unlabeled pool and presets.
"""
import hashlib
import logging
from math import comb
from typing import Hashable, List, Optional

import numpy as np

from skewbench.exceptions import DomainError
from skewbench.models.skew import SkewSpec, contamination, round_count

logger = logging.getLogger(__name__)

YEAST_GENES = 5866
YEAST_PAIRS = 17_203_545
YEAST_KNOWN_INTERACTIONS = 82_593
YEAST_PREVALENCE = 1 / 230


def q_from_counts(p: float, T: int, K: int) -> float:
    """
    Fraction of hidden positives among the unlabeled candidates.

    Args:
        p: True prevalence, 0 < p < 1
        T: Total number of candidates
        K: Number of known positives

    Returns:
        (p*T - K) / (T - K), a value in [0, p]
    """
    if not 0 < p < 1:
        raise DomainError(f"prevalence p={p} outside (0, 1)")
    if T < 2:
        raise DomainError(f"population size T={T} must be at least 2")
    if K < 0:
        raise DomainError(f"known positive count K={K} is negative")
    if T - K == 0:
        raise DomainError("no unlabeled candidates: T - K = 0")
    if K > p * T:
        raise DomainError("more known positives than estimated positives")
    return contamination(p, T, K)


def skew_spec(p: float, T: int, K: int, p_tilde: Optional[float] = None) -> SkewSpec:
    """Build a validated SkewSpec; q is derived by q_from_counts."""
    q = q_from_counts(p, T, K)
    return SkewSpec(p=p, T=T, K=K, q=q, p_tilde=p_tilde)


def yeast_preset() -> SkewSpec:
    """
    Yeast interactome constants: prevalence 1 in 230 and 82,593 unique
    non-self physical interactions among all pairs of 5,866 genes.

    The known interactions exceed p*T for these constants, so the SkewSpec is
    built non-strict and its contamination comes out slightly negative.
    """
    spec = SkewSpec(
        p=YEAST_PREVALENCE,
        T=YEAST_PAIRS,
        K=YEAST_KNOWN_INTERACTIONS,
        strict=False,
    )
    if spec.K > round_count(spec.p * spec.T):
        logger.warning(
            "Yeast preset has more known interactions than estimated interactions",
            extra={"K": spec.K, "expected_positives": round_count(spec.p * spec.T), "q": spec.q},
        )
    return spec


def all_pairs(n_proteins: int) -> int:
    """Number of unordered non-self pairs among n proteins."""
    return comb(n_proteins, 2)


def _stream_words(part: Hashable) -> List[int]:
    if isinstance(part, (int, np.integer)):
        tagged = b"int:" + str(int(part)).encode("ascii")
    else:
        tagged = b"str:" + str(part).encode("utf-8")
    digest = hashlib.sha256(tagged).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, len(digest), 4)]


def derive_rng(seed: int, *stream: Hashable) -> np.random.Generator:
    """
    Independent random stream for (seed, *stream).

    Each key part is hashed whole and tagged with its type, so "a" and 97
    or two long keys sharing a prefix name different streams. Streams are
    keyed by name: adding or reordering draws in one never shifts another.
    """
    entropy = [int(seed)]
    for part in stream:
        entropy.extend(_stream_words(part))
    return np.random.default_rng(np.random.SeedSequence(entropy))
