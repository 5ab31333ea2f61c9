"""Annotation-quality statistics over a challenge corpus.

Covers per-dimension label distributions, Shannon entropy (bits), effective
categories (2^H), concentration index, pairwise Cramér's V association, the
Bloom-by-difficulty count matrix, and the aggregated QualityReport document.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Mapping, Sequence

import numpy as np

from .corpus import BloomLevel, Challenge, Corpus, Difficulty
from .errors import DegenerateTable, EmptyCorpus, UndefinedForSingleLabelDimension
from .similarity import SimilarityHistogram


class Dimension(enum.Enum):
    CATEGORY = "category"
    DIFFICULTY = "difficulty"
    BLOOM_LEVEL = "bloom_level"


def _label_of(challenge: Challenge, dimension: Dimension) -> str:
    if dimension is Dimension.CATEGORY:
        return challenge.category
    if dimension is Dimension.DIFFICULTY:
        return challenge.difficulty.value
    return challenge.bloom_level.value


def _dimension_labels(corpus: Corpus, dimension: Dimension) -> tuple[str, ...]:
    """All possible labels for a dimension, in canonical order."""
    if dimension is Dimension.CATEGORY:
        return corpus.category_set
    if dimension is Dimension.DIFFICULTY:
        return tuple(d.value for d in Difficulty)
    return tuple(b.value for b in BloomLevel)


@dataclass(frozen=True)
class LabelDistribution:
    dimension: Dimension
    counts: Mapping[str, int]
    total: int
    k_total: int

    def probabilities(self) -> list[float]:
        return [c / self.total for c in self.counts.values()]


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    n: int


def label_distribution(corpus: Corpus, dimension: Dimension) -> LabelDistribution:
    """Tally challenge labels along one dimension.

    For the fixed enum dimensions every possible label appears in the counts
    (zeros included) and k_total is the enum size; for categories only
    observed labels appear and k_total is their number.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot compute a label distribution of an empty corpus")
    counts = {label: 0 for label in _dimension_labels(corpus, dimension)}
    for challenge in corpus.challenges:
        counts[_label_of(challenge, dimension)] += 1
    return LabelDistribution(dimension=dimension, counts=counts,
                             total=len(corpus), k_total=len(counts))


def shannon_entropy_bits(dist: LabelDistribution) -> float:
    """H = -sum(p * log2 p) over nonzero label shares, in bits."""
    if dist.total <= 0:
        raise EmptyCorpus("entropy requires a positive total")
    acc = 0.0
    for count in dist.counts.values():
        if count > 0:
            p = count / dist.total
            acc -= p * math.log2(p)
    return acc


def effective_categories(entropy_bits: float) -> float:
    """Number of equally likely labels that would produce the given entropy: 2^H."""
    if entropy_bits < 0:
        raise ValueError("entropy must be non-negative")
    return 2.0 ** entropy_bits


def concentration_index(dist: LabelDistribution) -> float:
    """Normalized Herfindahl concentration: (sum p^2 - 1/k) / (1 - 1/k).

    0 for a uniform distribution over all k_total labels, 1 when all mass
    sits on a single label.
    """
    if dist.total <= 0:
        raise EmptyCorpus("concentration requires a positive total")
    if dist.k_total < 2:
        raise UndefinedForSingleLabelDimension(
            f"concentration undefined for k_total={dist.k_total}")
    herfindahl = sum(p * p for p in dist.probabilities())
    floor = 1.0 / dist.k_total
    return (herfindahl - floor) / (1.0 - floor)


def concentration_candidates(dist: LabelDistribution) -> dict[str, float]:
    """Alternate concentration formulas, for calibration against external reports.

    The engine's canonical index is the normalized Herfindahl; the raw
    Herfindahl and a Gini coefficient over label shares (absent labels count
    as zero shares) are computed alongside for comparison.
    """
    probs = sorted(dist.probabilities())
    probs = [0.0] * (dist.k_total - len(probs)) + probs
    k = dist.k_total
    herfindahl = sum(p * p for p in probs)
    # Gini via the sorted-share identity, rescaled so a degenerate distribution is 1.
    gini_raw = sum((2 * (i + 1) - k - 1) * p for i, p in enumerate(probs)) / k
    gini = gini_raw * k / (k - 1) if k > 1 else 0.0
    return {
        "normalized_herfindahl": concentration_index(dist),
        "herfindahl": herfindahl,
        "gini": gini,
    }


def contingency_table(corpus: Corpus, dim_a: Dimension, dim_b: Dimension) -> ContingencyTable:
    """Cross-tabulate challenge counts along two distinct dimensions.

    Rows and columns whose counts are all zero are omitted.
    """
    if dim_a is dim_b:
        raise ValueError("contingency table requires two distinct dimensions")
    if len(corpus) == 0:
        raise EmptyCorpus("cannot cross-tabulate an empty corpus")

    row_labels = _dimension_labels(corpus, dim_a)
    col_labels = _dimension_labels(corpus, dim_b)
    row_pos = {label: i for i, label in enumerate(row_labels)}
    col_pos = {label: j for j, label in enumerate(col_labels)}
    grid = np.zeros((len(row_labels), len(col_labels)), dtype=np.int64)
    for challenge in corpus.challenges:
        grid[row_pos[_label_of(challenge, dim_a)], col_pos[_label_of(challenge, dim_b)]] += 1

    keep_rows = grid.sum(axis=1) > 0
    keep_cols = grid.sum(axis=0) > 0
    grid = grid[keep_rows][:, keep_cols]
    return ContingencyTable(
        row_labels=tuple(l for l, keep in zip(row_labels, keep_rows) if keep),
        col_labels=tuple(l for l, keep in zip(col_labels, keep_cols) if keep),
        counts=tuple(tuple(int(v) for v in row) for row in grid),
        n=int(grid.sum()),
    )


def _reduced_matrix(table: ContingencyTable) -> np.ndarray:
    """Counts as a float matrix with any all-zero rows/columns dropped."""
    grid = np.asarray(table.counts, dtype=np.float64)
    if grid.ndim != 2 or grid.size == 0:
        raise DegenerateTable("table must have at least one row and column")
    grid = grid[grid.sum(axis=1) > 0][:, grid.sum(axis=0) > 0]
    if grid.shape[0] < 2 or grid.shape[1] < 2:
        raise DegenerateTable(
            f"need at least 2x2 nonzero margins, got {grid.shape[0]}x{grid.shape[1]}")
    return grid


def pearson_chi_square(table: ContingencyTable) -> float:
    """Pearson chi-square against the independence expectation E = row*col/n."""
    grid = _reduced_matrix(table)
    n = grid.sum()
    expected = np.outer(grid.sum(axis=1), grid.sum(axis=0)) / n
    return float(((grid - expected) ** 2 / expected).sum())


def cramers_v(table: ContingencyTable) -> float:
    """Cramér's V = sqrt(chi2 / (n * min(r-1, c-1))), in [0, 1]."""
    grid = _reduced_matrix(table)
    chi2 = pearson_chi_square(table)
    n = grid.sum()
    r, c = grid.shape
    v = math.sqrt(chi2 / (n * min(r - 1, c - 1)))
    return min(v, 1.0)


def bloom_difficulty_matrix(corpus: Corpus) -> list[list[int]]:
    """6x4 count matrix; rows follow Bloom rank, columns difficulty rank."""
    if len(corpus) == 0:
        raise EmptyCorpus("cannot tabulate an empty corpus")
    matrix = [[0] * len(Difficulty) for _ in BloomLevel]
    for challenge in corpus.challenges:
        matrix[challenge.bloom_level.rank - 1][challenge.difficulty.rank - 1] += 1
    return matrix


_REPORT_DIMENSIONS = (Dimension.CATEGORY, Dimension.DIFFICULTY, Dimension.BLOOM_LEVEL)


@dataclass(frozen=True)
class QualityReport:
    per_dimension: Mapping[str, Mapping[str, float]]
    pairwise_cramers_v: tuple[tuple[float, ...], ...]
    bloom_difficulty_counts: tuple[tuple[int, ...], ...]
    qa_similarity: SimilarityHistogram | None
    generated_at: str

    def as_dict(self) -> dict:
        return {
            "per_dimension": {k: dict(v) for k, v in self.per_dimension.items()},
            "pairwise_cramers_v": [list(row) for row in self.pairwise_cramers_v],
            "bloom_difficulty_counts": [list(row) for row in self.bloom_difficulty_counts],
            "qa_similarity": self.qa_similarity.as_dict() if self.qa_similarity else None,
            "generated_at": self.generated_at,
        }


def quality_report(corpus: Corpus,
                   similarity_histogram: SimilarityHistogram | None = None) -> QualityReport:
    """Aggregate every annotation-quality statistic into one report.

    The pairwise matrix rows/columns follow the per_dimension key order
    (category, difficulty, bloom_level) with a unit diagonal. A dimension
    with no variation has no measurable association, so its pairings report
    V = 0 instead of failing.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot report on an empty corpus")

    per_dimension: dict[str, dict[str, float]] = {}
    for dimension in _REPORT_DIMENSIONS:
        dist = label_distribution(corpus, dimension)
        entropy = shannon_entropy_bits(dist)
        per_dimension[dimension.value] = {
            "k_total": dist.k_total,
            "effective_categories": effective_categories(entropy),
            "entropy_bits": entropy,
            # undefined (null) when the dimension has a single possible label
            "concentration_index": concentration_index(dist) if dist.k_total >= 2 else None,
            "sample_size": dist.total,
        }

    size = len(_REPORT_DIMENSIONS)
    matrix = [[1.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            try:
                v = cramers_v(contingency_table(corpus, _REPORT_DIMENSIONS[i],
                                                _REPORT_DIMENSIONS[j]))
            except DegenerateTable:
                v = 0.0
            matrix[i][j] = matrix[j][i] = v

    return QualityReport(
        per_dimension=per_dimension,
        pairwise_cramers_v=tuple(tuple(row) for row in matrix),
        bloom_difficulty_counts=tuple(tuple(row) for row in bloom_difficulty_matrix(corpus)),
        qa_similarity=similarity_histogram,
        generated_at=datetime.now(timezone.utc).isoformat(),
    )
