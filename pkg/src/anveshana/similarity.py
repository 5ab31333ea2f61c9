"""Semantic similarity between texts via pluggable embedding providers.

The built-in fallback embeds hashed unigram+bigram term frequencies into 256
dimensions so the whole platform runs deterministically with no model or
network dependency. An HTTP provider speaks a batch JSON contract
(POST {"texts": [...]} -> {"vectors": [[...]]}) for real sentence embedders.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass
from typing import Protocol, Sequence

import requests

from .errors import DimensionMismatch, EmptyCorpus, ProviderFailure

_TOKEN_RE = re.compile(r"[a-z0-9]+")

FALLBACK_DIMENSION = 256
_HASH_SEED = 0x811C9DC5
_HASH_MULTIPLIER = 131


def stable_hash(text: str, seed: int = _HASH_SEED) -> int:
    """Fixed 32-bit polynomial hash over UTF-8 bytes; identical on every platform."""
    h = seed & 0xFFFFFFFF
    for byte in text.encode("utf-8"):
        h = (h * _HASH_MULTIPLIER + byte) & 0xFFFFFFFF
    return h


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    norm: float

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "EmbeddingVector":
        vals = tuple(float(v) for v in values)
        return cls(values=vals, norm=math.sqrt(sum(v * v for v in vals)))

    @property
    def dimension(self) -> int:
        return len(self.values)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity in [-1, 1]; zero-norm vectors compare as 0 by convention."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions differ: {a.dimension} vs {b.dimension}")
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    dot = sum(x * y for x, y in zip(a.values, b.values))
    return max(-1.0, min(1.0, dot / (a.norm * b.norm)))


class EmbeddingProvider(Protocol):
    name: str
    dimension: int

    def embed(self, text: str) -> EmbeddingVector: ...


def _terms(text: str) -> list[str]:
    tokens = _TOKEN_RE.findall(text.lower())
    return tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]


def embed_fallback(text: str, dimension: int = FALLBACK_DIMENSION) -> EmbeddingVector:
    """Deterministic hashed term-frequency embedding.

    Unigram and bigram counts are weighted sublinearly (1 + ln tf), bucketed
    by the fixed polynomial hash, and L2-normalized unless the text has no
    tokens at all (empty text embeds to the zero vector).
    """
    values = [0.0] * dimension
    counts: dict[str, int] = {}
    for term in _terms(text):
        counts[term] = counts.get(term, 0) + 1
    for term, tf in counts.items():
        values[stable_hash(term) % dimension] += 1.0 + math.log(tf)
    norm = math.sqrt(sum(v * v for v in values))
    if norm > 0.0:
        values = [v / norm for v in values]
    return EmbeddingVector.from_values(values)


class HashedTfEmbedder:
    """In-process fallback provider around embed_fallback, with a small cache."""

    name = "hashed-tf"

    def __init__(self, dimension: int = FALLBACK_DIMENSION, cache_size: int = 4096):
        self.dimension = dimension
        self._cache: dict[str, EmbeddingVector] = {}
        self._cache_size = cache_size

    def embed(self, text: str) -> EmbeddingVector:
        hit = self._cache.get(text)
        if hit is not None:
            return hit
        vector = embed_fallback(text, self.dimension)
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[text] = vector
        return vector


class HttpEmbeddingProvider:
    """Batch embedding over HTTP; one retry, then ProviderFailure."""

    def __init__(self, url: str, name: str = "http-embedder",
                 dimension: int | None = None, timeout: float = 10.0):
        self.url = url
        self.name = name
        self.timeout = timeout
        self._dimension = dimension

    @property
    def dimension(self) -> int:
        if self._dimension is None:
            raise ProviderFailure("embedding dimension unknown before the first call")
        return self._dimension

    def embed(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]

    def embed_batch(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        payload = {"texts": list(texts)}
        last_error: Exception | None = None
        for _ in range(2):
            try:
                response = requests.post(self.url, json=payload, timeout=self.timeout)
                response.raise_for_status()
                vectors = response.json()["vectors"]
                break
            except Exception as exc:  # noqa: BLE001 - network/shape errors both retry
                last_error = exc
        else:
            raise ProviderFailure(f"embedding service failed after retry: {last_error}")
        if len(vectors) != len(texts):
            raise ProviderFailure(
                f"embedding service returned {len(vectors)} vectors for {len(texts)} texts")
        embedded = [EmbeddingVector.from_values(v) for v in vectors]
        for vector in embedded:
            if self._dimension is None:
                self._dimension = vector.dimension
            if vector.dimension != self._dimension:
                raise ProviderFailure("embedding service changed its dimension mid-run")
        return embedded


HISTOGRAM_BIN_WIDTH = 0.05
HISTOGRAM_BINS = 40  # covers [-1, 1]
# Exact two-decimal bin edges; bin i is [edge[i], edge[i+1]), last bin closed at 1.
BIN_EDGES = tuple(round(-1.0 + i * HISTOGRAM_BIN_WIDTH, 2) for i in range(HISTOGRAM_BINS + 1))


@dataclass(frozen=True)
class SimilarityHistogram:
    bin_width: float
    bins: tuple[int, ...]
    n: int
    mean: float
    mode_bin: tuple[float, float]

    def as_dict(self) -> dict:
        return {
            "bin_width": self.bin_width,
            "bins": list(self.bins),
            "n": self.n,
            "mean": self.mean,
            "mode_bin": list(self.mode_bin),
        }


def bin_index(value: float) -> int:
    """Histogram bin for a similarity value; 1.0 lands in the last bin."""
    clamped = max(-1.0, min(1.0, value))
    return min(HISTOGRAM_BINS - 1, bisect.bisect_right(BIN_EDGES, clamped) - 1)


def histogram_from_values(values: Sequence[float]) -> SimilarityHistogram:
    bins = [0] * HISTOGRAM_BINS
    for value in values:
        bins[bin_index(value)] += 1
    mode = max(range(HISTOGRAM_BINS), key=lambda i: (bins[i], -i))
    return SimilarityHistogram(
        bin_width=HISTOGRAM_BIN_WIDTH,
        bins=tuple(bins),
        n=len(values),
        mean=sum(values) / len(values) if values else 0.0,
        mode_bin=(BIN_EDGES[mode], BIN_EDGES[mode + 1]),
    )


def qa_similarity_distribution(corpus, provider: EmbeddingProvider) -> SimilarityHistogram:
    """Histogram of cosine(embed(problem), embed(answer)) over all challenges.

    On a failed embed call the ProviderFailure carries how many pairs had
    already been scored.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("cannot score an empty corpus")
    values: list[float] = []
    for challenge in corpus.challenges:
        try:
            problem_vec = provider.embed(challenge.problem)
            answer_vec = provider.embed(challenge.answer)
        except ProviderFailure as exc:
            raise ProviderFailure(
                f"embedding failed after {len(values)} of {len(corpus)} pairs: {exc}",
                completed=len(values)) from exc
        values.append(cosine(problem_vec, answer_vec))
    return histogram_from_values(values)
