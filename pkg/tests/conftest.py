from __future__ import annotations

import random

import pytest

from anveshana.corpus import BloomLevel, Challenge, Corpus, Difficulty, build_corpus
from anveshana.synth import synthesize_corpus

CATEGORY_POOL = ("Machine Learning", "Deep Learning", "Transformers",
                 "Generative AI", "Statistics", "Optimization")


def make_challenge(i: int, category: str = "Machine Learning",
                   difficulty: Difficulty = Difficulty.EASY,
                   bloom: BloomLevel = BloomLevel.UNDERSTAND,
                   answer: str | None = None) -> Challenge:
    return Challenge(
        id=f"q{i}",
        problem=f"Problem number {i}: explain the core idea behind concept {i}.",
        answer=answer if answer is not None else f"concept-{i}-reference-answer",
        category=category,
        difficulty=difficulty,
        tags=("fixture",),
        bloom_level=bloom,
    )


def random_challenges(rng: random.Random, size: int,
                      categories=CATEGORY_POOL) -> list[Challenge]:
    return [
        make_challenge(
            i,
            category=rng.choice(categories),
            difficulty=rng.choice(list(Difficulty)),
            bloom=rng.choice(list(BloomLevel)),
        )
        for i in range(size)
    ]


def corpus_of(challenges) -> Corpus:
    corpus, issues = build_corpus(challenges)
    assert not issues
    return corpus


@pytest.fixture(scope="session")
def reference_challenges():
    return synthesize_corpus()


@pytest.fixture(scope="session")
def reference_corpus(reference_challenges):
    return corpus_of(reference_challenges)


@pytest.fixture(scope="session")
def reference_csv(reference_corpus, tmp_path_factory):
    from anveshana.corpus import export_corpus

    path = tmp_path_factory.mktemp("dataset") / "challenges.csv"
    path.write_bytes(export_corpus(reference_corpus, "csv"))
    return path
