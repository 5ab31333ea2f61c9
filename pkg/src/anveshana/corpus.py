"""Challenge corpus: schema types, CSV/JSON parsing, validation, indexing, export.

The interchange schema has seven columns: id, problem, answer, category,
difficulty, tags, bloom_level. CSV follows RFC 4180 (quoted fields, CRLF,
header row required, UTF-8 only); JSON is an array of objects with the same
field names. Tags are `;`- or `,`-separated inside one CSV cell, or a JSON
string array.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Mapping, Sequence

from .errors import UnreadableInput

SCHEMA_FIELDS = ("id", "problem", "answer", "category", "difficulty", "tags", "bloom_level")


@total_ordering
class _OrderedLabel(enum.Enum):
    """Enum whose members are ordered by declaration; rank is 1-based."""

    @property
    def rank(self) -> int:
        return list(type(self)).index(self) + 1

    def __lt__(self, other):
        if isinstance(other, type(self)):
            return self.rank < other.rank
        return NotImplemented

    @classmethod
    def parse(cls, label: str):
        """Case-insensitive match against canonical names; None if unknown."""
        needle = label.strip().lower()
        for member in cls:
            if member.value.lower() == needle:
                return member
        return None


class BloomLevel(_OrderedLabel):
    REMEMBER = "Remember"
    UNDERSTAND = "Understand"
    APPLY = "Apply"
    ANALYZE = "Analyze"
    EVALUATE = "Evaluate"
    CREATE = "Create"


class Difficulty(_OrderedLabel):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"
    EXPERT = "Expert"


class IssueCode(enum.Enum):
    MISSING_FIELD = "MissingField"
    EMPTY_FIELD = "EmptyField"
    UNKNOWN_DIFFICULTY = "UnknownDifficulty"
    UNKNOWN_BLOOM_LEVEL = "UnknownBloomLevel"
    DUPLICATE_ID = "DuplicateId"
    MALFORMED_ROW = "MalformedRow"


@dataclass(frozen=True)
class ValidationIssue:
    record_index: int
    field: str
    code: IssueCode
    message: str

    def as_dict(self) -> dict:
        return {
            "record_index": self.record_index,
            "field": self.field,
            "code": self.code.value,
            "message": self.message,
        }


@dataclass(frozen=True)
class Challenge:
    id: str
    problem: str
    answer: str
    category: str
    difficulty: Difficulty
    tags: tuple[str, ...]
    bloom_level: BloomLevel

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "problem": self.problem,
            "answer": self.answer,
            "category": self.category,
            "difficulty": self.difficulty.value,
            "tags": list(self.tags),
            "bloom_level": self.bloom_level.value,
        }

    def public_dict(self) -> dict:
        """Learner-facing payload: everything except the answer."""
        payload = self.as_dict()
        del payload["answer"]
        return payload


@dataclass(frozen=True)
class Corpus:
    """Immutable, deduplicated, indexed challenge collection."""

    challenges: tuple[Challenge, ...]
    category_set: tuple[str, ...]
    by_id: Mapping[str, Challenge]
    by_category: Mapping[str, tuple[str, ...]]
    by_difficulty: Mapping[Difficulty, tuple[str, ...]]
    by_bloom: Mapping[BloomLevel, tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.challenges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.challenges == other.challenges

    def __hash__(self) -> int:
        return hash(self.challenges)


def split_tags(raw: str) -> tuple[str, ...]:
    """Split a `;`- or `,`-separated tag cell, trimming and dropping empties."""
    parts = raw.replace(",", ";").split(";")
    return tuple(p.strip() for p in parts if p.strip())


def _parse_record(index: int, record: Mapping[str, object],
                  issues: list[ValidationIssue]) -> Challenge | None:
    """Validate one raw record; append issues and return None on rejection."""
    rejected = False

    for name in SCHEMA_FIELDS:
        if name not in record or record[name] is None:
            issues.append(ValidationIssue(index, name, IssueCode.MISSING_FIELD,
                                          f"record {index}: field '{name}' missing"))
            rejected = True
    if rejected:
        return None

    def text(name: str) -> str:
        value = record[name]
        return value.strip() if isinstance(value, str) else str(value).strip()

    cid, problem, answer, category = (text(n) for n in ("id", "problem", "answer", "category"))
    for name, value in (("id", cid), ("problem", problem), ("answer", answer), ("category", category)):
        if not value:
            issues.append(ValidationIssue(index, name, IssueCode.EMPTY_FIELD,
                                          f"record {index}: field '{name}' is empty"))
            rejected = True

    difficulty = Difficulty.parse(text("difficulty"))
    if difficulty is None:
        issues.append(ValidationIssue(index, "difficulty", IssueCode.UNKNOWN_DIFFICULTY,
                                      f"record {index}: unknown difficulty {text('difficulty')!r}"))
        rejected = True

    bloom = BloomLevel.parse(text("bloom_level"))
    if bloom is None:
        issues.append(ValidationIssue(index, "bloom_level", IssueCode.UNKNOWN_BLOOM_LEVEL,
                                      f"record {index}: unknown bloom_level {text('bloom_level')!r}"))
        rejected = True

    raw_tags = record["tags"]
    if isinstance(raw_tags, str):
        tags = split_tags(raw_tags)
    elif isinstance(raw_tags, Sequence):
        tags = tuple(str(t).strip() for t in raw_tags if str(t).strip())
    else:
        issues.append(ValidationIssue(index, "tags", IssueCode.MALFORMED_ROW,
                                      f"record {index}: tags must be a string or array"))
        rejected = True
        tags = ()

    if rejected:
        return None
    return Challenge(cid, problem, answer, category, difficulty, tags, bloom)


def _iter_csv_records(text: str) -> Iterable[Mapping[str, object] | None]:
    """Yield per-row field dicts; None marks a structurally malformed row."""
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except (StopIteration, csv.Error):
        raise UnreadableInput("input has no header row")
    positions = {name.strip().lower(): i for i, name in enumerate(header)}
    missing = [name for name in SCHEMA_FIELDS if name not in positions]
    if missing:
        raise UnreadableInput(f"header is missing required column(s): {', '.join(missing)}")

    for row in reader:
        if not row:
            continue  # blank line, not a record
        if len(row) <= max(positions[name] for name in SCHEMA_FIELDS):
            yield None
        else:
            yield {name: row[positions[name]] for name in SCHEMA_FIELDS}


def parse_challenges(data: bytes | str, format: str) -> tuple[list[Challenge], list[ValidationIssue]]:
    """Parse a CSV or JSON byte stream into challenges plus per-record issues.

    Raises UnreadableInput (and parses nothing) when the stream is not UTF-8,
    the CSV header lacks a schema column, or the JSON root is not an array.
    Otherwise every record either becomes a Challenge or is reported with at
    least one ValidationIssue; input order is preserved.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnreadableInput(f"input is not UTF-8: {exc}") from exc
    else:
        text = data

    fmt = format.strip().lower()
    if fmt == "csv":
        records = _iter_csv_records(text)
    elif fmt == "json":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UnreadableInput(f"invalid JSON: {exc}") from exc
        if not isinstance(payload, list):
            raise UnreadableInput("JSON root must be an array of objects")
        records = (item if isinstance(item, dict) else None for item in payload)
    else:
        raise ValueError(f"unsupported format: {format!r}")

    challenges: list[Challenge] = []
    issues: list[ValidationIssue] = []
    for index, record in enumerate(records):
        if record is None:
            issues.append(ValidationIssue(index, "", IssueCode.MALFORMED_ROW,
                                          f"record {index}: malformed row"))
            continue
        challenge = _parse_record(index, record, issues)
        if challenge is not None:
            challenges.append(challenge)
    return challenges, issues


def build_corpus(challenges: Sequence[Challenge]) -> tuple[Corpus, list[ValidationIssue]]:
    """Index challenges into a Corpus, dropping duplicate ids (first wins)."""
    issues: list[ValidationIssue] = []
    by_id: dict[str, Challenge] = {}
    kept: list[Challenge] = []
    for index, challenge in enumerate(challenges):
        if challenge.id in by_id:
            issues.append(ValidationIssue(index, "id", IssueCode.DUPLICATE_ID,
                                          f"record {index}: duplicate id {challenge.id!r}"))
            continue
        by_id[challenge.id] = challenge
        kept.append(challenge)

    categories: list[str] = []
    by_category: dict[str, list[str]] = {}
    by_difficulty: dict[Difficulty, list[str]] = {d: [] for d in Difficulty}
    by_bloom: dict[BloomLevel, list[str]] = {b: [] for b in BloomLevel}
    for challenge in kept:
        if challenge.category not in by_category:
            categories.append(challenge.category)
            by_category[challenge.category] = []
        by_category[challenge.category].append(challenge.id)
        by_difficulty[challenge.difficulty].append(challenge.id)
        by_bloom[challenge.bloom_level].append(challenge.id)

    corpus = Corpus(
        challenges=tuple(kept),
        category_set=tuple(categories),
        by_id=by_id,
        by_category={c: tuple(ids) for c, ids in by_category.items()},
        by_difficulty={d: tuple(ids) for d, ids in by_difficulty.items()},
        by_bloom={b: tuple(ids) for b, ids in by_bloom.items()},
    )
    return corpus, issues


def export_corpus(corpus: Corpus, format: str) -> bytes:
    """Serialize a corpus so that parse + build round-trips field-for-field."""
    fmt = format.strip().lower()
    if fmt == "csv":
        out = io.StringIO(newline="")
        writer = csv.writer(out, lineterminator="\r\n")
        writer.writerow(SCHEMA_FIELDS)
        for c in corpus.challenges:
            writer.writerow([c.id, c.problem, c.answer, c.category,
                             c.difficulty.value, ";".join(c.tags), c.bloom_level.value])
        return out.getvalue().encode("utf-8")
    if fmt == "json":
        return json.dumps([c.as_dict() for c in corpus.challenges],
                          ensure_ascii=False, indent=2).encode("utf-8")
    raise ValueError(f"unsupported format: {format!r}")
