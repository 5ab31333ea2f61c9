from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anveshana.corpus import (BloomLevel, Challenge, Difficulty, IssueCode, build_corpus,
                              export_corpus, parse_challenges, split_tags)
from anveshana.errors import UnreadableInput

from .conftest import make_challenge

HEADER = "id,problem,answer,category,difficulty,tags,bloom_level"


def csv_bytes(*rows: str) -> bytes:
    return ("\r\n".join([HEADER, *rows]) + "\r\n").encode("utf-8")


class TestParseChallenges:
    def test_single_csv_row_maps_fields(self):
        data = csv_bytes('q1,"What is overfitting?","Fitting noise, not signal",'
                         'Machine Learning,Easy,"ml;basics",Understand')
        challenges, issues = parse_challenges(data, "csv")
        assert issues == []
        (c,) = challenges
        assert c.id == "q1"
        assert c.problem == "What is overfitting?"
        assert c.answer == "Fitting noise, not signal"
        assert c.category == "Machine Learning"
        assert c.difficulty is Difficulty.EASY
        assert c.tags == ("ml", "basics")
        assert c.bloom_level is BloomLevel.UNDERSTAND

    def test_unknown_difficulty_rejected(self):
        data = csv_bytes("q1,Some problem text,Some answer,Cat,Impossible,,Apply")
        challenges, issues = parse_challenges(data, "csv")
        assert challenges == []
        assert [i.code for i in issues] == [IssueCode.UNKNOWN_DIFFICULTY]
        assert issues[0].record_index == 0

    def test_unknown_bloom_rejected(self):
        data = csv_bytes("q1,Some problem text,Some answer,Cat,Easy,,Transcend")
        _, issues = parse_challenges(data, "csv")
        assert [i.code for i in issues] == [IssueCode.UNKNOWN_BLOOM_LEVEL]

    def test_envalues_parse_case_insensitively(self):
        data = csv_bytes("q1,Some problem text,Some answer,Cat,eAsY,,uNdErStAnD")
        challenges, issues = parse_challenges(data, "csv")
        assert not issues
        assert challenges[0].difficulty is Difficulty.EASY
        assert challenges[0].bloom_level is BloomLevel.UNDERSTAND

    def test_empty_fields_rejected_after_trimming(self):
        data = csv_bytes('q1,"   ",Answer,Cat,Easy,,Apply')
        challenges, issues = parse_challenges(data, "csv")
        assert challenges == []
        assert issues[0].code is IssueCode.EMPTY_FIELD
        assert issues[0].field == "problem"

    def test_not_utf8_aborts(self):
        with pytest.raises(UnreadableInput):
            parse_challenges(b"\xff\xfe" + b"\x00" * 10, "csv")

    def test_missing_header_column_aborts(self):
        data = b"id,problem,answer,category,difficulty,tags\r\nq1,p,a,c,Easy,\r\n"
        with pytest.raises(UnreadableInput, match="bloom_level"):
            parse_challenges(data, "csv")

    def test_extra_columns_ignored(self):
        data = (b"id,problem,answer,category,difficulty,tags,bloom_level,extra\r\n"
                b"q1,A problem statement,An answer,Cat,Hard,t1,Create,whatever\r\n")
        challenges, issues = parse_challenges(data, "csv")
        assert not issues and challenges[0].difficulty is Difficulty.HARD

    def test_json_array_parses(self):
        payload = [{"id": "q1", "problem": "A problem", "answer": "An answer",
                    "category": "Cat", "difficulty": "Expert",
                    "tags": ["a", " b "], "bloom_level": "Create"}]
        challenges, issues = parse_challenges(json.dumps(payload).encode(), "json")
        assert not issues
        assert challenges[0].tags == ("a", "b")

    def test_json_missing_field_reported(self):
        payload = [{"id": "q1", "problem": "p", "answer": "a",
                    "category": "c", "difficulty": "Easy", "tags": []}]
        challenges, issues = parse_challenges(json.dumps(payload).encode(), "json")
        assert challenges == []
        assert [(i.code, i.field) for i in issues] == [(IssueCode.MISSING_FIELD, "bloom_level")]

    def test_json_root_must_be_array(self):
        with pytest.raises(UnreadableInput):
            parse_challenges(b'{"id": "q1"}', "json")

    def test_json_non_object_entry_is_malformed(self):
        challenges, issues = parse_challenges(b'[42]', "json")
        assert challenges == []
        assert issues[0].code is IssueCode.MALFORMED_ROW

    def test_short_csv_row_is_malformed(self):
        data = csv_bytes("q1,only-two-fields")
        challenges, issues = parse_challenges(data, "csv")
        assert challenges == []
        assert issues[0].code is IssueCode.MALFORMED_ROW

    def test_accepted_plus_rejected_equals_input_count(self):
        rng = random.Random(5)
        rows = []
        for i in range(120):
            kind = rng.randrange(4)
            if kind == 0:
                rows.append(f"q{i},Problem text {i},Answer {i},Cat,Easy,,Apply")
            elif kind == 1:
                rows.append(f"q{i},Problem text {i},Answer {i},Cat,Nope,,Apply")
            elif kind == 2:
                rows.append(f"q{i},,Answer {i},Cat,Easy,,Apply")
            else:
                rows.append(f"q{i},broken")
        challenges, issues = parse_challenges(csv_bytes(*rows), "csv")
        rejected = {i.record_index for i in issues}
        assert len(challenges) + len(rejected) == 120
        # no invalid record ever becomes a Challenge
        for c in challenges:
            assert c.problem.strip() and c.answer.strip() and c.id.strip()


class TestSplitTags:
    @pytest.mark.parametrize("raw,expected", [
        ("a;b", ("a", "b")),
        ("a, b", ("a", "b")),
        (" a ;; b,", ("a", "b")),
        ("", ()),
    ])
    def test_separators_and_trimming(self, raw, expected):
        assert split_tags(raw) == expected


class TestBuildCorpus:
    def test_empty_input(self):
        corpus, issues = build_corpus([])
        assert len(corpus) == 0 and issues == []
        assert corpus.category_set == ()

    def test_duplicate_id_first_wins(self):
        first = make_challenge(1)
        shadow = make_challenge(1, category="Other")
        corpus, issues = build_corpus([first, shadow])
        assert len(corpus) == 1
        assert corpus.by_id["q1"].category == "Machine Learning"
        assert [i.code for i in issues] == [IssueCode.DUPLICATE_ID]
        assert issues[0].record_index == 1

    def test_indexes_consistent(self):
        rng = random.Random(11)
        challenges = [make_challenge(i, category=rng.choice(["A", "B"]),
                                     difficulty=rng.choice(list(Difficulty)),
                                     bloom=rng.choice(list(BloomLevel)))
                      for i in range(40)]
        corpus, _ = build_corpus(challenges)
        assert set(corpus.category_set) == {"A", "B"}
        for index in (corpus.by_category, corpus.by_difficulty, corpus.by_bloom):
            for ids in index.values():
                for cid in ids:
                    assert cid in corpus.by_id
        assert sum(len(v) for v in corpus.by_category.values()) == len(corpus)


class TestExport:
    def test_empty_corpus_csv_is_header_only(self):
        corpus, _ = build_corpus([])
        assert export_corpus(corpus, "csv") == (HEADER + "\r\n").encode()

    def test_empty_corpus_json_is_empty_array(self):
        corpus, _ = build_corpus([])
        assert json.loads(export_corpus(corpus, "json")) == []

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_fixture(self, fmt):
        corpus, _ = build_corpus([make_challenge(i) for i in range(7)])
        parsed, issues = parse_challenges(export_corpus(corpus, fmt), fmt)
        assert not issues
        rebuilt, issues = build_corpus(parsed)
        assert not issues
        assert rebuilt == corpus


# Text that survives a trim-normalizing parse: strip-stable and non-empty.
_trimmed_text = st.text(
    alphabet=st.sampled_from(list("abcdefgh XYZ,\"'\n?!:0123456789")),
    min_size=1, max_size=50,
).map(str.strip).filter(bool)
_tag = st.text(alphabet="abcxyz-_0123456789", min_size=1, max_size=8)


@st.composite
def challenge_lists(draw):
    size = draw(st.integers(min_value=0, max_value=10))
    challenges = []
    for i in range(size):
        challenges.append(Challenge(
            id=f"id-{i}",
            problem=draw(_trimmed_text),
            answer=draw(_trimmed_text),
            category=draw(_tag),
            difficulty=draw(st.sampled_from(list(Difficulty))),
            tags=tuple(draw(st.lists(_tag, max_size=3))),
            bloom_level=draw(st.sampled_from(list(BloomLevel))),
        ))
    return challenges


class TestRoundTripProperty:
    @settings(max_examples=120, deadline=None)
    @given(challenges=challenge_lists(), fmt=st.sampled_from(["csv", "json"]))
    def test_parse_export_identity(self, challenges, fmt):
        corpus, _ = build_corpus(challenges)
        parsed, issues = parse_challenges(export_corpus(corpus, fmt), fmt)
        assert not issues
        rebuilt, issues = build_corpus(parsed)
        assert not issues
        assert rebuilt == corpus
