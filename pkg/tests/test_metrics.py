from __future__ import annotations

import json
import math
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PARALLEL
from turkictext.metrics import (
    TSV_COLUMNS,
    AdapterError,
    BPEAdapter,
    CharAdapter,
    EmptyInput,
    IdentityAdapter,
    compare,
    extract_words,
    fertility,
    nearest_rank,
    toy_bpe,
)

ENGLISH = [
    "Ali saw the book.",
    "The children were playing in the garden yesterday afternoon.",
    "She has been working at the university for several years.",
    "We will travel to the mountains next summer.",
    "The weather forecast predicts heavy rain tomorrow.",
]


class FixedCounts:
    """Adapter that replays a list of counts, one per call."""

    name = "fixed"

    def __init__(self, counts):
        self.counts = iter(counts)

    def count(self, word):
        return next(self.counts)


def reference_percentile(values, p):
    ordered = sorted(values)
    k = 1
    while k < len(ordered) and k / len(ordered) < p:
        k += 1
    return ordered[k - 1]


def apply_merges_sequentially(word, merges):
    """Apply each merge over the whole word, in rank order."""
    symbols = list(word)
    for a, b in merges:
        out, i = [], 0
        while i < len(symbols):
            if i + 1 < len(symbols) and symbols[i] == a and symbols[i + 1] == b:
                out.append(a + b)
                i += 2
            else:
                out.append(symbols[i])
                i += 1
        symbols = out
    return tuple(symbols)


def test_identity_mean_is_one():
    report = fertility(["a", "kitaplarımızdan", "ئەلى"], IdentityAdapter(), "mix")
    assert (report.mean_fertility, report.p95_tokens_per_word, report.max_tokens_per_word) == (1.0, 1, 1)
    assert report.n_words == 3 and report.tokenizer_name == "identity"


def test_nine_ones_and_an_eleven():
    report = fertility(["w"] * 10, FixedCounts([1] * 9 + [11]))
    assert report.mean_fertility == 2.0
    assert report.p95_tokens_per_word == 11
    assert report.max_tokens_per_word == 11


@pytest.mark.parametrize(
    "values, p, expected",
    [([5], 0.95, 5), ([1, 2, 3, 4], 0.5, 2), ([1, 2, 3, 4], 0.75, 3), (list(range(1, 21)), 0.95, 19),
     (list(range(1, 101)), 0.95, 95), ([3, 1, 2], 1.0, 3)],
)
def test_nearest_rank_table(values, p, expected):
    assert nearest_rank(values, p) == expected


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=60), st.sampled_from([0.5, 0.9, 0.95, 0.99]))
def test_property_nearest_rank_matches_reference(values, p):
    assert nearest_rank(values, p) == reference_percentile(values, p)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=40), st.randoms())
def test_property_bounds_and_permutation(counts, rng):
    report = fertility(["w"] * len(counts), FixedCounts(counts))
    assert min(counts) <= report.mean_fertility <= report.max_tokens_per_word == max(counts)
    assert report.p95_tokens_per_word <= report.max_tokens_per_word
    shuffled = list(counts)
    rng.shuffle(shuffled)
    again = fertility(["w"] * len(counts), FixedCounts(shuffled))
    assert math.isclose(again.mean_fertility, report.mean_fertility)
    assert again.p95_tokens_per_word == report.p95_tokens_per_word


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=20), st.integers(2, 5))
def test_property_repeating_corpus_changes_nothing(counts, k):
    once = fertility(["w"] * len(counts), FixedCounts(counts))
    many = fertility(["w"] * (len(counts) * k), FixedCounts(counts * k))
    assert math.isclose(once.mean_fertility, many.mean_fertility)
    assert once.max_tokens_per_word == many.max_tokens_per_word


def test_errors():
    with pytest.raises(EmptyInput):
        fertility([], IdentityAdapter())
    with pytest.raises(EmptyInput):
        nearest_rank([], 0.95)
    with pytest.raises(ValueError):
        fertility([""], IdentityAdapter())
    with pytest.raises(AdapterError):
        fertility(["a"], FixedCounts([0]))


def test_char_adapter():
    assert fertility(["ab", "cdef"], CharAdapter()).mean_fertility == 3.0


def test_bpe_training_by_hand():
    bpe = BPEAdapter.train(["ab ab ab abc"], num_merges=10)
    assert list(bpe.ranks) == [("a", "b")]
    assert bpe.encode("abc") == ("ab", "c")
    assert bpe.count("cab") == 2


def test_bpe_matches_sequential_oracle():
    bpe = toy_bpe()
    merges = sorted(bpe.ranks, key=bpe.ranks.get)
    words = extract_words([s for _, _, s in PARALLEL]) + ["kitaplarımızdan", "gördüklerimizden", "almatyda"]
    for word in words:
        assert bpe.encode(word) == apply_merges_sequentially(word, merges)
        assert "".join(bpe.encode(word)) == word


def test_bpe_from_files(tmp_path):
    merges = tmp_path / "merges.txt"
    merges.write_text("#version: 0.2\na b\nab c\n", encoding="utf-8")
    bpe = BPEAdapter.from_files(merges)
    assert bpe.name == "merges" and bpe.encode("abcab") == ("abc", "ab")
    vocab = tmp_path / "vocab.json"
    vocab.write_text(json.dumps({"a": 0, "b": 1, "c": 2, "ab": 3}), encoding="utf-8")
    # "abc" is not in the vocabulary, so it falls back to single symbols
    assert BPEAdapter.from_files(merges, vocab).encode("abc") == ("a", "b", "c")
    assert BPEAdapter.from_files(merges, vocab).encode("ab") == ("ab",)
    bad = tmp_path / "bad.txt"
    bad.write_text("a b c\n", encoding="utf-8")
    with pytest.raises(ValueError):
        BPEAdapter.from_files(bad)


def test_byte_level_counts_bytes(tmp_path):
    merges = tmp_path / "m.txt"
    merges.write_text("", encoding="utf-8")
    bpe = BPEAdapter.from_files(merges, byte_level=True)
    # leading-space marker plus two bytes per Cyrillic letter
    assert bpe.count("кітап") == 1 + 2 * 5
    assert bpe.count("ab") == 3
    assert bpe.encode("a") == ("Ġ", "a")


def test_extract_words_drops_punctuation():
    assert extract_words(["Ali kitabı gördü."], "tur") == ["Ali", "kitabı", "gördü"]
    assert extract_words(["...", "  "]) == []


def test_toy_bpe_taxes_uyghur_more_than_turkish():
    corpus = {lang: [s] for lang, _, s in PARALLEL}
    table = compare(corpus, [toy_bpe()])
    assert table.get("tur", "toy-bpe").mean_fertility < table.get("uig", "toy-bpe").mean_fertility


def test_compare_outputs_and_failures():
    corpus = {"tur": ["Ali kitabı gördü."], "kaz": ["Али кітапты көрді."]}

    class Broken:
        name = "broken"

        def count(self, word):
            raise RuntimeError("offline")

    table = compare(corpus, [IdentityAdapter(), Broken()])
    assert len(table.reports) == 2 and len(table.failures) == 2
    lines = table.to_tsv().splitlines()
    assert lines[0].split("\t") == list(TSV_COLUMNS)
    assert lines[1].split("\t") == ["tur", "identity", "3", "1.0", "1", "1"]
    data = json.loads(table.to_json())
    assert data["failures"][0]["tokenizer"] == "broken"
    with pytest.raises(EmptyInput):
        compare({}, [IdentityAdapter()])
    with pytest.raises(EmptyInput):
        compare({"tur": ["..."]}, [IdentityAdapter()])


@pytest.mark.skipif(not os.environ.get("TURKICTEXT_BPE_MERGES"),
                    reason="set TURKICTEXT_BPE_MERGES to a merges.txt of a real subword tokenizer")
def test_english_reference_range():
    adapter = BPEAdapter.from_files(os.environ["TURKICTEXT_BPE_MERGES"], os.environ.get("TURKICTEXT_BPE_VOCAB"),
                                    byte_level=os.environ.get("TURKICTEXT_BPE_BYTE_LEVEL", "1") == "1")
    report = fertility(extract_words(ENGLISH, "eng"), adapter, "eng")
    assert 1.08 <= report.mean_fertility <= 2.09
