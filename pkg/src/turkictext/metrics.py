"""Tokenizer fertility: subword tokens per word.

Adapters map one word to a positive token count.  The bundled toy BPE is
trained on a small Latin-script corpus, which is enough to show how much
more a Latin-trained vocabulary fragments other scripts.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence, runtime_checkable

from turkictext.scripts import detect_script, normalize
from turkictext.tokenizer import rules_for, tokenize

TSV_COLUMNS = ("lang", "tokenizer", "n_words", "mean_fertility", "p95", "max")


class EmptyInput(ValueError):
    pass


class AdapterError(RuntimeError):
    def __init__(self, adapter: str, word: str, detail: str):
        self.adapter, self.word = adapter, word
        super().__init__(f"adapter {adapter!r} on {word!r}: {detail}")


@runtime_checkable
class SubwordTokenizerAdapter(Protocol):
    name: str

    def count(self, word: str) -> int: ...


@dataclass(frozen=True)
class FertilityReport:
    lang: str
    tokenizer_name: str
    n_words: int
    mean_fertility: float
    p95_tokens_per_word: int
    max_tokens_per_word: int

    def row(self) -> dict:
        return {"lang": self.lang, "tokenizer": self.tokenizer_name, "n_words": self.n_words,
                "mean_fertility": round(self.mean_fertility, 4), "p95": self.p95_tokens_per_word,
                "max": self.max_tokens_per_word}


def nearest_rank(values: Sequence[int], p: float) -> int:
    """Nearest-rank percentile: the value at rank ceil(p * N) of the sorted data."""
    if not values:
        raise EmptyInput("percentile of empty data")
    ordered = sorted(values)
    rank = max(1, math.ceil(round(p * len(ordered), 9)))
    return ordered[rank - 1]


def fertility(words: Iterable[str], adapter: SubwordTokenizerAdapter, lang: str = "") -> FertilityReport:
    words = list(words)
    if not words:
        raise EmptyInput("fertility needs at least one word")
    counts = []
    for word in words:
        if not word:
            raise ValueError("words must be non-empty")
        n = adapter.count(word)
        if not isinstance(n, int) or n < 1:
            raise AdapterError(adapter.name, word, f"returned {n!r}, expected a positive integer")
        counts.append(n)
    return FertilityReport(lang, adapter.name, len(counts), sum(counts) / len(counts),
                           nearest_rank(counts, 0.95), max(counts))


class IdentityAdapter:
    """One token per word."""

    name = "identity"

    def count(self, word: str) -> int:
        return 1


class CharAdapter:
    name = "chars"

    def count(self, word: str) -> int:
        return len(word)


def _bytes_to_unicode() -> dict[int, str]:
    # Printable stand-ins for raw bytes, as used by byte-level BPE vocabularies.
    keep = list(range(ord("!"), ord("~") + 1)) + list(range(0xA1, 0xAD)) + list(range(0xAE, 0x100))
    table, extra = {}, 0
    for b in range(256):
        if b in keep:
            table[b] = chr(b)
        else:
            table[b] = chr(256 + extra)
            extra += 1
    return table


_BYTE_MAP = _bytes_to_unicode()


class BPEAdapter:
    """Greedy rank-ordered pair merging over characters (or mapped bytes)."""

    def __init__(self, merges: Sequence[tuple[str, str]], name: str = "bpe", *,
                 vocab: Iterable[str] | None = None, byte_level: bool = False, prefix: str = ""):
        self.name = name
        self.ranks = {pair: rank for rank, pair in enumerate(merges)}
        self.vocab = frozenset(vocab) if vocab is not None else None
        self.byte_level = byte_level
        self.prefix = prefix
        self._cache: dict[str, tuple[str, ...]] = {}

    @classmethod
    def train(cls, texts: Iterable[str], num_merges: int = 500, name: str = "toy-bpe") -> BPEAdapter:
        freqs: Counter[tuple[str, ...]] = Counter()
        for text in texts:
            for word in text.split():
                freqs[tuple(normalize(word))] += 1
        merges = []
        for _ in range(num_merges):
            pairs: Counter[tuple[str, str]] = Counter()
            for symbols, n in freqs.items():
                for pair in zip(symbols, symbols[1:]):
                    pairs[pair] += n
            if not pairs:
                break
            best = min(pairs, key=lambda p: (-pairs[p], p))
            if pairs[best] < 2:
                break
            merges.append(best)
            freqs = Counter({_merge(symbols, best): n for symbols, n in freqs.items()})
        return cls(merges, name)

    @classmethod
    def from_files(cls, merges_path: str | Path, vocab_path: str | Path | None = None, *,
                   name: str | None = None, byte_level: bool = False) -> BPEAdapter:
        """Load a ``merges.txt`` (one ``a b`` pair per line) and optional ``vocab.json``."""
        merges = []
        for line in Path(merges_path).read_text("utf-8").splitlines():
            if not line.strip() or line.startswith("#version"):
                continue
            parts = line.split(" ")
            if len(parts) != 2:
                raise ValueError(f"{merges_path}: malformed merge line {line!r}")
            merges.append((parts[0], parts[1]))
        vocab = None
        if vocab_path is not None:
            vocab = json.loads(Path(vocab_path).read_text("utf-8")).keys()
        # Byte-level vocabularies mark word starts with a mapped leading space.
        prefix = " " if byte_level else ""
        return cls(merges, name or Path(merges_path).stem, vocab=vocab, byte_level=byte_level, prefix=prefix)

    def _symbols(self, word: str) -> list[str]:
        if self.byte_level:
            return [_BYTE_MAP[b] for b in (self.prefix + word).encode("utf-8")]
        return list(self.prefix + word)

    def encode(self, word: str) -> tuple[str, ...]:
        if word in self._cache:
            return self._cache[word]
        symbols = self._symbols(word)
        while len(symbols) > 1:
            ranked = [(self.ranks.get(p, math.inf), i) for i, p in enumerate(zip(symbols, symbols[1:]))]
            rank, i = min(ranked)
            if rank == math.inf:
                break
            symbols = list(_merge(tuple(symbols), (symbols[i], symbols[i + 1])))
        if self.vocab is not None:
            # Pieces missing from the vocabulary fall back to single symbols.
            symbols = [s for piece in symbols for s in ([piece] if piece in self.vocab else list(piece))]
        result = tuple(symbols)
        if len(self._cache) < 100_000:
            self._cache[word] = result
        return result

    def count(self, word: str) -> int:
        return len(self.encode(word))


def _merge(symbols: tuple[str, ...], pair: tuple[str, str]) -> tuple[str, ...]:
    out, i = [], 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(symbols[i] + symbols[i + 1])
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


@lru_cache(maxsize=None)
def toy_bpe(num_merges: int = 500) -> BPEAdapter:
    text = resources.files("turkictext").joinpath("data/bpe/latin_corpus.txt").read_text("utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return BPEAdapter.train(lines, num_merges, name="toy-bpe")


def extract_words(sentences: Iterable[str], lang: str | None = None) -> list[str]:
    """Tokens with at least one letter; punctuation-only tokens are dropped."""
    words = []
    for sentence in sentences:
        sentence = normalize(sentence)
        if not any(c.isalpha() for c in sentence):
            continue
        rules = rules_for(lang, detect_script(sentence))
        words.extend(t.text for t in tokenize(sentence, rules) if any(c.isalpha() for c in t.text))
    return words


@dataclass(frozen=True)
class CellFailure:
    lang: str
    tokenizer: str
    error: str


@dataclass
class ComparisonTable:
    reports: list[FertilityReport] = field(default_factory=list)
    failures: list[CellFailure] = field(default_factory=list)

    def get(self, lang: str, tokenizer: str) -> FertilityReport:
        for report in self.reports:
            if report.lang == lang and report.tokenizer_name == tokenizer:
                return report
        raise KeyError((lang, tokenizer))

    def to_tsv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, TSV_COLUMNS, delimiter="\t", lineterminator="\n")
        writer.writeheader()
        for report in self.reports:
            writer.writerow(report.row())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"reports": [r.row() for r in self.reports],
                           "failures": [asdict(f) for f in self.failures]}, ensure_ascii=False, indent=2)


def compare(corpus: Mapping[str, Sequence[str]], adapters: Sequence[SubwordTokenizerAdapter]) -> ComparisonTable:
    """One report per (language, adapter); a failing cell is recorded, not raised."""
    if not corpus:
        raise EmptyInput("empty corpus")
    table = ComparisonTable()
    for lang, sentences in corpus.items():
        words = extract_words(sentences, lang)
        if not words:
            raise EmptyInput(f"no words for language {lang!r}")
        for adapter in adapters:
            try:
                table.reports.append(fertility(words, adapter, lang))
            except Exception as exc:
                table.failures.append(CellFailure(lang, adapter.name, f"{type(exc).__name__}: {exc}"))
    return table
