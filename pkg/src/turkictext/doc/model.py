"""Document -> Sentence -> Token -> Word hierarchy, plus entity Spans."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from turkictext.scripts import Script


@dataclass
class Word:
    id: int
    text: str
    lemma: str | None = None
    upos: str | None = None
    xpos: str | None = None
    feats: dict[str, str] | None = None
    head: int | None = None
    deprel: str | None = None
    deps: str | None = None
    misc: list[str] | None = None
    start_char: int | None = None
    end_char: int | None = None
    ner: str | None = None

    def feats_string(self) -> str | None:
        if not self.feats:
            return None
        return "|".join(f"{k}={self.feats[k]}" for k in sorted(self.feats, key=lambda k: (k.lower(), k)))


@dataclass
class Token:
    id_range: tuple[int, int]
    text: str
    words: list[Word] = field(default_factory=list)
    start_char: int | None = None
    end_char: int | None = None
    misc: list[str] | None = None

    def __post_init__(self):
        self.id_range = tuple(self.id_range)

    @property
    def is_mwt(self) -> bool:
        return self.id_range[0] != self.id_range[1]

    @classmethod
    def single(cls, word_id: int, text: str, start_char: int | None = None,
               end_char: int | None = None) -> Token:
        word = Word(word_id, text, start_char=start_char, end_char=end_char)
        return cls((word_id, word_id), text, [word], start_char, end_char)


@dataclass
class Sentence:
    tokens: list[Token] = field(default_factory=list)
    text: str = ""
    comments: list[str] = field(default_factory=list)

    @property
    def words(self) -> list[Word]:
        return [w for t in self.tokens for w in t.words]

    def renumber(self) -> None:
        """Reassign word ids 1..N in order, keeping token ranges consistent."""
        mapping = {}
        next_id = 1
        for token in self.tokens:
            first = next_id
            for word in token.words:
                mapping.setdefault(word.id, next_id)
                word.id = next_id
                next_id += 1
            token.id_range = (first, next_id - 1)
        for word in self.words:
            if word.head:
                word.head = mapping.get(word.head, word.head)


@dataclass
class Span:
    label: str
    start_char: int
    end_char: int
    text: str


@dataclass
class ProcessorRecord:
    """One executed pipeline step."""

    processor: str
    backend: str
    language: str
    script: str | None = None
    detail: str | None = None
    script_declared: bool = False

    @property
    def label(self) -> str:
        return f"{self.processor}({self.detail})" if self.detail else self.processor

    def __str__(self) -> str:
        return self.label


@dataclass
class Document:
    text: str = ""
    sentences: list[Sentence] = field(default_factory=list)
    entities: list[Span] = field(default_factory=list)
    script: Script | None = None
    embedding: list[float] | None = None
    translation: str | None = None
    processor_log: list[ProcessorRecord] = field(default_factory=list)
    annotations: dict[str, str] = field(default_factory=dict)
    # Text the processors actually saw when the pipeline transliterated the
    # input first; token offsets index into it.
    processed_text: str | None = None

    @property
    def working_text(self) -> str:
        return self.text if self.processed_text is None else self.processed_text

    @property
    def tokens(self) -> list[Token]:
        return [t for s in self.sentences for t in s.tokens]

    @property
    def words(self) -> list[Word]:
        return [w for s in self.sentences for w in s.words]

    def iter_words(self) -> Iterator[tuple[Sentence, Word]]:
        for sentence in self.sentences:
            for word in sentence.words:
                yield sentence, word

    def to_conllu(self) -> str:
        from turkictext.doc.conllu import to_conllu
        return to_conllu(self)

    @classmethod
    def from_conllu(cls, data: str) -> Document:
        from turkictext.doc.conllu import from_conllu
        return from_conllu(data)

    def to_json(self, **kwargs) -> str:
        from turkictext.doc.jsonio import to_json
        return to_json(self, **kwargs)

    @classmethod
    def from_json(cls, data: str) -> Document:
        from turkictext.doc.jsonio import from_json
        return from_json(data)

    def check(self) -> None:
        """Raise ValueError if a structural invariant is violated."""
        for s_idx, sentence in enumerate(self.sentences):
            words = sentence.words
            n = len(words)
            for k, word in enumerate(words, 1):
                if word.id != k:
                    raise ValueError(f"sentence {s_idx}: word ids must run 1..{n}, found {word.id} at position {k}")
                if word.head is not None and not (0 <= word.head <= n and word.head != word.id):
                    raise ValueError(f"sentence {s_idx}: word {word.id} has invalid head {word.head}")
                if (word.start_char is not None and word.end_char is not None
                        and word.start_char >= word.end_char):
                    raise ValueError(f"sentence {s_idx}: word {word.id} has empty offset range")
            for token in sentence.tokens:
                lo, hi = token.id_range
                if hi < lo or [w.id for w in token.words] != list(range(lo, hi + 1)):
                    raise ValueError(f"sentence {s_idx}: token {token.text!r} range {lo}-{hi} does not match its words")
                if not token.is_mwt and token.words[0].text != token.text:
                    raise ValueError(f"sentence {s_idx}: single-word token {token.text!r} differs from its word")
        for span in self.entities:
            if not 0 <= span.start_char < span.end_char:
                raise ValueError(f"entity {span.label} has invalid offsets")
