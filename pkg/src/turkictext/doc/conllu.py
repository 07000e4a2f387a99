"""CoNLL-U reading and writing.

Offsets and NER labels travel in the MISC column as ``start_char=``,
``end_char=`` and ``NER=`` items; all other MISC items are kept verbatim.
The ``# text =`` comment is read into ``Sentence.text`` and written back
after the other comments.
"""

from __future__ import annotations

import re

from turkictext.doc.model import Document, Sentence, Token, Word

_TEXT_COMMENT = re.compile(r"^#\s*text\s*=\s?(.*)$")
_RANGE = re.compile(r"^(\d+)-(\d+)$")
_OWN_MISC = ("start_char", "end_char", "NER")


class ConlluParseError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _col(value) -> str:
    if value is None or value == "":
        return "_"
    return str(value)


def _misc(items: list[str] | None, start: int | None, end: int | None, ner: str | None = None) -> str:
    out = list(items or [])
    if start is not None:
        out.append(f"start_char={start}")
    if end is not None:
        out.append(f"end_char={end}")
    if ner is not None:
        out.append(f"NER={ner}")
    return "|".join(out) if out else "_"


def _word_line(w: Word) -> str:
    cols = [
        str(w.id), w.text, _col(w.lemma), _col(w.upos), _col(w.xpos), _col(w.feats_string()),
        _col(w.head), _col(w.deprel), _col(w.deps), _misc(w.misc, w.start_char, w.end_char, w.ner),
    ]
    return "\t".join(cols)


def to_conllu(doc: Document) -> str:
    blocks = []
    for sentence in doc.sentences:
        lines = list(sentence.comments)
        if sentence.text:
            lines.append("# text = " + re.sub(r"[\r\n\t]", " ", sentence.text))
        for token in sentence.tokens:
            if token.is_mwt:
                a, b = token.id_range
                misc = _misc(token.misc, token.start_char, token.end_char)
                lines.append("\t".join([f"{a}-{b}", token.text] + ["_"] * 7 + [misc]))
            lines.extend(_word_line(w) for w in token.words)
        blocks.append("\n".join(lines) + "\n\n")
    return "".join(blocks)


def _opt(value: str) -> str | None:
    return None if value == "_" else value


def _split_misc(value: str, lineno: int) -> tuple[list[str] | None, dict]:
    if value == "_":
        return None, {}
    rest, own = [], {}
    for item in value.split("|"):
        key, eq, val = item.partition("=")
        if eq and key in _OWN_MISC:
            if key != "NER":
                if not val.isdigit():
                    raise ConlluParseError(f"{key} must be a non-negative integer, got {val!r}", lineno)
                own[key] = int(val)
            else:
                own[key] = val
        else:
            rest.append(item)
    return rest or None, own


def _feats(value: str, lineno: int) -> dict[str, str] | None:
    if value == "_":
        return None
    feats = {}
    for item in value.split("|"):
        key, eq, val = item.partition("=")
        if not eq or not key or not val:
            raise ConlluParseError(f"malformed feature {item!r}", lineno)
        if key in feats:
            raise ConlluParseError(f"duplicate feature {key!r}", lineno)
        feats[key] = val
    return feats


def _int(value: str, what: str, lineno: int) -> int:
    if re.fullmatch(r"\d+\.\d+", value):
        raise ConlluParseError(f"empty nodes ({value}) are not supported", lineno)
    if not value.isdigit():
        raise ConlluParseError(f"{what} must be an integer, got {value!r}", lineno)
    return int(value)


class _SentenceBuilder:
    def __init__(self):
        self.sentence = Sentence()
        self.pending: tuple[int, int, Token, int] | None = None
        self.expected = 1
        self.first_line: int | None = None
        self.head_lines: list[tuple[Word, int]] = []

    @property
    def empty(self) -> bool:
        return not self.sentence.tokens and not self.sentence.comments and not self.sentence.text

    def comment(self, line: str, lineno: int) -> None:
        if self.sentence.tokens:
            raise ConlluParseError("comment after word lines", lineno)
        m = _TEXT_COMMENT.match(line)
        if m:
            self.sentence.text = m.group(1)
        else:
            self.sentence.comments.append(line)
        self.first_line = self.first_line or lineno

    def row(self, cols: list[str], lineno: int) -> None:
        self.first_line = self.first_line or lineno
        m = _RANGE.match(cols[0])
        if m:
            a, b = int(m.group(1)), int(m.group(2))
            if self.pending is not None:
                raise ConlluParseError(f"multi-word range {a}-{b} overlaps range {self.pending[0]}-{self.pending[1]}", lineno)
            if a != self.expected or b <= a:
                raise ConlluParseError(f"multi-word range {a}-{b} must start at {self.expected} and span at least two words", lineno)
            misc, own = _split_misc(cols[9], lineno)
            token = Token((a, b), cols[1], [], own.get("start_char"), own.get("end_char"), misc)
            self.pending = (a, b, token, lineno)
            self.sentence.tokens.append(token)
            return
        wid = _int(cols[0], "word id", lineno)
        if wid != self.expected:
            raise ConlluParseError(f"expected word id {self.expected}, got {wid}", lineno)
        self.expected += 1
        misc, own = _split_misc(cols[9], lineno)
        head = None if cols[6] == "_" else _int(cols[6], "head", lineno)
        word = Word(
            id=wid, text=cols[1], lemma=_opt(cols[2]), upos=_opt(cols[3]), xpos=_opt(cols[4]),
            feats=_feats(cols[5], lineno), head=head, deprel=_opt(cols[7]), deps=_opt(cols[8]), misc=misc,
            start_char=own.get("start_char"), end_char=own.get("end_char"), ner=own.get("NER"),
        )
        if head is not None:
            self.head_lines.append((word, lineno))
        if self.pending is not None:
            a, b, token, _ = self.pending
            token.words.append(word)
            if wid == b:
                self.pending = None
        else:
            self.sentence.tokens.append(Token((wid, wid), word.text, [word], word.start_char, word.end_char))

    def finish(self, lineno: int) -> Sentence:
        if self.pending is not None:
            a, b, _, at = self.pending
            raise ConlluParseError(f"multi-word range {a}-{b} is missing words", at)
        if not self.sentence.tokens:
            raise ConlluParseError("sentence has no word lines", self.first_line or lineno)
        n = self.expected - 1
        for word, at in self.head_lines:
            if word.head > n:
                raise ConlluParseError(f"head {word.head} out of range (sentence has {n} words)", at)
            if word.head == word.id:
                raise ConlluParseError(f"word {word.id} is its own head", at)
        return self.sentence


def from_conllu(data: str) -> Document:
    """Parse CoNLL-U text; errors carry the 1-based line number."""
    sentences = []
    builder = _SentenceBuilder()
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r")
        if not line.strip():
            if not builder.empty:
                sentences.append(builder.finish(lineno))
                builder = _SentenceBuilder()
            continue
        if line.startswith("#"):
            builder.comment(line, lineno)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
        builder.row(cols, lineno)
    if not builder.empty:
        sentences.append(builder.finish(len(lines) + 1))
    text = " ".join(s.text for s in sentences if s.text)
    return Document(text=text, sentences=sentences)
