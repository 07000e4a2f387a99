"""Table-driven multi-word token expansion."""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from turkictext.doc import Sentence, Token, Word

# Only character classes, groups, quantifiers and anchors are allowed so the
# tables stay portable to other regex engines.
_FORBIDDEN = re.compile(r"\(\?|\\[1-9]|\\[pPkg]")
_TEMPLATE = re.compile(r"\$(\d+)")


class MwtTableError(ValueError):
    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}" if line else f"{path}: {message}")


@dataclass(frozen=True)
class MwtRule:
    pattern: str
    pieces: tuple[str, ...]
    lemmas: tuple[str | None, ...]
    upos: tuple[str | None, ...]
    exact: bool = True

    def __post_init__(self):
        if _FORBIDDEN.search(self.pattern):
            raise ValueError(f"unsupported regex construct in {self.pattern!r}")
        regex = re.compile(self.pattern, re.IGNORECASE)
        if len(self.pieces) < 2:
            raise ValueError("a rule needs at least two pieces")
        for hints in (self.lemmas, self.upos):
            if hints and len(hints) != len(self.pieces):
                raise ValueError("lemma/upos hints must align with pieces")
        for piece in self.pieces:
            for ref in _TEMPLATE.findall(piece):
                if not 0 <= int(ref) <= regex.groups:
                    raise ValueError(f"template ${ref} has no matching group in {self.pattern!r}")
        object.__setattr__(self, "_regex", regex)

    def apply(self, surface: str) -> list[str] | None:
        m = self._regex.fullmatch(surface)
        if not m:
            return None
        pieces = [_TEMPLATE.sub(lambda g: m.group(int(g.group(1))) or "", p) for p in self.pieces]
        if any(not p for p in pieces):
            return None
        if self.exact and "".join(pieces) != surface:
            return None
        return pieces


@dataclass(frozen=True)
class MwtRuleTable:
    lang: str
    rules: tuple[MwtRule, ...] = ()

    def match(self, surface: str) -> tuple[MwtRule, list[str]] | None:
        for rule in self.rules:
            pieces = rule.apply(surface)
            if pieces:
                return rule, pieces
        return None


def _hints(field: str, n: int) -> tuple[str | None, ...]:
    if field in ("", "_"):
        return ()
    values = field.split(" ")
    return tuple(None if v == "_" else v for v in values) if len(values) == n else tuple(values)


def parse_mwt_table(text: str, lang: str, path: str = "<string>") -> MwtRuleTable:
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise MwtTableError(path, lineno, f"expected 5 tab-separated columns, got {len(cols)}")
        pattern, pieces, lemmas, upos, flags = cols
        if flags not in ("exact", "free"):
            raise MwtTableError(path, lineno, f"flag must be 'exact' or 'free', got {flags!r}")
        piece_list = tuple(pieces.split(" "))
        try:
            rules.append(MwtRule(pattern, piece_list, _hints(lemmas, len(piece_list)),
                                 _hints(upos, len(piece_list)), flags == "exact"))
        except (ValueError, re.error) as exc:
            raise MwtTableError(path, lineno, str(exc)) from exc
    return MwtRuleTable(lang, tuple(rules))


def load_mwt_table(path: str | Path, lang: str) -> MwtRuleTable:
    path = Path(path)
    return parse_mwt_table(path.read_text("utf-8"), lang, str(path))


@lru_cache(maxsize=None)
def bundled_table(lang: str) -> MwtRuleTable:
    """The shipped table for ``lang``; languages without one get an empty table."""
    res = resources.files("turkictext").joinpath(f"data/mwt/{lang}.tsv")
    if not res.is_file():
        return MwtRuleTable(lang)
    return parse_mwt_table(res.read_text("utf-8"), lang, f"data/mwt/{lang}.tsv")


def expand_mwt(sentence: Sentence, table: MwtRuleTable) -> Sentence:
    """Return a copy of ``sentence`` with matching tokens split into words.

    Tokens that are already multi-word are left alone, so the function is
    idempotent.
    """
    out = copy.deepcopy(sentence)
    expansions = []
    for token in out.tokens:
        if token.is_mwt or len(token.words) != 1:
            continue
        hit = table.match(token.text)
        if hit is not None:
            expansions.append((token, _words(token, *hit)))
    if not expansions:
        return out
    # Old ids collide with the new ones, so heads are remapped by hand.
    grown = {id(token): len(words) for token, words in expansions}
    mapping = {}
    next_id = 1
    for token in out.tokens:
        for word in token.words:
            mapping[word.id] = next_id
            next_id += 1
        next_id += grown.get(id(token), 1) - 1
    for token, words in expansions:
        token.words = words
    next_id = 1
    for token in out.tokens:
        first = next_id
        for word in token.words:
            word.id = next_id
            next_id += 1
        token.id_range = (first, next_id - 1)
    for word in out.words:
        if word.head:
            word.head = mapping.get(word.head, word.head)
    return out


def _words(token: Token, rule: MwtRule, pieces: list[str]) -> list[Word]:
    original = token.words[0]
    words = []
    pos = token.start_char
    for k, piece in enumerate(pieces):
        start = end = None
        if rule.exact and pos is not None:
            start, end = pos, pos + len(piece)
            pos = end
        words.append(Word(
            id=0, text=piece,
            lemma=rule.lemmas[k] if rule.lemmas else None,
            upos=rule.upos[k] if rule.upos else None,
            start_char=start, end_char=end,
        ))
    # MWT ranges live on the token; the first word keeps any existing head.
    words[0].head, words[0].deprel = original.head, original.deprel
    return words
