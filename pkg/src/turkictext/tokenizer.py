"""Rule-based tokenization and sentence splitting.

One rule set per script family: Latin/Cyrillic, and Arabic (which adds
ZWNJ splitting).  All processing happens in logical order.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from turkictext.doc import Token
from turkictext.scripts import Script

ZWNJ = "‌"
LATIN_CYRILLIC = "LatinCyrillic"
ARABIC = "Arabic"

APOSTROPHES = frozenset("'’ʼ`")
HYPHENS = frozenset("-‐")
NUMBER_JOINERS = frozenset(".,:")
TERMINALS = frozenset(".!?؟…")
CLOSERS = frozenset(")]}»”’\"'›")
OPENERS = frozenset("([{«“\"'‹‘")
ARABIC_PUNCT = frozenset("،؟؛٪۔")


@dataclass(frozen=True)
class TokenizerRules:
    script_family: str = LATIN_CYRILLIC
    punctuation_attach: frozenset[str] = frozenset()
    clitic_patterns: tuple[str, ...] = ()
    apostrophe_chars: frozenset[str] = APOSTROPHES
    split_on_zwnj: bool = False
    abbreviations: frozenset[str] = frozenset()
    _clitics: tuple[re.Pattern, ...] = field(default=(), init=False, repr=False, compare=False)
    _abbrevs: tuple[str, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.split_on_zwnj and self.script_family != ARABIC:
            raise ValueError("ZWNJ splitting is only available for the Arabic rule set")
        object.__setattr__(self, "_clitics", tuple(re.compile(f"(?:{p})$", re.IGNORECASE) for p in self.clitic_patterns))
        object.__setattr__(self, "_abbrevs", tuple(sorted({_fold(a) for a in self.abbreviations}, key=len, reverse=True)))

    @classmethod
    def for_language(cls, lang: str | None = None, script: Script | None = None) -> TokenizerRules:
        return rules_for(lang, script)

    def is_punct(self, ch: str) -> bool:
        return ch in self.punctuation_attach or unicodedata.category(ch).startswith("P")


def _fold(text: str) -> str:
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def _abbreviations(lang: str | None) -> frozenset[str]:
    base = resources.files("turkictext").joinpath("data/abbrev")
    names = ["common.txt"] + ([f"{lang}.txt"] if lang else [])
    out = set()
    for name in names:
        path = base.joinpath(name)
        if path.is_file():
            out.update(line.strip() for line in path.read_text("utf-8").splitlines()
                       if line.strip() and not line.startswith("#"))
    return frozenset(out)


@lru_cache(maxsize=None)
def rules_for(lang: str | None = None, script: Script | None = None,
              clitic_patterns: tuple[str, ...] = ()) -> TokenizerRules:
    """Rule set for a language/script: Arabic script selects the Arabic family."""
    if script is Script.ARABIC:
        # ZWNJ separates words in Uyghur but is word-internal in Persian-style orthographies.
        split = lang not in ("ota", "azb", "klj")
        return TokenizerRules(ARABIC, ARABIC_PUNCT, clitic_patterns, APOSTROPHES, split, _abbreviations(lang))
    return TokenizerRules(LATIN_CYRILLIC, frozenset(), clitic_patterns, APOSTROPHES, False, _abbreviations(lang))


def _is_word_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "LMN"


def _scan_chunk(chunk: str, offset: int, rules: TokenizerRules) -> list[tuple[int, int]]:
    spans = []
    i, n = 0, len(chunk)
    folded = _fold(chunk) if rules._abbrevs else ""
    while i < n:
        ch = chunk[i]
        if ch == ZWNJ and rules.split_on_zwnj:
            i += 1
            continue
        if rules._abbrevs and _is_word_char(ch):
            hit = next((a for a in rules._abbrevs if folded.startswith(a, i)
                        and (i + len(a) == n or not _is_word_char(chunk[i + len(a)]))), None)
            if hit:
                spans.append((i, i + len(hit)))
                i += len(hit)
                continue
        if rules.is_punct(ch):
            j = i + 1
            while j < n and chunk[j] == ch:
                j += 1
            spans.append((i, j))
            i = j
            continue
        j = i + 1
        while j < n:
            c = chunk[j]
            if c == ZWNJ and rules.split_on_zwnj:
                break
            if not rules.is_punct(c):
                j += 1
                continue
            prev, nxt = chunk[j - 1], chunk[j + 1] if j + 1 < n else ""
            if not nxt:
                break
            if c in rules.apostrophe_chars and prev.isalnum() and nxt.isalpha():
                j += 1
            elif c in HYPHENS and prev.isalpha() and nxt.isalpha():
                j += 1
            elif c in NUMBER_JOINERS and prev.isdigit() and nxt.isdigit():
                j += 1
            else:
                break
        spans.extend(_split_clitics(chunk, i, j, rules))
        i = j
    return [(offset + a, offset + b) for a, b in spans]


def _split_clitics(chunk: str, start: int, end: int, rules: TokenizerRules) -> list[tuple[int, int]]:
    word = chunk[start:end]
    for pattern in rules._clitics:
        m = pattern.search(word)
        if m and 0 < m.start() < len(word):
            return [(start, start + m.start()), (start + m.start(), end)]
    return [(start, end)]


def token_spans(text: str, rules: TokenizerRules | None = None) -> list[tuple[int, int]]:
    rules = rules or rules_for()
    spans = []
    for m in re.finditer(r"\S+", text):
        spans.extend(_scan_chunk(m.group(), m.start(), rules))
    return spans


def tokenize(text: str, rules: TokenizerRules | None = None) -> list[Token]:
    """Tokens with exact offsets: ``text[t.start_char:t.end_char] == t.text``."""
    return [Token.single(k, text[a:b], a, b) for k, (a, b) in enumerate(token_spans(text, rules), 1)]


def _starts_sentence(tok: str) -> bool:
    ch = tok[0]
    if ch in OPENERS or ch.isupper():
        return True
    # Scripts without case (Arabic, Old Turkic) start a sentence with any letter.
    return ch.isalpha() and not ch.islower()


def split_sentences(text: str, rules: TokenizerRules | None = None) -> list[tuple[int, int]]:
    """Sentence spans (start, end) over ``text``; together they cover every non-space character."""
    rules = rules or rules_for()
    spans = token_spans(text, rules)
    if not spans:
        return []
    groups: list[list[tuple[int, int]]] = [[]]
    k = 0
    while k < len(spans):
        a, b = spans[k]
        groups[-1].append((a, b))
        tok = text[a:b]
        if set(tok) <= TERMINALS and not _after_initial(text, spans, k):
            while k + 1 < len(spans) and spans[k + 1][0] == spans[k][1] and set(text[slice(*spans[k + 1])]) <= CLOSERS:
                k += 1
                groups[-1].append(spans[k])
            if k + 1 < len(spans):
                nxt_a, nxt_b = spans[k + 1]
                gap = text[spans[k][1]:nxt_a]
                if gap and any(c.isspace() for c in gap) and _starts_sentence(text[nxt_a:nxt_b]):
                    groups.append([])
        k += 1
    bounds = [(g[0][0], g[-1][1]) for g in groups if g]
    out = []
    for idx, (a, b) in enumerate(bounds):
        limit = bounds[idx + 1][0] if idx + 1 < len(bounds) else len(text)
        end = len(text[:limit].rstrip())
        start = a if idx else len(text) - len(text.lstrip())
        out.append((start, max(b, end)))
    return out


def _after_initial(text: str, spans: list[tuple[int, int]], k: int) -> bool:
    """A full stop right after a single capital letter marks an initial, not a sentence end."""
    if text[spans[k][0]:spans[k][1]] != "." or k == 0:
        return False
    pa, pb = spans[k - 1]
    prev = text[pa:pb]
    return pb == spans[k][0] and len(prev) == 1 and prev.isupper()
