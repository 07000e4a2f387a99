from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from turkictext.scripts import Script, get_language
from turkictext.translit.table import TranslitTable, load_table


class UnsupportedPair(ValueError):
    def __init__(self, lang: str, source: Script, target: Script):
        self.lang, self.source, self.target = lang, source, target
        available = ", ".join(f"{p.lang} {p.source.code}->{p.target.code}" for p in supported_pairs())
        super().__init__(
            f"no transliteration for {lang} {source.code}->{target.code}; supported: {available}"
        )


class UnmappableCharacter(ValueError):
    def __init__(self, char: str, offset: int):
        self.char, self.offset = char, offset
        super().__init__(f"unmappable character {char!r} (U+{ord(char):04X}) at offset {offset}")


@dataclass(frozen=True)
class TranslitPair:
    lang: str
    source: Script
    target: Script
    standard: str

    def __iter__(self):
        return iter((self.lang, self.source, self.target, self.standard))


def _data_dir():
    return resources.files("turkictext").joinpath("data/translit")


@lru_cache(maxsize=None)
def supported_pairs() -> tuple[TranslitPair, ...]:
    pairs = []
    for line in _data_dir().joinpath("pairs.tsv").read_text("utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            lang, src, tgt, standard = line.split("\t")
            pairs.append(TranslitPair(lang, Script.from_code(src), Script.from_code(tgt), standard))
    return tuple(pairs)


def find_pair(lang: str, source: Script, target: Script) -> TranslitPair | None:
    for pair in supported_pairs():
        if (pair.lang, pair.source, pair.target) == (lang, source, target):
            return pair
    return None


def _table_file(lang: str, source: Script, target: Script):
    return _data_dir().joinpath(f"{lang}_{source.code}_{target.code}.tsv")


@lru_cache(maxsize=None)
def get_table(lang: str, source: Script, target: Script) -> TranslitTable:
    """Bundled table for a supported direction.

    A missing reverse file is generated from the forward table when that
    table is injective.
    """
    pair = find_pair(lang, source, target)
    if pair is None:
        raise UnsupportedPair(lang, source, target)
    reverse_supported = find_pair(lang, target, source) is not None
    path = _table_file(lang, source, target)
    if path.is_file():
        with resources.as_file(path) as p:
            return load_table(p, reversible=reverse_supported)
    forward = _table_file(lang, target, source)
    if forward.is_file():
        with resources.as_file(forward) as p:
            return load_table(p, reversible=True).inverted()
    raise UnsupportedPair(lang, source, target)


class Transliterator:
    """Greedy longest-match transliteration over one table.

    At each position the longest source sequence in the table (up to four
    characters) wins.  Matching is done on case-folded text and the case of
    the input is re-applied to the output.
    """

    def __init__(self, lang: str, source: Script | str, target: Script | str, *,
                 preserve_unknown: bool = True):
        lang = get_language(lang).iso
        self.table = get_table(lang, Script.from_code(source), Script.from_code(target))
        self.preserve_unknown = preserve_unknown

    @classmethod
    def from_table(cls, table: TranslitTable, *, preserve_unknown: bool = True) -> Transliterator:
        self = cls.__new__(cls)
        self.table = table
        self.preserve_unknown = preserve_unknown
        return self

    @property
    def lang(self) -> str:
        return self.table.lang

    @property
    def source(self) -> Script:
        return self.table.source

    @property
    def target(self) -> Script:
        return self.table.target

    def reverse(self, **kwargs) -> Transliterator:
        return Transliterator(self.lang, self.target, self.source, **kwargs)

    def __repr__(self) -> str:
        return f"Transliterator({self.lang!r}, source={self.source}, target={self.target})"

    def __call__(self, text: str) -> str:
        return self.transliterate(text)

    def transliterate(self, text: str) -> str:
        text = unicodedata.normalize("NFC", text)
        table, casing = self.table, self.table.casing
        lookup, longest = table.lookup, table.max_source_len
        folded = casing.lower(text)
        out = []
        i, n = 0, len(text)
        while i < n:
            for size in range(min(longest, n - i), 0, -1):
                tgt = lookup.get(folded[i:i + size])
                if tgt is not None:
                    out.append(self._recase(text, i, size, tgt))
                    i += size
                    break
            else:
                ch = text[i]
                if not self.preserve_unknown and unicodedata.category(ch)[0] in "LM":
                    raise UnmappableCharacter(ch, i)
                out.append(ch)
                i += 1
        return "".join(out)

    def _recase(self, text: str, i: int, size: int, tgt: str) -> str:
        casing = self.table.casing
        chunk = text[i:i + size]
        if not tgt:
            return tgt
        if not any(casing.is_upper(c) or casing.is_lower(c) for c in chunk):
            # Caseless source (e.g. a modifier-letter apostrophe) mapped to a
            # cased letter: upper case only inside an all-caps run.
            before = self._cased_neighbour(text, i - 1, -1)
            after = self._cased_neighbour(text, i + size, 1)
            if (before or after) and all(casing.is_upper(c) for c in (before, after) if c):
                return casing.upper(tgt)
            return tgt
        if not casing.is_upper(chunk[0]):
            return tgt
        cased = [c for c in chunk if casing.is_upper(c) or casing.is_lower(c)]
        if len(cased) > 1:
            all_caps = all(casing.is_upper(c) for c in cased)
        else:
            # A lone capital is all-caps when the nearest cased letter in the
            # same word (following first, then preceding) is upper case too.
            neighbour = self._cased_neighbour(text, i + size, 1) or self._cased_neighbour(text, i - 1, -1)
            all_caps = bool(neighbour) and casing.is_upper(neighbour)
        if all_caps:
            return casing.upper(tgt)
        return casing.upper(tgt[0]) + tgt[1:]

    def _cased_neighbour(self, text: str, j: int, step: int) -> str:
        casing = self.table.casing
        while 0 <= j < len(text) and text[j].isalpha():
            if casing.is_upper(text[j]) or casing.is_lower(text[j]):
                return text[j]
            j += step
        return ""


def transliterate(text: str, lang: str, source: Script | str, target: Script | str, **kwargs) -> str:
    return Transliterator(lang, source, target, **kwargs).transliterate(text)
