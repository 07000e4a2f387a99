"""Transliteration tables: TSV loading, validation and case handling."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from turkictext.scripts import Script

MAX_SOURCE_LEN = 4
HARAKAT = re.compile("[\u064B-\u0652]")
_FILENAME = re.compile(r"^(?P<lang>[a-z]{3})_(?P<source>[A-Za-z]{4})_(?P<target>[A-Za-z]{4})$")


class TableFormatError(ValueError):
    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


class DuplicateKeyError(TableFormatError):
    pass


@dataclass(frozen=True)
class Casing:
    """Per-table case rules.

    Turkic Latin orthographies pair dotted İ/i and dotless I/ı, which
    Python's default ``str.lower``/``str.upper`` get wrong.
    """

    name: str = "default"
    lower_map: Mapping[str, str] = field(default_factory=dict)
    upper_map: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def turkic(cls) -> Casing:
        return cls("turkic", {"I": "ı", "İ": "i"}, {"i": "İ", "ı": "I"})

    def with_pair(self, lower: str, upper: str) -> Casing:
        return Casing(self.name, {**self.lower_map, upper: lower}, {**self.upper_map, lower: upper})

    def lower_char(self, ch: str) -> str:
        if ch in self.lower_map:
            return self.lower_map[ch]
        low = ch.lower()
        return low if len(low) == 1 else ch

    def lower(self, text: str) -> str:
        return "".join(self.lower_char(c) for c in text)

    def upper(self, text: str) -> str:
        return "".join(self.upper_map.get(c) or c.upper() for c in text)

    def is_upper(self, ch: str) -> bool:
        return ch in self.lower_map or ch.isupper()

    def is_lower(self, ch: str) -> bool:
        return ch in self.upper_map or ch.islower()


@dataclass(frozen=True)
class TranslitTable:
    lang: str
    source: Script
    target: Script
    standard: str
    entries: tuple[tuple[str, str], ...]
    reversible: bool = False
    casing: Casing = field(default_factory=Casing, compare=False)
    lookup: Mapping[str, str] = field(init=False, repr=False, compare=False)
    max_source_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seen: dict[str, str] = {}
        for src, tgt in self.entries:
            if not src or len(src) > MAX_SOURCE_LEN:
                raise ValueError(f"source sequence {src!r} must have 1..{MAX_SOURCE_LEN} characters")
            if src in seen:
                raise ValueError(f"duplicate source sequence {src!r}")
            seen[src] = tgt
        object.__setattr__(self, "lookup", MappingProxyType(seen))
        object.__setattr__(self, "max_source_len", max((len(s) for s in seen), default=1))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_expansion(self) -> int:
        """Largest number of output characters any single input character can produce."""
        return max((-(-len(t) // len(s)) for s, t in self.entries), default=1)

    def is_injective(self) -> bool:
        targets = [t for _, t in self.entries]
        return all(targets) and len(set(targets)) == len(targets) and all(len(t) <= MAX_SOURCE_LEN for t in targets)

    def inverted(self) -> TranslitTable:
        """Build the reverse table; only valid when the forward table is injective."""
        if not self.is_injective():
            raise ValueError(f"{self.lang} {self.source.code}->{self.target.code} is not injective; a reverse file is required")
        entries = tuple((self.casing.lower(t), s) for s, t in self.entries)
        return TranslitTable(self.lang, self.target, self.source, self.standard, entries, True, self.casing)


def load_table(path: str | Path, *, lang: str | None = None, source: Script | None = None,
               target: Script | None = None, reversible: bool = False) -> TranslitTable:
    """Load a ``src<TAB>tgt[<TAB>flags]`` table file.

    Lines starting with ``#!`` are directives (``standard``, ``casing``,
    ``case-pair``, ``strip-harakat``, ``lang``, ``source``, ``target``);
    other ``#`` lines are comments.  Language and scripts default to the
    ``<lang>_<src>_<tgt>.tsv`` file name.
    """
    path = Path(path)
    meta: dict[str, str] = {}
    casing = Casing()
    strip_harakat = False
    rows: list[tuple[int, str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if line.startswith("#!"):
                key, _, value = line[2:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "casing":
                    if value not in ("default", "turkic"):
                        raise TableFormatError(path, lineno, f"unknown casing {value!r}")
                    casing = Casing.turkic() if value == "turkic" else Casing()
                elif key.startswith("case-pair"):
                    pair = (value or key[len("case-pair"):]).split()
                    if len(pair) != 2:
                        raise TableFormatError(path, lineno, "case-pair needs a lowercase and an uppercase letter")
                    casing = casing.with_pair(*pair)
                elif key == "strip-harakat":
                    strip_harakat = True
                else:
                    meta[key] = value
                continue
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise TableFormatError(path, lineno, f"expected src<TAB>tgt, got {line!r}")
            if len(cols) > 3:
                raise TableFormatError(path, lineno, f"too many columns ({len(cols)})")
            src, tgt = unicodedata.normalize("NFC", cols[0]), unicodedata.normalize("NFC", cols[1])
            if not src:
                raise TableFormatError(path, lineno, "empty source sequence")
            if len(src) > MAX_SOURCE_LEN:
                raise TableFormatError(path, lineno, f"source {src!r} longer than {MAX_SOURCE_LEN} characters")
            rows.append((lineno, src, tgt))
    if not rows:
        raise TableFormatError(path, None, "table has no entries")

    seen: dict[str, int] = {}
    entries = []
    for lineno, src, tgt in rows:
        key = casing.lower(src)
        if key in seen:
            raise DuplicateKeyError(path, lineno, f"source {src!r} already defined on line {seen[key]}")
        seen[key] = lineno
        if strip_harakat:
            tgt = HARAKAT.sub("", tgt)
        entries.append((key, tgt))

    m = _FILENAME.match(path.stem)
    try:
        lang = lang or meta.get("lang") or (m and m["lang"])
        source = source or Script.from_code(meta.get("source") or (m and m["source"]) or "")
        target = target or Script.from_code(meta.get("target") or (m and m["target"]) or "")
    except ValueError as exc:
        raise TableFormatError(path, None, f"cannot determine scripts: {exc}") from None
    if not lang:
        raise TableFormatError(path, None, "cannot determine language; name the file <lang>_<src>_<tgt>.tsv")
    return TranslitTable(lang, source, target, meta.get("standard", ""), tuple(entries), reversible, casing)
