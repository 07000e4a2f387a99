"""Dominant-script detection and mixed-script segmentation.

Classification is by codepoint range only: a Cyrillic ``а`` (U+0430) counts
as Cyrillic no matter how much it looks like Latin ``a``.  Only alphabetic
characters inside one of the ranges in ``data/script_ranges.tsv`` are
counted; combining marks, digits, punctuation, whitespace and format
controls (ZWNJ, ZWJ) never are.
"""

from __future__ import annotations

import bisect
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from turkictext.scripts.script import PRIORITY, Script


class NoAlphabeticContent(ValueError):
    """Raised when a string contains no character that can be classified."""


@dataclass(frozen=True)
class ScriptSegment:
    script: Script
    start_char: int
    end_char: int
    text: str


@dataclass(frozen=True)
class ScriptDetection:
    script: Script
    confidence: float
    counts: dict[Script, int] = field(default_factory=dict, compare=False)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def normalize(text: str) -> str:
    """NFC-normalize ``text``."""
    return unicodedata.normalize("NFC", text)


@lru_cache(maxsize=None)
def _ranges() -> tuple[list[int], list[tuple[int, int, Script]]]:
    rows = []
    data = resources.files("turkictext").joinpath("data/script_ranges.tsv").read_text("utf-8")
    for line in data.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        code, start, end, *_ = line.split("\t")
        rows.append((int(start, 16), int(end, 16), Script.from_code(code)))
    rows.sort()
    return [r[0] for r in rows], rows


@lru_cache(maxsize=4096)
def classify_char(ch: str) -> Script | None:
    """Script of a single alphabetic character, or None if it is not classifiable."""
    if not ch.isalpha():
        return None
    cp = ord(ch)
    starts, rows = _ranges()
    i = bisect.bisect_right(starts, cp) - 1
    if i >= 0:
        lo, hi, script = rows[i]
        if lo <= cp <= hi:
            return script
    return None


def detect(text: str) -> ScriptDetection:
    """Detect the dominant script and report a confidence of dominant/total."""
    counts = Counter(s for s in map(classify_char, text) if s is not None)
    total = sum(counts.values())
    if not total:
        raise NoAlphabeticContent(f"no classifiable alphabetic character in {text[:40]!r}")
    best = max(PRIORITY, key=lambda s: (counts[s], -PRIORITY.index(s)))
    return ScriptDetection(best, counts[best] / total, {s: counts[s] for s in PRIORITY if counts[s]})


def detect_script(text: str) -> Script:
    return detect(text).script


def detect_segments(text: str) -> list[ScriptSegment]:
    """Split ``text`` into maximal single-script runs.

    Unclassified characters join the run that is open when they occur;
    characters before the first classified letter join the first run, so
    the segment texts concatenate back to ``text``.
    """
    bounds: list[tuple[int, Script]] = []
    current = None
    for i, ch in enumerate(text):
        script = classify_char(ch)
        if script is not None and script is not current:
            bounds.append((i if bounds else 0, script))
            current = script
    segments = []
    for k, (start, script) in enumerate(bounds):
        end = bounds[k + 1][0] if k + 1 < len(bounds) else len(text)
        segments.append(ScriptSegment(script, start, end, text[start:end]))
    return segments
