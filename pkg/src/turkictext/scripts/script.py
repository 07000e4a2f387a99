from __future__ import annotations

from enum import Enum


class Script(Enum):
    """The four script families, valued by their ISO 15924 code."""

    LATIN = "Latn"
    CYRILLIC = "Cyrl"
    ARABIC = "Arab"
    OLD_TURKIC = "Orkh"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str | Script) -> Script:
        """Accept a 4-letter code (any case) or an enum member name."""
        if isinstance(code, Script):
            return code
        norm = code.strip()
        for member in cls:
            if norm.lower() == member.value.lower() or norm.upper() == member.name:
                return member
        raise ValueError(f"unknown script {code!r}; expected one of {[s.value for s in cls]}")


# Tie-break priority when two scripts have the same count.
PRIORITY = (Script.LATIN, Script.CYRILLIC, Script.ARABIC, Script.OLD_TURKIC)
