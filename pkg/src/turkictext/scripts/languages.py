from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from turkictext.scripts.script import Script

PROCESSOR_COLUMNS = (
    "tokenize", "mwt", "morph", "pos", "lemma", "depparse", "ner", "translit", "embeddings", "translate",
)


class UnknownLanguage(KeyError):
    def __str__(self) -> str:
        return f"unsupported language code {self.args[0]!r}"


@dataclass(frozen=True)
class LanguageCode:
    iso: str
    name: str
    branch: str
    default_script: Script
    allowed_scripts: frozenset[Script]

    def __str__(self) -> str:
        return self.iso


@dataclass(frozen=True)
class ScriptValidation:
    lang: LanguageCode
    script: Script

    @property
    def ok(self) -> bool:
        return self.script in self.lang.allowed_scripts

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return f"ok: {self.lang.iso} is written in {self.script.code}"
        allowed = "/".join(sorted(s.code for s in self.lang.allowed_scripts))
        return f"mismatch: {self.lang.iso} uses {allowed}, got {self.script.code}"


def _rows(name: str):
    text = resources.files("turkictext").joinpath(f"data/{name}").read_text("utf-8")
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            yield line.split("\t")


@lru_cache(maxsize=None)
def languages() -> dict[str, LanguageCode]:
    table = {}
    for iso, name, branch, default, allowed in _rows("languages.tsv"):
        table[iso] = LanguageCode(
            iso, name, branch, Script.from_code(default),
            frozenset(Script.from_code(c) for c in allowed.split(",")),
        )
    return table


def get_language(lang: str | LanguageCode) -> LanguageCode:
    if isinstance(lang, LanguageCode):
        return lang
    try:
        return languages()[lang.strip().lower()]
    except KeyError:
        raise UnknownLanguage(lang) from None


@lru_cache(maxsize=None)
def _coverage() -> dict[str, dict[str, str]]:
    rows = list(_rows("coverage.tsv"))
    header, body = rows[0], rows[1:]
    return {r[0]: dict(zip(header[1:], r[1:])) for r in body}


def capabilities(lang: str | LanguageCode) -> dict[str, str]:
    """Processor availability for ``lang``: yes, beta, no or na per processor."""
    return dict(_coverage()[get_language(lang).iso])


def validate_language_script(lang: str | LanguageCode, script: Script | str) -> ScriptValidation:
    """Check a (declared or detected) script against the language's scripts.

    Raises UnknownLanguage for codes outside the supported set.
    """
    return ScriptValidation(get_language(lang), Script.from_code(script))
