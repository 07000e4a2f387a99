"""Random string generation for transliteration round-trip checks."""

import json
import random
from pathlib import Path

from turkictext.scripts import Script
from turkictext.translit import Transliterator, get_table

EXCEPTIONS = json.loads((Path(__file__).parent / "fixtures" / "roundtrip_exceptions.json").read_text("utf-8"))
DIRECTIONS = [k for k in EXCEPTIONS if not k.startswith("_")]


def converters(key: str) -> tuple[Transliterator, Transliterator]:
    lang, src, tgt = key.split()
    fwd = Transliterator(lang, src, tgt)
    return fwd, fwd.reverse()


def alphabet(key: str) -> list[str]:
    lang, src, tgt = key.split()
    table = get_table(lang, Script.from_code(src), Script.from_code(tgt))
    letters = {s for s in table.lookup if len(s) == 1 and s.isalpha()}
    return sorted(letters - set(EXCEPTIONS[key]["exclude"]))


def random_strings(key: str, n: int = 1000, seed: int = 0) -> list[str]:
    """Words over the unambiguous alphabet, in lower, title or upper case.

    When the intermediate script has no case (Arabic), only lowercase input
    can survive the trip, so no capitals are generated.
    """
    lang, src, tgt = key.split()
    table = get_table(lang, Script.from_code(src), Script.from_code(tgt))
    caseless = Script.from_code(tgt) is Script.ARABIC
    arabic = Script.from_code(src) is Script.ARABIC
    separators = ["، ", " "] if arabic else [" ", ", ", " - "]
    finals = ["", ".", "؟"] if arabic else ["", ".", "?"]
    letters = alphabet(key)
    rng = random.Random(f"{seed}:{key}")
    out = []
    for _ in range(n):
        words = []
        for _ in range(rng.randint(1, 4)):
            word = "".join(rng.choice(letters) for _ in range(rng.randint(1, 8)))
            # A whole word that is a single digraph (ДЖ, SH) is ambiguous in
            # capitals, so short words are never fully upper-cased.
            style = 1.0 if caseless else rng.random()
            if style < 0.2 and len(word) < 3:
                style = 0.3
            if style < 0.2:
                word = table.casing.upper(word)
            elif style < 0.4:
                word = table.casing.upper(word[0]) + word[1:]
            words.append(word)
        out.append(rng.choice(separators).join(words) + rng.choice(finals))
    return out
