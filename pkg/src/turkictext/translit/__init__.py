from turkictext.translit.engine import (
    TranslitPair,
    Transliterator,
    UnmappableCharacter,
    UnsupportedPair,
    find_pair,
    get_table,
    supported_pairs,
    transliterate,
)
from turkictext.translit.table import (
    Casing,
    DuplicateKeyError,
    TableFormatError,
    TranslitTable,
    load_table,
)

__all__ = [
    "Casing",
    "DuplicateKeyError",
    "TableFormatError",
    "TranslitPair",
    "TranslitTable",
    "Transliterator",
    "UnmappableCharacter",
    "UnsupportedPair",
    "find_pair",
    "get_table",
    "load_table",
    "supported_pairs",
    "transliterate",
]
