"""Script-aware text processing for Turkic languages."""

__version__ = "0.1.0"

from turkictext.doc import Document, Sentence, Span, Token, Word
from turkictext.pipeline import Pipeline, ProcessorSpec, register_processor
from turkictext.registry import download, load_manifest
from turkictext.scripts import NoAlphabeticContent, Script, detect_script, detect_segments
from turkictext.translit import Transliterator, transliterate

__all__ = [
    "Document",
    "NoAlphabeticContent",
    "Pipeline",
    "ProcessorSpec",
    "Script",
    "Sentence",
    "Span",
    "Token",
    "Transliterator",
    "Word",
    "__version__",
    "detect_script",
    "detect_segments",
    "download",
    "load_manifest",
    "register_processor",
    "transliterate",
]
