"""Script enumeration, detection and language/script metadata."""

from turkictext.scripts.script import Script
from turkictext.scripts.detector import (
    NoAlphabeticContent,
    ScriptDetection,
    ScriptSegment,
    classify_char,
    detect,
    detect_script,
    detect_segments,
    normalize,
)
from turkictext.scripts.languages import (
    LanguageCode,
    ScriptValidation,
    UnknownLanguage,
    capabilities,
    get_language,
    languages,
    validate_language_script,
)

__all__ = [
    "Script",
    "NoAlphabeticContent",
    "ScriptDetection",
    "ScriptSegment",
    "classify_char",
    "detect",
    "detect_script",
    "detect_segments",
    "normalize",
    "LanguageCode",
    "ScriptValidation",
    "UnknownLanguage",
    "capabilities",
    "get_language",
    "languages",
    "validate_language_script",
]
