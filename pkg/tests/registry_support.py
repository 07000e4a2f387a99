"""Builders for file:// catalogs over the fixture payloads."""

from __future__ import annotations

import csv
import hashlib
import json
import shutil
from pathlib import Path

REGISTRY_FIXTURES = Path(__file__).parent / "fixtures" / "registry"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def entry(path: Path, lang: str, script: str, processor: str, backend: str, *,
          license: str = "MIT", quality: str = "beta", version: str = "1.0", checksum: str | None = None) -> dict:
    return {
        "lang": lang, "script": script, "processor": processor, "backend": backend,
        "url": path.resolve().as_uri(), "checksum": checksum or sha256_hex(path.read_bytes()),
        "license": license, "quality": quality, "version": version,
    }


def three_entry_catalog(directory: Path) -> dict:
    """Catalog over copies of the fixture payloads placed in ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    for name in ("tur_tokenize.bin", "kaz_pos.bin", "kaz_ner.bin"):
        shutil.copy(REGISTRY_FIXTURES / name, directory / name)
    return {
        "schema_version": 1,
        "defaults": {"kaz": {"pos": "stub"}},
        "entries": [
            entry(directory / "tur_tokenize.bin", "tur", "Latn", "tokenize", "neural", license="Apache-2.0",
                  quality="production"),
            entry(directory / "kaz_pos.bin", "kaz", "Cyrl", "pos", "stub", license="CC-BY-SA-4.0", quality="stable"),
            entry(directory / "kaz_ner.bin", "kaz", "Cyrl", "ner", "stub", license="MIT", quality="production"),
        ],
    }


def morph_quality_catalog(directory: Path) -> dict:
    """One morph entry per language, tiers taken from the fixture table."""
    directory.mkdir(parents=True, exist_ok=True)
    with open(REGISTRY_FIXTURES / "morph_quality.tsv", encoding="utf-8") as fh:
        rows = list(csv.DictReader((line for line in fh if not line.startswith("#")), delimiter="\t"))
    entries = []
    for row in rows:
        payload = directory / f"{row['lang']}.fst"
        payload.write_bytes(f"analyzer {row['lang']}\n".encode())
        entries.append(entry(payload, row["lang"], "Latn", "morph", "fst", license="GPL-3.0-or-later",
                             quality=row["quality"]))
    return {"schema_version": 1, "entries": entries}


def write_catalog(data: dict, path: Path) -> Path:
    path.write_text(json.dumps(data, ensure_ascii=False, indent=1), encoding="utf-8")
    return path
