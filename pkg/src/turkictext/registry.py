"""Model catalog, checksum-verified downloads and the local cache.

Cache layout::

    <root>/<license>/<lang>/<script>/<processor>/<backend>-<version>/<file>

The license comes first so files under different terms never share a
directory below the root.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import tempfile
import threading
import urllib.parse
import urllib.request
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from filelock import FileLock
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from turkictext.scripts import Script

SUPPORTED_SCHEMA_VERSIONS = range(1, 2)
BUILTIN_BACKENDS = {"tokenize": "rule", "mwt": "rule", "translit": "table"}
QUALITY_TIERS = ("production", "stable", "beta", "prototype")
CACHE_ENV = "TURKICTEXT_CACHE"
_CHUNK = 1 << 16


class CatalogError(ValueError):
    def __init__(self, message: str, json_path: str | None = None):
        self.json_path = json_path
        super().__init__(f"{json_path}: {message}" if json_path else message)


class UnsupportedSchemaVersion(CatalogError):
    pass


class NotInCatalog(LookupError):
    def __init__(self, lang: str, processor: str, script: str | None = None):
        self.lang, self.processor, self.script = lang, processor, script
        where = f"{lang}/{script}" if script else lang
        super().__init__(f"no catalog entry for processor {processor!r} in language {where}")


class ChecksumMismatch(IOError):
    def __init__(self, entry: CatalogEntry, actual: str):
        self.entry, self.expected, self.actual = entry, entry.checksum, actual
        super().__init__(f"{entry.url}: expected sha256 {entry.checksum}, got {actual}; file discarded")


@dataclass(frozen=True)
class CatalogEntry:
    lang: str
    script: Script
    processor: str
    backend: str
    url: str
    checksum: str
    license: str
    quality: str
    version: str
    filename: str | None = None
    size: int | None = None

    @property
    def key(self) -> tuple[str, Script, str, str, str]:
        return (self.lang, self.script, self.processor, self.backend, self.version)

    @property
    def basename(self) -> str:
        if self.filename:
            return self.filename
        name = Path(urllib.parse.unquote(urllib.parse.urlparse(self.url).path)).name
        return name or "model.bin"

    def to_dict(self) -> dict:
        data = asdict(self)
        data["script"] = self.script.code
        return {k: v for k, v in data.items() if v is not None}


@dataclass(frozen=True)
class CatalogManifest:
    schema_version: int
    entries: tuple[CatalogEntry, ...] = ()
    defaults: dict[str, dict[str, str]] = field(default_factory=dict)
    source: str | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def default_backend(self, lang: str, processor: str) -> str | None:
        for key in (lang, "*"):
            backend = self.defaults.get(key, {}).get(processor)
            if backend:
                return backend
        return None

    def find(self, lang: str, processor: str, backend: str | None = None,
             script: Script | None = None) -> list[CatalogEntry]:
        return [e for e in self.entries
                if e.lang == lang and e.processor == processor
                and (backend is None or e.backend == backend)
                and (script is None or e.script is script)]

    def with_entries(self, extra: Iterable[CatalogEntry]) -> CatalogManifest:
        return _validated(self.schema_version, tuple(self.entries) + tuple(extra), self.defaults, self.source)

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "defaults": self.defaults,
                "entries": [e.to_dict() for e in self.entries]}


@lru_cache(maxsize=1)
def catalog_schema() -> dict:
    return json.loads(resources.files("turkictext").joinpath("schemas/catalog.v1.json").read_text("utf-8"))


def parse_manifest(data: dict, source: str | None = None) -> CatalogManifest:
    version = data.get("schema_version") if isinstance(data, dict) else None
    if isinstance(version, int) and version not in SUPPORTED_SCHEMA_VERSIONS:
        raise UnsupportedSchemaVersion(
            f"schema_version {version} is not supported (supported: "
            f"{SUPPORTED_SCHEMA_VERSIONS.start}..{SUPPORTED_SCHEMA_VERSIONS.stop - 1})", "$.schema_version")
    error = best_match(Draft202012Validator(catalog_schema()).iter_errors(data))
    if error is not None:
        raise CatalogError(error.message, error.json_path)
    entries = tuple(
        CatalogEntry(**{**raw, "script": Script.from_code(raw["script"])}) for raw in data["entries"]
    )
    return _validated(version, entries, data.get("defaults", {}), source)


def _validated(version: int, entries: tuple[CatalogEntry, ...], defaults: dict, source) -> CatalogManifest:
    seen = {}
    for idx, entry in enumerate(entries):
        if entry.key in seen:
            raise CatalogError(f"duplicate entry {'/'.join(map(str, entry.key))} (also at index {seen[entry.key]})",
                               f"$.entries[{idx}]")
        seen[entry.key] = idx
    for lang, table in defaults.items():
        for processor, backend in table.items():
            if BUILTIN_BACKENDS.get(processor) == backend:
                continue
            if not any(e.processor == processor and e.backend == backend and lang in ("*", e.lang)
                       for e in entries):
                raise CatalogError(f"default backend {backend!r} for {processor!r} has no catalog entry",
                                   f"$.defaults.{lang}.{processor}")
    return CatalogManifest(version, entries, defaults, source)


def load_manifest(path_or_url: str | os.PathLike | None = None) -> CatalogManifest:
    """Load and validate a catalog from a path or file/https URL.

    With no argument, the catalog bundled with the package is returned.
    """
    if path_or_url is None:
        text = resources.files("turkictext").joinpath("data/catalog.json").read_text("utf-8")
        source = "bundled"
    else:
        source = str(path_or_url)
        scheme = urllib.parse.urlparse(source).scheme
        if scheme in ("file", "https", "http"):
            with urllib.request.urlopen(source) as resp:
                text = resp.read().decode("utf-8")
        else:
            text = Path(source).read_text("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"invalid JSON: {exc}") from exc
    return parse_manifest(data, source)


def discover(manifest: CatalogManifest, lang: str | None = None, script: Script | str | None = None,
             processor: str | None = None, quality: str | None = None) -> list[CatalogEntry]:
    if isinstance(script, str):
        script = Script.from_code(script)
    return [e for e in manifest.entries
            if (lang is None or e.lang == lang) and (script is None or e.script is script)
            and (processor is None or e.processor == processor)
            and (quality is None or e.quality == quality)]


def sha256_file(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


def default_cache_root() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "turkictext"


@dataclass
class CacheReport:
    ok: list[Path] = field(default_factory=list)
    corrupt: list[Path] = field(default_factory=list)
    orphaned: list[Path] = field(default_factory=list)
    missing: list[CatalogEntry] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.corrupt and not self.orphaned


class ModelCache:
    """License-segregated local store for catalog files.

    ``transfers`` counts bytes-moving fetches, so callers can check that a
    repeated download was served from the cache.
    """

    LOCK_DIR = ".locks"

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_root()
        self.transfers = 0
        self.transfer_log: list[str] = []
        self._counter_lock = threading.Lock()

    def path_for(self, entry: CatalogEntry) -> Path:
        return (self.root / entry.license / entry.lang / entry.script.code / entry.processor
                / f"{entry.backend}-{entry.version}" / entry.basename)

    def is_cached(self, entry: CatalogEntry) -> bool:
        return self.path_for(entry).is_file()

    def fetch(self, entry: CatalogEntry) -> tuple[Path, bool]:
        """Ensure ``entry`` is cached; return (path, transferred)."""
        final = self.path_for(entry)
        if final.is_file():
            return final, False
        final.parent.mkdir(parents=True, exist_ok=True)
        lock_dir = self.root / self.LOCK_DIR
        lock_dir.mkdir(parents=True, exist_ok=True)
        lock_name = hashlib.sha256(str(final.relative_to(self.root)).encode()).hexdigest()[:32]
        with FileLock(str(lock_dir / f"{lock_name}.lock")):
            if final.is_file():
                return final, False
            fd, tmp = tempfile.mkstemp(prefix=".part-", dir=final.parent)
            try:
                digest = hashlib.sha256()
                with os.fdopen(fd, "wb") as out, urllib.request.urlopen(entry.url) as resp:
                    with self._counter_lock:
                        self.transfers += 1
                        self.transfer_log.append(entry.url)
                    for chunk in iter(lambda: resp.read(_CHUNK), b""):
                        digest.update(chunk)
                        out.write(chunk)
                actual = digest.hexdigest()
                if actual != entry.checksum:
                    raise ChecksumMismatch(entry, actual)
                os.replace(tmp, final)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                _prune_empty(final.parent, self.root)
                raise
        return final, True

    def verify(self, manifest: CatalogManifest) -> CacheReport:
        report = CacheReport()
        known = {}
        for entry in manifest.entries:
            path = self.path_for(entry)
            known[path] = entry
            if not path.is_file():
                report.missing.append(entry)
            elif sha256_file(path) == entry.checksum:
                report.ok.append(path)
            else:
                report.corrupt.append(path)
        if self.root.is_dir():
            for path in sorted(self.root.rglob("*")):
                rel = path.relative_to(self.root)
                if path.is_file() and rel.parts[0] != self.LOCK_DIR and path not in known:
                    report.orphaned.append(path)
        return report

    def remove(self, entry: CatalogEntry) -> None:
        path = self.path_for(entry)
        if path.exists():
            path.unlink()
            _prune_empty(path.parent, self.root)

    def clear(self) -> None:
        if self.root.is_dir():
            shutil.rmtree(self.root)


def _prune_empty(directory: Path, root: Path) -> None:
    while directory != root and directory.is_dir() and not any(directory.iterdir()):
        directory.rmdir()
        directory = directory.parent


@dataclass(frozen=True)
class DownloadResult:
    entry: CatalogEntry
    path: Path
    transferred: bool

    @property
    def status(self) -> str:
        return "downloaded" if self.transferred else "cached"


def select_entries(lang: str, processors: Iterable[str], manifest: CatalogManifest,
                   script: Script | None = None) -> list[CatalogEntry]:
    """Catalog entries needed to run ``processors`` for ``lang``.

    Processors handled by a built-in backend need nothing.  Where the catalog
    names a default backend only its entries are selected.
    """
    chosen = []
    for processor in processors:
        backend = manifest.default_backend(lang, processor)
        if backend is not None and BUILTIN_BACKENDS.get(processor) == backend:
            continue
        found = manifest.find(lang, processor, backend, script)
        if not found:
            if processor in BUILTIN_BACKENDS and backend is None:
                continue
            raise NotInCatalog(lang, processor, script.code if script else None)
        chosen.extend(e for e in found if e not in chosen)
    return chosen


def download(lang: str, processors: Iterable[str] | None = None, manifest: CatalogManifest | None = None,
             cache: ModelCache | None = None, script: Script | None = None) -> list[DownloadResult]:
    """Fetch and verify the files for ``processors`` (all catalogued ones if omitted)."""
    manifest = manifest or load_manifest()
    cache = cache or ModelCache()
    if processors is None:
        processors = sorted({e.processor for e in manifest.entries if e.lang == lang})
    results = []
    for entry in select_entries(lang, list(processors), manifest, script):
        path, transferred = cache.fetch(entry)
        results.append(DownloadResult(entry, path, transferred))
    return results
