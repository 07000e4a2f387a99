"""Processor registry, plan resolution and pipeline execution.

A pipeline is built once from a language, a list of processor names and
optional overrides.  Construction resolves dependencies, picks a backend for
every step, decides whether the input must be transliterated into the
script a model expects, and loads the processors.  The resulting object is
immutable and may be shared across threads.

When the input is transliterated before processing, token offsets index
into ``Document.processed_text``; ``Document.text`` keeps the original.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from turkictext.doc import Document, ProcessorRecord, Sentence, Token
from turkictext.mwt import bundled_table, expand_mwt, load_mwt_table
from turkictext.registry import BUILTIN_BACKENDS, CatalogManifest, ModelCache, load_manifest
from turkictext.scripts import Script, UnknownLanguage, detect_script, get_language, normalize
from turkictext.scripts.script import PRIORITY
from turkictext.tokenizer import rules_for, split_sentences, token_spans
from turkictext.translit import Transliterator, find_pair

CANONICAL_ORDER = ("tokenize", "mwt", "morph", "pos", "lemma", "depparse", "ner",
                   "embeddings", "sentiment", "translate", "translit")

DEFAULT_REQUIRES: dict[str, frozenset[str]] = {
    "tokenize": frozenset(),
    "mwt": frozenset({"tokenize"}),
    "morph": frozenset({"tokenize"}),
    "pos": frozenset({"tokenize"}),
    "lemma": frozenset({"tokenize", "pos"}),
    "depparse": frozenset({"tokenize", "pos"}),
    "ner": frozenset({"tokenize"}),
    "embeddings": frozenset(),
    "sentiment": frozenset({"tokenize"}),
    "translate": frozenset(),
    "translit": frozenset(),
}

DEFAULT_PROVIDES: dict[str, frozenset[str]] = {
    "tokenize": frozenset({"sentences", "tokens"}),
    "mwt": frozenset({"words"}),
    "morph": frozenset({"lemma", "feats"}),
    "pos": frozenset({"upos", "xpos"}),
    "lemma": frozenset({"lemma"}),
    "depparse": frozenset({"head", "deprel"}),
    "ner": frozenset({"ner", "entities"}),
    "embeddings": frozenset({"embedding"}),
    "sentiment": frozenset({"sentiment"}),
    "translate": frozenset({"translation"}),
    "translit": frozenset({"translit"}),
}

FORMATS = ("conllu", "json")


class PipelineError(Exception):
    pass


class UnknownProcessor(PipelineError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown processor {name!r}; known: {', '.join(CANONICAL_ORDER)}")


UnsupportedLanguage = UnknownLanguage


class MissingBackend(PipelineError, LookupError):
    def __init__(self, processor: str, lang: str, backend: str | None = None):
        self.processor, self.lang, self.backend = processor, lang, backend
        if backend:
            msg = f"backend {backend!r} for processor {processor!r} is not registered"
        else:
            msg = (f"no backend available for processor {processor!r} ({lang}): "
                   "no catalog default and no registered implementation")
        super().__init__(msg)


class NoTranslitRoute(PipelineError, ValueError):
    def __init__(self, lang: str, source: Script, target: Script):
        self.lang, self.source, self.target = lang, source, target
        super().__init__(f"models for {lang} expect {target.code} input but no "
                         f"{source.code}->{target.code} transliteration exists")


class RegistrationError(PipelineError, ValueError):
    pass


class ProcessorFailure(PipelineError):
    def __init__(self, processor: str, backend: str, cause: BaseException):
        self.processor, self.backend, self.cause = processor, backend, cause
        super().__init__(f"processor {processor!r} (backend {backend!r}) failed: {cause}")


class ModelNotCached(PipelineError, FileNotFoundError):
    def __init__(self, processor: str, path: Path):
        self.processor, self.path = processor, path
        super().__init__(f"model for {processor!r} is not cached at {path}; run download() first")


class InputEncodingError(PipelineError, ValueError):
    def __init__(self, path, offset: int, reason: str):
        self.path, self.offset = str(path), offset
        super().__init__(f"{path}: invalid UTF-8 at byte offset {offset} ({reason})")


@dataclass(frozen=True)
class ProcessorSpec:
    name: str
    requires: frozenset[str] = None  # type: ignore[assignment]
    provides: frozenset[str] = None  # type: ignore[assignment]
    backend: str = "custom"

    def __post_init__(self):
        if self.name not in CANONICAL_ORDER:
            raise UnknownProcessor(self.name)
        requires = DEFAULT_REQUIRES[self.name] if self.requires is None else frozenset(self.requires)
        provides = DEFAULT_PROVIDES[self.name] if self.provides is None else frozenset(self.provides)
        for req in requires:
            if req not in CANONICAL_ORDER:
                raise UnknownProcessor(req)
        if not provides:
            raise RegistrationError(f"processor {self.name!r} must provide at least one layer")
        object.__setattr__(self, "requires", requires)
        object.__setattr__(self, "provides", provides)


@dataclass(frozen=True)
class ProcessorContext:
    """What a processor receives when it is loaded."""

    lang: str
    spec: ProcessorSpec
    script: Script | None
    model_paths: tuple[Path, ...] = ()
    config: Mapping[str, Any] = field(default_factory=dict)


class Processor:
    """Base class for processors.

    Subclasses are constructed with a :class:`ProcessorContext` and implement
    :meth:`process`, which may mutate the document or return a new one.
    """

    def __init__(self, context: ProcessorContext):
        self.context = context
        self.load()

    def load(self) -> None:
        pass

    def process(self, doc: Document) -> Document | None:
        raise NotImplementedError


Factory = Callable[[ProcessorContext], Any]


class ProcessorRegistry:
    def __init__(self, *, builtins: bool = True):
        self._entries: dict[tuple[str, str], tuple[ProcessorSpec, Factory]] = {}
        self._lock = threading.Lock()
        if builtins:
            self.register(ProcessorSpec("tokenize", backend="rule"), RuleTokenizer)
            self.register(ProcessorSpec("mwt", backend="rule"), RuleMwt)
            self.register(ProcessorSpec("translit", backend="table"), TableTranslit)

    def copy(self) -> ProcessorRegistry:
        clone = ProcessorRegistry(builtins=False)
        clone._entries = dict(self._entries)
        return clone

    def register(self, spec: ProcessorSpec, implementation: Factory, *, override: bool = False) -> None:
        key = (spec.name, spec.backend)
        with self._lock:
            if key in self._entries and not override:
                raise RegistrationError(
                    f"processor {spec.name!r} with backend {spec.backend!r} is already registered; "
                    "pass override=True to replace it")
            candidate = dict(self._entries)
            candidate[key] = (spec, implementation)
            _check_acyclic(candidate)
            self._entries = candidate

    def get(self, name: str, backend: str) -> tuple[ProcessorSpec, Factory] | None:
        return self._entries.get((name, backend))

    def backends(self, name: str) -> list[str]:
        return [b for (n, b) in self._entries if n == name]

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self._entries


def _check_acyclic(entries: Mapping[tuple[str, str], tuple[ProcessorSpec, Factory]]) -> None:
    graph: dict[str, set[str]] = {}
    for (name, _), (spec, _) in entries.items():
        graph.setdefault(name, set()).update(spec.requires)
    state: dict[str, int] = {}

    def visit(node: str, path: list[str]) -> None:
        state[node] = 1
        for nxt in graph.get(node, ()):
            if state.get(nxt) == 1:
                cycle = path[path.index(nxt):] + [nxt] if nxt in path else [node, nxt]
                raise RegistrationError(f"dependency cycle: {' -> '.join(cycle)}")
            if nxt not in state:
                visit(nxt, path + [nxt])
        state[node] = 2

    for node in graph:
        if node not in state:
            visit(node, [node])


@dataclass(frozen=True)
class PipelineConfig:
    lang: str
    processors: tuple[str, ...] = ("tokenize",)
    script: Script | None = None
    overrides: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        procs = (self.processors,) if isinstance(self.processors, str) else tuple(self.processors)
        for name in procs:
            if name not in CANONICAL_ORDER:
                raise UnknownProcessor(name)
        object.__setattr__(self, "processors", procs)
        if self.script is not None:
            object.__setattr__(self, "script", Script.from_code(self.script))
        object.__setattr__(self, "overrides", dict(self.overrides))


@dataclass(frozen=True)
class PlanStep:
    spec: ProcessorSpec
    model_script: Script | None = None

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def backend(self) -> str:
        return self.spec.backend


@dataclass(frozen=True)
class PipelinePlan:
    lang: str
    declared_script: Script | None
    steps: tuple[PlanStep, ...]
    model_scripts: frozenset[Script] = frozenset()
    pre_translit: tuple[Script, Script] | None = None
    post_translit: bool = False

    @property
    def ordered_processors(self) -> list[ProcessorSpec]:
        return [s.spec for s in self.steps]

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.steps]

    def route_for(self, script: Script | None) -> tuple[tuple[Script, Script] | None, bool]:
        """(pre_translit, post_translit) for input written in ``script``."""
        if script is None or not self.model_scripts or script in self.model_scripts:
            return None, False
        for target in sorted(self.model_scripts, key=PRIORITY.index):
            if find_pair(self.lang, script, target):
                return (script, target), find_pair(self.lang, target, script) is not None
        raise NoTranslitRoute(self.lang, script, min(self.model_scripts, key=PRIORITY.index))


def _choose_backend(name: str, config: PipelineConfig, catalog: CatalogManifest,
                    registry: ProcessorRegistry) -> str | None:
    explicit = config.overrides.get(f"{name}_backend")
    if explicit:
        if (name, explicit) not in registry:
            raise MissingBackend(name, config.lang, explicit)
        return explicit
    default = catalog.default_backend(config.lang, name)
    if default and (name, default) in registry:
        return default
    builtin = BUILTIN_BACKENDS.get(name)
    if builtin and (name, builtin) in registry:
        return builtin
    available = registry.backends(name)
    with_models = [b for b in available if catalog.find(config.lang, name, b)]
    if with_models:
        return with_models[0]
    return available[0] if available else None


def resolve_plan(config: PipelineConfig, catalog: CatalogManifest | None = None,
                 registry: ProcessorRegistry | None = None) -> PipelinePlan:
    """Dependency closure in canonical order, with backends and script routing."""
    catalog = catalog if catalog is not None else load_manifest()
    registry = registry or default_registry()
    lang = get_language(config.lang).iso

    chosen: dict[str, ProcessorSpec | None] = {}
    pending = list(config.processors)
    while pending:
        name = pending.pop()
        if name in chosen:
            continue
        backend = _choose_backend(name, config, catalog, registry)
        spec = registry.get(name, backend)[0] if backend else None
        chosen[name] = spec
        pending.extend((spec.requires if spec else DEFAULT_REQUIRES[name]) - chosen.keys())

    ordered = sorted(chosen, key=CANONICAL_ORDER.index)
    for name in ordered:
        if chosen[name] is None:
            raise MissingBackend(name, lang)

    steps = []
    model_scripts: set[Script] | None = None
    for name in ordered:
        spec = chosen[name]
        entries = catalog.find(lang, name, spec.backend)
        scripts = {e.script for e in entries}
        step_script = None
        if scripts:
            model_scripts = scripts if model_scripts is None else model_scripts & scripts
            step_script = min(scripts, key=PRIORITY.index)
        steps.append(PlanStep(spec, step_script))
    if model_scripts is not None and not model_scripts:
        raise PipelineError(f"catalog models for {lang} disagree on input script; no single script serves them all")

    plan = PipelinePlan(lang, config.script, tuple(steps), frozenset(model_scripts or ()))
    if config.script is not None:
        pre, post = plan.route_for(config.script)
        plan = PipelinePlan(lang, config.script, plan.steps, plan.model_scripts, pre, post)
    return plan


class RuleTokenizer(Processor):
    def process(self, doc: Document) -> Document:
        text = doc.working_text
        script = self.context.script or _script_or_none(text)
        rules = rules_for(self.context.lang, script)
        sentences = []
        for start, end in split_sentences(text, rules):
            tokens = []
            for k, (a, b) in enumerate(token_spans(text[start:end], rules), 1):
                tokens.append(Token.single(k, text[start + a:start + b], start + a, start + b))
            sentences.append(Sentence(tokens, text[start:end]))
        doc.sentences = sentences
        return doc


class RuleMwt(Processor):
    def load(self) -> None:
        path = self.context.config.get("mwt_table")
        if path:
            self.table = load_mwt_table(path, self.context.lang)
        elif self.context.model_paths:
            self.table = load_mwt_table(self.context.model_paths[0], self.context.lang)
        else:
            self.table = bundled_table(self.context.lang)

    def process(self, doc: Document) -> Document:
        doc.sentences = [expand_mwt(s, self.table) for s in doc.sentences]
        return doc


class TableTranslit(Processor):
    """Adds a ``Translit=`` MISC item to every word, plus ``LTranslit=`` for lemmas."""

    def process(self, doc: Document) -> Document:
        if not doc.working_text.strip():
            return doc
        source = self.context.script or detect_script(doc.working_text)
        target = self.context.config.get("translit_target")
        if target is not None:
            target = Script.from_code(target)
            conv = Transliterator(self.context.lang, source, target)
        else:
            conv = next((Transliterator(self.context.lang, source, t) for t in PRIORITY
                         if t is not source and find_pair(self.context.lang, source, t)), None)
            if conv is None:
                raise NoTranslitRoute(self.context.lang, source, source)
        doc.annotations["translit"] = conv(doc.working_text)
        for word in doc.words:
            misc = [m for m in word.misc or [] if not m.startswith(("Translit=", "LTranslit="))]
            misc.append(f"Translit={conv(word.text)}")
            if word.lemma:
                misc.append(f"LTranslit={conv(word.lemma)}")
            word.misc = misc
        return doc


def _script_or_none(text: str) -> Script | None:
    return detect_script(text) if any(c.isalpha() for c in text) else None


_default_registry = ProcessorRegistry()


def default_registry() -> ProcessorRegistry:
    return _default_registry


def register_processor(spec: ProcessorSpec, implementation: Factory, *, override: bool = False,
                       registry: ProcessorRegistry | None = None) -> None:
    (registry or _default_registry).register(spec, implementation, override=override)


@dataclass
class FileSummary:
    input: str
    output: str
    format: str
    documents: int = 0
    sentences: int = 0
    tokens: int = 0
    words: int = 0
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


class Pipeline:
    """Callable pipeline: ``Pipeline("tur", ["tokenize"])("Ali geldi.")``."""

    def __init__(self, lang: str, processors: Iterable[str] | str = ("tokenize",), script: Script | str | None = None,
                 *, catalog: CatalogManifest | str | None = None, registry: ProcessorRegistry | None = None,
                 cache: ModelCache | None = None, download: bool = False, **overrides: Any):
        if isinstance(catalog, (str, os.PathLike)):
            catalog = load_manifest(catalog)
        self.catalog = catalog if catalog is not None else load_manifest()
        self.registry = registry or default_registry()
        self.config = PipelineConfig(lang, processors, script, overrides)
        self.plan = resolve_plan(self.config, self.catalog, self.registry)
        self.cache = cache or ModelCache()
        self._instances = [self._load(step, download) for step in self.plan.steps]

    @property
    def lang(self) -> str:
        return self.plan.lang

    def _load(self, step: PlanStep, download: bool):
        entries = self.catalog.find(self.plan.lang, step.name, step.backend, step.model_script)
        paths = []
        for entry in entries:
            path = self.cache.path_for(entry)
            if not path.is_file():
                if not download:
                    raise ModelNotCached(step.name, path)
                path, _ = self.cache.fetch(entry)
            paths.append(path)
        factory = self.registry.get(step.name, step.backend)[1]
        context = ProcessorContext(self.plan.lang, step.spec, step.model_script, tuple(paths), self.config.overrides)
        instance = factory(context)
        if not hasattr(instance, "process"):
            raise RegistrationError(f"implementation for {step.name!r} did not produce an object with process()")
        return instance

    def __call__(self, text: str) -> Document:
        return self.run(text)

    def run(self, text: str) -> Document:
        text = normalize(text)
        doc = Document(text=text)
        plan = self.plan
        if text.strip():
            doc.script = plan.declared_script or detect_script(text)
        pre, post = plan.route_for(doc.script) if plan.declared_script is None else (plan.pre_translit, plan.post_translit)
        declared = plan.declared_script is not None
        if pre:
            src, tgt = pre
            doc.processed_text = Transliterator(plan.lang, src, tgt)(text)
            doc.processor_log.append(ProcessorRecord("translit", "table", plan.lang, src.code,
                                                     f"{plan.lang},{src.code}→{tgt.code}", declared))
        working_script = pre[1] if pre else doc.script
        for step, instance in zip(plan.steps, self._instances):
            try:
                result = instance.process(doc)
            except Exception as exc:
                raise ProcessorFailure(step.name, step.backend, exc) from exc
            if result is not None:
                doc = result
            doc.processor_log.append(ProcessorRecord(
                step.name, step.backend, plan.lang, working_script.code if working_script else None,
                None, declared))
        if pre and post:
            back = Transliterator(plan.lang, pre[1], pre[0])
            for word in doc.words:
                if word.lemma:
                    word.lemma = back(word.lemma)
            doc.processor_log.append(ProcessorRecord("translit-back", "table", plan.lang, pre[0].code,
                                                     "lemmas", declared))
        return doc

    def batch(self, texts: Iterable[str], jobs: int | None = None) -> list[Document | Exception]:
        """Run every text; a failing input leaves its exception in its slot."""
        texts = list(texts)

        def one(text: str) -> Document | Exception:
            try:
                return self.run(text)
            except Exception as exc:
                return exc

        if jobs and jobs > 1 and len(texts) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(one, texts))
        return [one(t) for t in texts]

    def process_text(self, data: str, format: str = "conllu", *, per_line: bool = False,
                     jobs: int | None = None, summary: FileSummary | None = None) -> tuple[str, FileSummary]:
        """Process already-decoded input; return the serialized output and a summary."""
        if format not in FORMATS:
            raise ValueError(f"unsupported format {format!r}; choose one of {', '.join(FORMATS)}")
        summary = summary or FileSummary("-", "-", format)
        if data.startswith("\ufeff"):
            data = data[1:]
        if per_line:
            items = [(n, line) for n, line in enumerate(data.splitlines(), 1) if line.strip()]
            results = self.batch([line for _, line in items], jobs)
        else:
            items = [(1, data)] if data.strip() else []
            results = [self.run(data) for _ in items]
        docs = []
        for (lineno, _), result in zip(items, results):
            if isinstance(result, Exception):
                summary.failures.append({"line": lineno, "error": type(result).__name__, "message": str(result)})
                continue
            docs.append(result)
            summary.documents += 1
            summary.sentences += len(result.sentences)
            summary.tokens += len(result.tokens)
            summary.words += len(result.words)
        if format == "conllu":
            payload = "".join(d.to_conllu() for d in docs)
        elif per_line:
            payload = "".join(d.to_json() + "\n" for d in docs)
        else:
            payload = docs[0].to_json(indent=2) + "\n" if docs else ""
        return payload, summary

    def process_file(self, input_path: str | os.PathLike, output_path: str | os.PathLike, format: str = "conllu",
                     *, per_line: bool = False, jobs: int | None = None) -> FileSummary:
        """Process a UTF-8 file; the output is written atomically.

        With ``per_line`` every non-blank line is its own document and a line
        that fails is recorded in the summary instead of aborting the run.
        """
        if format not in FORMATS:
            raise ValueError(f"unsupported format {format!r}; choose one of {', '.join(FORMATS)}")
        data = decode_utf8(Path(input_path).read_bytes(), input_path)
        payload, summary = self.process_text(data, format, per_line=per_line, jobs=jobs,
                                             summary=FileSummary(str(input_path), str(output_path), format))
        _atomic_write(Path(output_path), payload)
        return summary


def decode_utf8(raw: bytes, source: str | os.PathLike = "<stdin>") -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputEncodingError(source, exc.start, exc.reason) from exc


def _atomic_write(path: Path, payload: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
