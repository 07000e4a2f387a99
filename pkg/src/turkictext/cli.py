"""Command-line interface.

Exit codes: 0 ok, 1 generic error, 2 no alphabetic content, 3 unsupported
transliteration pair, 4 unmappable character, 5 missing backend,
6 checksum mismatch, 7 parse error or invalid UTF-8.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from turkictext import __version__
from turkictext.doc import ConlluParseError, DocumentSchemaError, from_conllu, from_json
from turkictext.metrics import (
    BPEAdapter,
    CharAdapter,
    EmptyInput,
    IdentityAdapter,
    compare,
    toy_bpe,
)
from turkictext.pipeline import (
    FORMATS,
    InputEncodingError,
    MissingBackend,
    NoTranslitRoute,
    Pipeline,
    ProcessorFailure,
    decode_utf8,
)
from turkictext.registry import (
    CatalogError,
    ChecksumMismatch,
    ModelCache,
    NotInCatalog,
    discover,
    download,
    load_manifest,
)
from turkictext.scripts import NoAlphabeticContent, Script, detect, detect_segments, normalize
from turkictext.tokenizer import rules_for, split_sentences, token_spans
from turkictext.translit import Transliterator, UnmappableCharacter, UnsupportedPair

EXIT_OK = 0
EXIT_GENERIC = 1
EXIT_NO_ALPHA = 2
EXIT_UNSUPPORTED_PAIR = 3
EXIT_UNMAPPABLE = 4
EXIT_MISSING_BACKEND = 5
EXIT_CHECKSUM = 6
EXIT_PARSE = 7

_EXIT_CODES: tuple[tuple[type[BaseException], int], ...] = (
    (NoAlphabeticContent, EXIT_NO_ALPHA),
    (UnsupportedPair, EXIT_UNSUPPORTED_PAIR),
    (NoTranslitRoute, EXIT_UNSUPPORTED_PAIR),
    (UnmappableCharacter, EXIT_UNMAPPABLE),
    (MissingBackend, EXIT_MISSING_BACKEND),
    (ChecksumMismatch, EXIT_CHECKSUM),
    (ConlluParseError, EXIT_PARSE),
    (DocumentSchemaError, EXIT_PARSE),
    (InputEncodingError, EXIT_PARSE),
    (json.JSONDecodeError, EXIT_PARSE),
    (CatalogError, EXIT_PARSE),
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for "no alphabetic content".
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_GENERIC, f"{self.prog}: error: {message}\n")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ProcessorFailure):
        return exit_code_for(exc.cause)
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_GENERIC


def _read_input(path: str) -> str:
    if path == "-":
        return decode_utf8(sys.stdin.buffer.read(), "<stdin>")
    return decode_utf8(Path(path).read_bytes(), path)


def _write_output(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(f".{target.name}.tmp")
    tmp.write_text(text, encoding="utf-8", newline="")
    os.replace(tmp, target)


def _field(value: object) -> str:
    # Porcelain fields never contain raw tabs or newlines.
    return str(value).replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _lines(rows: Sequence[Sequence[object]], porcelain: bool) -> str:
    if porcelain:
        return "".join("\t".join(_field(c) for c in row) + "\n" for row in rows)
    return "".join(" ".join(str(c) for c in row) + "\n" for row in rows)


def _script_arg(value: str) -> Script:
    try:
        return Script.from_code(value)
    except (KeyError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"unknown script {value!r}; use Latn, Cyrl, Arab or Orkh") from exc


def _cache(args) -> ModelCache:
    return ModelCache(args.cache) if getattr(args, "cache", None) else ModelCache()


def _catalog(args):
    return load_manifest(args.catalog) if getattr(args, "catalog", None) else load_manifest()


def cmd_detect(args) -> int:
    text = normalize(_read_input(args.input))
    if args.segments:
        segments = detect_segments(text)
        rows = [(s.script.code, s.start_char, s.end_char, s.text if args.porcelain else repr(s.text))
                for s in segments]
        if not args.porcelain:
            rows = [(code, f"{a}-{b}", t) for code, a, b, t in rows]
        _write_output(args.output, _lines(rows, args.porcelain))
        return EXIT_OK
    result = detect(text)
    conf = f"{result.confidence:.4f}" if args.porcelain else f"{result.confidence:.2f}"
    _write_output(args.output, _lines([(result.script.code, conf)], args.porcelain))
    return EXIT_OK


def cmd_segment(args) -> int:
    text = normalize(_read_input(args.input))
    rules = rules_for(args.lang, args.script or _guess_script(text))
    spans = split_sentences(text, rules)
    if args.porcelain:
        out = _lines([(a, b, text[a:b]) for a, b in spans], True)
    else:
        out = "".join(text[a:b].replace("\n", " ") + "\n" for a, b in spans)
    _write_output(args.output, out)
    return EXIT_OK


def _guess_script(text: str) -> Script | None:
    try:
        return detect(text).script
    except NoAlphabeticContent:
        return None


def cmd_tokenize(args) -> int:
    text = normalize(_read_input(args.input))
    rules = rules_for(args.lang, args.script or _guess_script(text))
    blocks = []
    for start, end in split_sentences(text, rules):
        spans = [(start + a, start + b) for a, b in token_spans(text[start:end], rules)]
        if args.porcelain:
            blocks.append(_lines([(a, b, text[a:b]) for a, b in spans], True))
        else:
            blocks.append("".join(text[a:b] + "\n" for a, b in spans))
    _write_output(args.output, "\n".join(blocks))
    return EXIT_OK


def cmd_translit(args) -> int:
    conv = Transliterator(args.lang, args.source, args.target, preserve_unknown=not args.strict)
    _write_output(args.output, conv(normalize(_read_input(args.input))))
    return EXIT_OK


def cmd_run(args) -> int:
    fmt = args.format or ("json" if args.json else "conllu")
    processors = [p.strip() for p in args.processors.split(",") if p.strip()]
    overrides = {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key] = value
    pipeline = Pipeline(args.lang, processors, args.script, catalog=_catalog(args), cache=_cache(args),
                        download=args.download, **overrides)
    payload, summary = pipeline.process_text(_read_input(args.input), fmt, per_line=args.per_line, jobs=args.jobs)
    _write_output(args.output, payload)
    if args.summary:
        print(summary.to_json(), file=sys.stderr)
    for failure in summary.failures:
        _error(f"line {failure['line']}: {failure['error']}: {failure['message']}")
    return EXIT_GENERIC if summary.failures else EXIT_OK


def cmd_convert(args) -> int:
    data = _read_input(args.input)
    doc = from_conllu(data) if args.source == "conllu" else from_json(data)
    out = doc.to_conllu() if args.target == "conllu" else doc.to_json(indent=2) + "\n"
    _write_output(args.output, out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    manifest = _catalog(args)
    if args.action == "list":
        entries = discover(manifest, args.lang, args.script, args.processor, args.quality)
        rows = [(e.lang, e.script.code, e.processor, e.backend, e.version, e.quality, e.license, e.url)
                for e in entries]
        if args.porcelain:
            _write_output(args.output, _lines(rows, True))
        elif rows:
            widths = [max(len(str(r[i])) for r in rows) for i in range(7)]
            _write_output(args.output, "".join(
                "  ".join(str(c).ljust(w) for c, w in zip(r, widths)) + "  " + r[7] + "\n" for r in rows))
        else:
            print("no matching catalog entries", file=sys.stderr)
        return EXIT_OK
    cache = _cache(args)
    if args.action == "download":
        if not args.lang:
            raise UsageError("catalog download needs --lang")
        processors = [p.strip() for p in args.processors.split(",")] if args.processors else None
        results = download(args.lang, processors, manifest, cache, args.script)
        if not results:
            print("nothing to download: requested processors use built-in backends", file=sys.stderr)
        rows = [(r.status, r.entry.processor, r.path) for r in results]
        _write_output(args.output, _lines(rows, args.porcelain))
        return EXIT_OK
    report = cache.verify(manifest)
    rows = ([("ok", p) for p in report.ok] + [("corrupt", p) for p in report.corrupt]
            + [("orphaned", p) for p in report.orphaned]
            + [("missing", cache.path_for(e)) for e in report.missing])
    _write_output(args.output, _lines(rows, args.porcelain))
    return EXIT_CHECKSUM if report.corrupt else EXIT_OK


def _adapter(args):
    if args.adapter == "identity":
        return IdentityAdapter()
    if args.adapter == "chars":
        return CharAdapter()
    if args.adapter == "toy-bpe":
        return toy_bpe()
    if not args.merges:
        raise UsageError("--adapter bpe needs --merges")
    return BPEAdapter.from_files(args.merges, args.vocab, byte_level=args.byte_level)


def cmd_fertility(args) -> int:
    corpus: dict[str, list[str]] = {}
    for line in _read_input(args.input).splitlines():
        if not line.strip():
            continue
        if args.lang:
            corpus.setdefault(args.lang, []).append(line)
        else:
            lang, sep, sentence = line.partition("\t")
            if not sep:
                raise UsageError("without --lang each input line must be 'lang<TAB>sentence'")
            corpus.setdefault(lang.strip(), []).append(sentence)
    if not corpus:
        raise EmptyInput("empty corpus")
    table = compare(corpus, [_adapter(args)])
    _write_output(args.output, table.to_json() + "\n" if args.format == "json" else table.to_tsv())
    for failure in table.failures:
        _error(f"{failure.lang}/{failure.tokenizer}: {failure.error}")
    return EXIT_GENERIC if table.failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="turkictext", description="Text processing for Turkic languages.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--porcelain", action="store_true", help="tab-separated, stable output for scripts")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def io_args(p):
        p.add_argument("input", nargs="?", default="-", help="input file (default: stdin)")
        p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")

    p = sub.add_parser("detect", help="detect the dominant script")
    io_args(p)
    p.add_argument("--segments", action="store_true", help="print one line per same-script run")
    p.set_defaults(func=cmd_detect)

    for name, func, text in (("segment", cmd_segment, "split text into sentences"),
                             ("tokenize", cmd_tokenize, "print one token per line")):
        p = sub.add_parser(name, help=text)
        io_args(p)
        p.add_argument("--lang", help="ISO 639-3 code (selects abbreviation lists)")
        p.add_argument("--script", type=_script_arg, help="force the rule set instead of detecting it")
        p.set_defaults(func=func)

    p = sub.add_parser("translit", help="transliterate between scripts")
    io_args(p)
    p.add_argument("--lang", required=True)
    p.add_argument("--from", dest="source", required=True, type=_script_arg)
    p.add_argument("--to", dest="target", required=True, type=_script_arg)
    p.add_argument("--strict", action="store_true", help="fail on letters the table cannot map")
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("run", help="run a processing pipeline")
    io_args(p)
    p.add_argument("--lang", required=True)
    p.add_argument("--processors", default="tokenize", help="comma-separated processor names")
    p.add_argument("--script", type=_script_arg, help="declare the input script instead of detecting it")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=FORMATS)
    fmt.add_argument("--json", action="store_true", help="same as --format json")
    fmt.add_argument("--conllu", action="store_true", help="same as --format conllu")
    p.add_argument("--per-line", action="store_true", help="treat every line as a separate document")
    p.add_argument("--jobs", type=int, default=None, help="worker threads for --per-line")
    p.add_argument("--catalog", help="catalog file or URL")
    p.add_argument("--cache", help="cache root")
    p.add_argument("--download", action="store_true", help="fetch missing model files")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="pipeline override, e.g. pos_backend=x")
    p.add_argument("--summary", action="store_true", help="print a JSON summary to stderr")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convert", help="convert between CoNLL-U and JSON")
    io_args(p)
    p.add_argument("--from", dest="source", required=True, choices=FORMATS)
    p.add_argument("--to", dest="target", required=True, choices=FORMATS)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("catalog", help="list, download or verify catalog models")
    p.add_argument("action", choices=("list", "download", "verify"))
    p.add_argument("--catalog", help="catalog file or URL")
    p.add_argument("--cache", help="cache root")
    p.add_argument("--lang")
    p.add_argument("--script", type=_script_arg)
    p.add_argument("--processor")
    p.add_argument("--processors", help="comma-separated, for download")
    p.add_argument("--quality", choices=("production", "stable", "beta", "prototype"))
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("fertility", help="subword tokens per word")
    io_args(p)
    p.add_argument("--lang", help="language of every line; otherwise lines are 'lang<TAB>sentence'")
    p.add_argument("--adapter", choices=("identity", "chars", "toy-bpe", "bpe"), default="toy-bpe")
    p.add_argument("--merges", help="merges.txt for --adapter bpe")
    p.add_argument("--vocab", help="vocab.json for --adapter bpe")
    p.add_argument("--byte-level", action="store_true")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=cmd_fertility)
    return parser


def _error(message: str) -> None:
    if sys.stderr.isatty() and "NO_COLOR" not in os.environ:
        message = f"\033[31m{message}\033[0m"
    print(message, file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except BrokenPipeError:
        return EXIT_OK
    except (NotInCatalog, EmptyInput) as exc:
        _error(f"error: {exc}")
        return EXIT_GENERIC
    except Exception as exc:
        _error(f"error: {exc}")
        return exit_code_for(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
