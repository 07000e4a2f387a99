from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from turkictext.doc.model import Document, ProcessorRecord, Sentence, Span, Token, Word
from turkictext.scripts import Script


class DocumentSchemaError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@lru_cache(maxsize=None)
def document_schema() -> dict:
    return json.loads(resources.files("turkictext").joinpath("schemas/document.v1.json").read_text("utf-8"))


def _word(w: Word) -> dict:
    return {
        "id": w.id, "text": w.text, "lemma": w.lemma, "upos": w.upos, "xpos": w.xpos,
        "feats": dict(w.feats) if w.feats is not None else None, "head": w.head, "deprel": w.deprel,
        "deps": w.deps, "misc": list(w.misc) if w.misc is not None else None,
        "start_char": w.start_char, "end_char": w.end_char, "ner": w.ner,
    }


def to_dict(doc: Document) -> dict:
    return {
        "text": doc.text,
        "sentences": [
            {
                "text": s.text,
                "comments": list(s.comments),
                "tokens": [
                    {
                        "id": list(t.id_range), "text": t.text, "start_char": t.start_char,
                        "end_char": t.end_char, "misc": list(t.misc) if t.misc is not None else None,
                        "words": [_word(w) for w in t.words],
                    }
                    for t in s.tokens
                ],
            }
            for s in doc.sentences
        ],
        "entities": [vars(e).copy() for e in doc.entities],
        "script": doc.script.code if doc.script else None,
        "embedding": list(doc.embedding) if doc.embedding is not None else None,
        "translation": doc.translation,
        "processed_text": doc.processed_text,
        "annotations": dict(doc.annotations),
        "processor_log": [vars(r).copy() for r in doc.processor_log],
    }


def to_json(doc: Document, *, indent: int | None = None) -> str:
    return json.dumps(to_dict(doc), ensure_ascii=False, indent=indent)


def from_dict(data: dict) -> Document:
    validator = jsonschema.Draft202012Validator(document_schema())
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise DocumentSchemaError(error.json_path, error.message)
    sentences = [
        Sentence(
            tokens=[
                Token(tuple(t["id"]), t["text"], [Word(**w) for w in t["words"]],
                      t.get("start_char"), t.get("end_char"), t.get("misc"))
                for t in s["tokens"]
            ],
            text=s.get("text", ""),
            comments=list(s.get("comments", [])),
        )
        for s in data["sentences"]
    ]
    return Document(
        text=data["text"],
        sentences=sentences,
        entities=[Span(**e) for e in data["entities"]],
        script=Script.from_code(data["script"]) if data.get("script") else None,
        embedding=data.get("embedding"),
        translation=data.get("translation"),
        processor_log=[ProcessorRecord(**r) for r in data.get("processor_log", [])],
        annotations=dict(data.get("annotations", {})),
        processed_text=data.get("processed_text"),
    )


def from_json(data: str) -> Document:
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise DocumentSchemaError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_dict(parsed)
