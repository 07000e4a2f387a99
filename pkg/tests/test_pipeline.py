from __future__ import annotations

import itertools
import json
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pipeline_support import Exploder, Recorder, StubLemma, routing_setup, stub_registry
from turkictext.doc import from_conllu
from turkictext.pipeline import (
    CANONICAL_ORDER,
    DEFAULT_REQUIRES,
    InputEncodingError,
    MissingBackend,
    ModelNotCached,
    NoTranslitRoute,
    Pipeline,
    PipelineConfig,
    ProcessorFailure,
    ProcessorRegistry,
    ProcessorSpec,
    RegistrationError,
    UnknownProcessor,
    _check_acyclic,
    register_processor,
    resolve_plan,
)
from turkictext.registry import ModelCache, parse_manifest
from turkictext.scripts import Script, UnknownLanguage
from turkictext.translit import transliterate

EMPTY = parse_manifest({"schema_version": 1, "entries": []})


def closure(requested, requires):
    """Reference dependency closure by fixed-point iteration."""
    out = set(requested)
    while True:
        grown = out | {r for p in out for r in requires[p]}
        if grown == out:
            return out
        out = grown


def test_depparse_pulls_in_tokenize_and_pos():
    plan = resolve_plan(PipelineConfig("tur", ("depparse",)), EMPTY, stub_registry())
    assert plan.names == ["tokenize", "pos", "depparse"]


def test_every_subset_is_closed_and_ordered():
    registry = stub_registry()
    started = time.perf_counter()
    for r in range(len(CANONICAL_ORDER) + 1):
        for subset in itertools.combinations(CANONICAL_ORDER, r):
            names = resolve_plan(PipelineConfig("kaz", subset), EMPTY, registry).names
            assert set(names) == closure(subset, DEFAULT_REQUIRES)
            assert names == sorted(names, key=CANONICAL_ORDER.index)
    assert time.perf_counter() - started < 1.0


@st.composite
def dags(draw):
    """Random requires maps where each processor depends only on earlier ones."""
    requires = {}
    for k, name in enumerate(CANONICAL_ORDER):
        requires[name] = frozenset(draw(st.sets(st.sampled_from(CANONICAL_ORDER[:k]))) if k else set())
    return requires


@settings(max_examples=60, deadline=None)
@given(dags(), st.sets(st.sampled_from(CANONICAL_ORDER)))
def test_property_closure_with_custom_requires(requires, requested):
    registry = ProcessorRegistry(builtins=False)
    for name in CANONICAL_ORDER:
        registry.register(ProcessorSpec(name, requires=requires[name], backend="x"), Recorder)
    names = resolve_plan(PipelineConfig("tur", tuple(requested)), EMPTY, registry).names
    assert set(names) == closure(requested, requires)
    assert names == [n for n in CANONICAL_ORDER if n in names]


def test_plan_runs_in_order():
    doc = Pipeline("tur", ["sentiment", "ner"], catalog=EMPTY, registry=stub_registry())("Ali geldi.")
    assert doc.annotations["trace"] == "ner sentiment"
    assert [r.processor for r in doc.processor_log] == ["tokenize", "ner", "sentiment"]


def test_unknown_processor_and_language():
    with pytest.raises(UnknownProcessor):
        PipelineConfig("tur", ("parse",))
    with pytest.raises(UnknownLanguage):
        Pipeline("xyz", catalog=EMPTY)


def test_missing_backend_names_first_missing_processor():
    with pytest.raises(MissingBackend) as info:
        Pipeline("kaz", ["depparse"], catalog=EMPTY)
    assert info.value.processor == "pos"


def test_explicit_backend_must_be_registered():
    with pytest.raises(MissingBackend) as info:
        Pipeline("tur", ["tokenize"], catalog=EMPTY, tokenize_backend="neural")
    assert info.value.backend == "neural"


def test_registration_rules():
    registry = ProcessorRegistry()
    with pytest.raises(RegistrationError):
        registry.register(ProcessorSpec("tokenize", backend="rule"), Recorder)
    registry.register(ProcessorSpec("tokenize", backend="rule"), Recorder, override=True)
    assert registry.get("tokenize", "rule")[1] is Recorder
    with pytest.raises(UnknownProcessor):
        ProcessorSpec("chunk")
    with pytest.raises(RegistrationError):
        ProcessorSpec("pos", provides=())


def test_cycles_rejected():
    registry = ProcessorRegistry()
    registry.register(ProcessorSpec("pos", requires={"lemma"}, backend="a"), Recorder)
    with pytest.raises(RegistrationError, match="cycle"):
        registry.register(ProcessorSpec("lemma", requires={"pos"}, backend="b"), Recorder)
    assert "lemma" not in {n for n, _ in registry._entries}
    with pytest.raises(RegistrationError):
        _check_acyclic({("ner", "x"): (ProcessorSpec("ner", requires={"ner"}), Recorder)})


def test_register_processor_into_given_registry():
    registry = ProcessorRegistry()
    register_processor(ProcessorSpec("sentiment", backend="lexicon"), Recorder, registry=registry)
    doc = Pipeline("tur", ["sentiment"], catalog=EMPTY, registry=registry)("İyi.")
    assert doc.annotations["trace"] == "sentiment"


def test_catalog_default_backend_preferred():
    registry = stub_registry()
    registry.register(ProcessorSpec("pos", backend="other"), StubLemma)
    plan = resolve_plan(PipelineConfig("tur", ("pos",)), EMPTY, registry)
    assert plan.steps[-1].backend == "stub"
    catalog = parse_manifest({"schema_version": 1, "entries": [], "defaults": {"tur": {"tokenize": "rule"}}})
    plan = resolve_plan(PipelineConfig("tur", ("pos",), overrides={"pos_backend": "other"}), catalog, registry)
    assert plan.steps[-1].backend == "other"


def test_tokenize_pipeline_output():
    doc = Pipeline("tur", catalog=EMPTY)("Halil dün Ankara'ya gitti. Sonra döndü.")
    assert [len(s.tokens) for s in doc.sentences] == [5, 3]
    assert doc.sentences[1].tokens[0].start_char == 27
    assert doc.script is Script.LATIN
    doc.check()


def test_mwt_pipeline():
    doc = Pipeline("tur", ["mwt"], catalog=EMPTY)("Evdekiler geldi.")
    assert doc.tokens[0].is_mwt and [w.text for w in doc.tokens[0].words] == ["Evdeki", "ler"]
    assert [w.id for w in doc.words] == [1, 2, 3, 4]


def test_translit_processor_annotates():
    doc = Pipeline("kaz", ["tokenize", "translit"], catalog=EMPTY)("Мен Алматыда турамын.")
    assert doc.annotations["translit"] == "Men Almatyda turamyn."
    assert doc.words[1].misc == ["Translit=Almatyda"]


def test_routing_through_latin_models(tmp_path):
    registry, catalog = routing_setup(tmp_path)
    cache = ModelCache(tmp_path / "cache")
    with pytest.raises(ModelNotCached):
        Pipeline("kaz", ["lemma"], catalog=catalog, registry=registry, cache=cache)
    nlp = Pipeline("kaz", ["lemma"], catalog=catalog, registry=registry, cache=cache, download=True)
    assert nlp.plan.model_scripts == {Script.LATIN}
    doc = nlp("Мен Алматыда турамын.")
    assert [str(r) for r in doc.processor_log] == [
        "translit(kaz,Cyrl→Latn)", "tokenize", "pos", "lemma", "translit-back(lemmas)"]
    assert doc.processed_text == "Men Almatyda turamyn."
    assert [w.lemma for w in doc.words] == ["мен", "алматы", "тур", "."]
    assert doc.text == "Мен Алматыда турамын."
    latin = nlp("Men Almatyda turamyn.")
    assert [str(r) for r in latin.processor_log] == ["tokenize", "pos", "lemma"]


def test_routing_with_declared_script(tmp_path):
    registry, catalog = routing_setup(tmp_path)
    nlp = Pipeline("kaz", ["pos"], script="Cyrl", catalog=catalog, registry=registry,
                   cache=ModelCache(tmp_path / "c"), download=True)
    assert nlp.plan.pre_translit == (Script.CYRILLIC, Script.LATIN) and nlp.plan.post_translit
    assert all(r.script_declared for r in nlp("Мен.").processor_log)


def test_no_translit_route(tmp_path):
    registry, catalog = routing_setup(tmp_path, model_script="Arab")
    with pytest.raises(NoTranslitRoute):
        Pipeline("kaz", ["pos"], script="Cyrl", catalog=catalog, registry=registry,
                 cache=ModelCache(tmp_path / "c"), download=True)


def test_processor_failure_wraps_cause():
    registry = ProcessorRegistry()
    registry.register(ProcessorSpec("ner", backend="boom"), Exploder)
    nlp = Pipeline("tur", ["ner"], catalog=EMPTY, registry=registry)
    with pytest.raises(ProcessorFailure) as info:
        nlp("BOOM geldi")
    assert info.value.processor == "ner" and isinstance(info.value.cause, RuntimeError)


def test_batch_matches_sequential_and_isolates_failures():
    registry = ProcessorRegistry()
    registry.register(ProcessorSpec("ner", backend="boom"), Exploder)
    nlp = Pipeline("tur", ["ner"], catalog=EMPTY, registry=registry)
    texts = [f"Cümle {i} geldi." for i in range(20)] + ["BOOM"]
    parallel = nlp.batch(texts, jobs=4)
    sequential = nlp.batch(texts)
    assert isinstance(parallel[-1], ProcessorFailure)
    assert [d.to_json() for d in parallel[:-1]] == [d.to_json() for d in sequential[:-1]]


def test_empty_and_whitespace_input():
    nlp = Pipeline("tur", catalog=EMPTY)
    for text in ("", "   \n"):
        doc = nlp(text)
        assert doc.sentences == [] and doc.script is None


def test_nfc_normalisation():
    doc = Pipeline("tur", catalog=EMPTY)("gül")
    assert doc.text == "gül" and doc.tokens[0].text == "gül"


def test_process_file_conllu_and_json(tmp_path):
    nlp = Pipeline("tur", catalog=EMPTY)
    src = tmp_path / "in.txt"
    src.write_text("Ali geldi. Veli gitti.\n", encoding="utf-8")
    summary = nlp.process_file(src, tmp_path / "out.conllu")
    assert (summary.documents, summary.sentences, summary.tokens) == (1, 2, 6)
    doc = from_conllu((tmp_path / "out.conllu").read_text("utf-8"))
    assert len(doc.sentences) == 2
    nlp.process_file(src, tmp_path / "out.json", "json")
    assert json.loads((tmp_path / "out.json").read_text("utf-8"))["text"].startswith("Ali")


def test_process_file_empty_input(tmp_path):
    src = tmp_path / "empty.txt"
    src.write_bytes(b"")
    summary = Pipeline("tur", catalog=EMPTY).process_file(src, tmp_path / "o.conllu")
    assert summary.documents == 0 and (tmp_path / "o.conllu").read_text() == ""


def test_process_file_rejects_unknown_format(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("x", encoding="utf-8")
    with pytest.raises(ValueError, match="xml"):
        Pipeline("tur", catalog=EMPTY).process_file(src, tmp_path / "o", "xml")
    assert not (tmp_path / "o").exists()


def test_process_file_reports_encoding_offset(tmp_path):
    src = tmp_path / "bad.txt"
    src.write_bytes("Ali gördü ".encode() + b"\xff rest")
    with pytest.raises(InputEncodingError) as info:
        Pipeline("tur", catalog=EMPTY).process_file(src, tmp_path / "o.conllu")
    assert info.value.offset == len("Ali gördü ".encode())
    assert not (tmp_path / "o.conllu").exists()


def test_per_line_records_failures(tmp_path):
    registry = ProcessorRegistry()
    registry.register(ProcessorSpec("ner", backend="boom"), Exploder)
    nlp = Pipeline("tur", ["ner"], catalog=EMPTY, registry=registry)
    src = tmp_path / "lines.txt"
    src.write_text("Ali geldi.\n\nBOOM\nVeli gitti.\n", encoding="utf-8")
    summary = nlp.process_file(src, tmp_path / "o.jsonl", "json", per_line=True, jobs=2)
    assert summary.documents == 2
    assert summary.failures == [{"line": 3, "error": "ProcessorFailure", "message": summary.failures[0]["message"]}]
    lines = (tmp_path / "o.jsonl").read_text("utf-8").splitlines()
    assert [json.loads(line)["text"] for line in lines] == ["Ali geldi.", "Veli gitti."]


def test_bom_is_stripped():
    payload, summary = Pipeline("tur", catalog=EMPTY).process_text("﻿Ali geldi.")
    assert summary.tokens == 3 and "﻿" not in payload


def test_routed_offsets_index_processed_text(tmp_path):
    registry, catalog = routing_setup(tmp_path)
    nlp = Pipeline("kaz", ["pos"], catalog=catalog, registry=registry,
                   cache=ModelCache(tmp_path / "c"), download=True)
    text = "Біз келдік."
    doc = nlp(text)
    assert doc.processed_text == transliterate(text, "kaz", "Cyrl", "Latn")
    for token in doc.tokens:
        assert doc.processed_text[token.start_char:token.end_char] == token.text
