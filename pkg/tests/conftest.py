import csv
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def _load_parallel():
    with open(FIXTURES / "parallel_sentences.tsv", encoding="utf-8", newline="") as fh:
        return [(r["lang"], r["script"], r["sentence"]) for r in csv.DictReader(fh, delimiter="\t")]


PARALLEL = _load_parallel()


@pytest.fixture(scope="session")
def parallel():
    """The 20-language "Ali saw the book" set as (lang, script, sentence)."""
    return PARALLEL


@pytest.fixture
def cache_root(tmp_path, monkeypatch):
    root = tmp_path / "cache"
    monkeypatch.setenv("TURKICTEXT_CACHE", str(root))
    return root


def pytest_configure(config):
    config._acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    ok = report.passed if report.when == "call" else not (report.failed or report.skipped)
    previous = item.config._acceptance_results.get(number, (True, title))[0]
    item.config._acceptance_results[number] = (previous and ok, title)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title = results[number]
        terminalreporter.write_line(f"AC{number:<2} {'PASS' if ok else 'FAIL'}  {title}")
