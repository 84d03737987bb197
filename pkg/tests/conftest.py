import sys
from pathlib import Path

import pytest

from tcat.corpus import check_corpus, load_manifest, read_sources
from tcat.kernel import normalize

# normal forms of the larger corpus proofs nest deeply
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
MANIFEST = CORPUS / "manifest.tsv"
NEGATIVE = Path(__file__).resolve().parent / "negative"


def corpus_files() -> list[str]:
    return sorted(str(p) for p in CORPUS.glob("*.tt"))


@pytest.fixture(scope="session")
def corpus_sources() -> dict[str, str]:
    return read_sources(corpus_files())


@pytest.fixture(scope="session")
def manifest():
    return load_manifest(MANIFEST.read_text(encoding="utf-8"), corpus_files())


@pytest.fixture(scope="session")
def corpus_report(corpus_sources, manifest):
    report = check_corpus(corpus_sources, manifest)
    assert report.ok, report
    return report


@pytest.fixture(scope="session")
def genv(corpus_report):
    return corpus_report.env


@pytest.fixture(scope="session")
def normal_forms(genv):
    """Normal form of every corpus definition, computed once per session."""
    return {d.name: normalize(genv, d.name) for d in genv if d.kind == "def"}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
