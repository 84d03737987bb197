import os

import pytest

from tcat.corpus import (
    ManifestError, check_corpus, check_sources, compare_manifest, dependency_order, load_manifest,
)
from tcat.syntax import parse_file

from conftest import MANIFEST, corpus_files

# fixed when the corpus was written; any change to the corpus must update it
CHECKED_DECLS = 199

ENTRIES = [line.split("\t")[0] for line in MANIFEST.read_text(encoding="utf-8").splitlines()
           if line.strip() and not line.startswith("#")]


# ---------------------------------------------------------------- manifest format

def test_manifest_empty_set():
    [e] = load_manifest("uip_to_h\tuip_h.tt\t-").entries
    assert (e.name, e.file, e.expected_axioms, e.kind) == ("uip_to_h", "uip_h.tt", frozenset(), "def")


def test_manifest_axiom_set():
    [e] = load_manifest("ZAC\tzac.tt\tZAC\nclassext\tzac.tt\tZAC").entries[1:]
    assert e.expected_axioms == {"ZAC"} and e.kind == "def"


def test_manifest_axiom_entry_kind():
    assert load_manifest("ZAC\tzac.tt\tZAC").entries[0].kind == "axiom"


def test_manifest_comments_and_blank_lines():
    m = load_manifest("# header\n\nsym\tprelude.tt\t-\n")
    assert [e.name for e in m.entries] == ["sym"] and m.files == ["prelude.tt"]


def test_manifest_bad_line():
    with pytest.raises(ManifestError) as err:
        load_manifest("bad line")
    assert err.value.line == 1


def test_manifest_unknown_file():
    with pytest.raises(ManifestError) as err:
        load_manifest("# c\nsym\tnowhere.tt\t-", ["corpus/prelude.tt"])
    assert err.value.line == 2


def test_manifest_duplicate_entry():
    with pytest.raises(ManifestError):
        load_manifest("sym\tprelude.tt\t-\nsym\tprelude.tt\t-")


def test_manifest_undeclared_axiom():
    with pytest.raises(ManifestError):
        load_manifest("classext\tzac.tt\tZAC")


def test_shipped_manifest_files_in_dependency_order(manifest):
    parsed = {os.path.basename(p): parse_file(open(p, encoding="utf-8").read(), p)
              for p in corpus_files()}
    # a valid order is left unchanged by the sort
    ordered = {f: parsed[f] for f in manifest.files}
    assert dependency_order(ordered) == manifest.files
    assert dependency_order(dict(reversed(ordered.items()))) != manifest.files[::-1]


def test_dependency_order_sorts_files():
    files = {"b.tt": parse_file("def y : N2 := x;"), "a.tt": parse_file("def x : N2 := b0;")}
    assert dependency_order(files) == ["a.tt", "b.tt"]


# ---------------------------------------------------------------- shipped corpus

def test_corpus_checks(corpus_report, manifest):
    assert corpus_report.failures == [] and corpus_report.axiom_mismatches == []
    assert corpus_report.checked_decls == CHECKED_DECLS >= 40
    assert all(e.name in corpus_report.env for e in manifest.entries)


def test_manifest_entries_live_in_named_files(corpus_report, manifest):
    for e in manifest.entries:
        assert os.path.basename(corpus_report.origin[e.name]) == e.file


def test_axiom_kinds_match(corpus_report, manifest):
    for e in manifest.entries:
        assert corpus_report.env[e.name].kind == e.kind, e.name


@pytest.mark.parametrize("name", ["aiota_h_to_uip", "uip_to_h", "corollary_all_ext_uip",
                                  "ttac", "hedberg", "precat_set_to_h", "n2_not_univalent",
                                  "z2_not_univalent", "univ_set_skeletal"])
def test_choice_free_results(genv, name):
    assert genv[name].axiom_closure == frozenset()


@pytest.mark.parametrize("name", ["selfcn", "classext", "zac_uip"])
def test_results_using_choice(genv, name):
    assert genv[name].axiom_closure == {"ZAC"}


def test_unrestricted_choice_is_refutable(genv):
    # the refutation takes the unrestricted principle as a hypothesis
    assert genv["zac_unrestricted_refuted"].axiom_closure == frozenset()


def test_expecting_no_axioms_for_classext(corpus_sources):
    text = MANIFEST.read_text(encoding="utf-8").replace("classext\tzac.tt\tZAC", "classext\tzac.tt\t-")
    report = check_corpus(corpus_sources, load_manifest(text))
    assert report.axiom_mismatches == [("classext", frozenset(), frozenset({"ZAC"}))]
    assert report.failures == []


def test_compare_manifest_leaves_report_untouched(corpus_report):
    edited = load_manifest(MANIFEST.read_text(encoding="utf-8").replace("ttac\tzac.tt\t-", "ttac\tzac.tt\tZAC"))
    report = compare_manifest(corpus_report, edited)
    assert report.axiom_mismatches == [("ttac", frozenset({"ZAC"}), frozenset())]
    assert corpus_report.ok


def test_deleting_the_axiom(corpus_sources, manifest):
    sources = {p: (t.replace("axiom ZAC : ZAC_type;", "") if p.endswith("zac.tt") else t)
               for p, t in corpus_sources.items()}
    report = check_corpus(sources, manifest)
    failed = {f.name: f.category for f in report.failures}
    assert failed["ZAC"] == "Missing"
    assert failed["selfcn"] == failed["classext"] == "UnboundName"
    # only the choice file is affected
    assert {os.path.basename(f.file) for f in report.failures} == {"zac.tt"}
    assert "zac_unrestricted_refuted" not in failed and "ttac" not in failed


def test_failures_are_aggregated():
    report = check_sources({"f.tt": "def a : N2 := star;\ndef b : N1 := b0;\ndef c : N2 := a;"})
    assert [(f.name, f.category) for f in report.failures] == [
        ("a", "TypeMismatch"), ("b", "TypeMismatch"), ("c", "UnboundName")]


def remove_decl(sources, name):
    for path, text in sources.items():
        for d in parse_file(text, path).decls:
            if d.name == name:
                return {**sources, path: text[:d.start] + text[d.stop:]}
    raise KeyError(name)


@pytest.mark.parametrize("name", ENTRIES)
def test_removing_an_entry_reports_it(corpus_sources, manifest, name):
    report = check_corpus(remove_decl(corpus_sources, name), manifest)
    assert not report.ok
    missing = [f.name for f in report.failures if f.category == "Missing"]
    assert missing == [name]
    # dependents fail to check; nothing else is reported as absent
    assert all(f.category == "UnboundName" for f in report.failures if f.name != name)
