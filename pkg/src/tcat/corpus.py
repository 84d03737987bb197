"""Checking a multi-file corpus against a manifest of expected declarations.

Manifest format, one entry per line::

    name <TAB> file <TAB> axiom,axiom,...     (``-`` for no axioms)

Blank lines and lines starting with ``#`` are ignored.  An entry whose
expected axiom set is exactly its own name is an axiom declaration.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from tcat import syntax as s
from tcat.kernel import GlobalEnv, TypeCheckError, check_declaration


class ManifestError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"manifest line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    file: str
    expected_axioms: frozenset[str]
    kind: str


@dataclass
class CorpusManifest:
    files: list[str]
    entries: list[ManifestEntry]

    def entry(self, name: str) -> ManifestEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def load_manifest(text: str, known_files: Iterable[str] | None = None) -> CorpusManifest:
    known = None if known_files is None else {os.path.basename(f) for f in known_files}
    files: list[str] = []
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not all(p.strip() for p in parts):
            raise ManifestError(lineno, "expected 'name<TAB>file<TAB>axioms'")
        name, file, axioms = (p.strip() for p in parts)
        if name in seen:
            raise ManifestError(lineno, f"duplicate entry '{name}'")
        if known is not None and file not in known:
            raise ManifestError(lineno, f"unknown file '{file}'")
        expected = frozenset() if axioms == "-" else frozenset(a.strip() for a in axioms.split(","))
        if "" in expected:
            raise ManifestError(lineno, "empty axiom name")
        kind = "axiom" if expected == {name} else "def"
        seen.add(name)
        entries.append(ManifestEntry(name, file, expected, kind))
        if file not in files:
            files.append(file)
    declared = {e.name for e in entries}
    for e in entries:
        unknown = e.expected_axioms - declared
        if unknown:
            raise ManifestError(0, f"'{e.name}' expects undeclared axiom(s) {sorted(unknown)}")
    return CorpusManifest(files, entries)


# ---------------------------------------------------------------- reports

MANIFEST_CATEGORIES = ("Missing", "WrongFile")


@dataclass
class Failure:
    name: str
    file: str
    category: str
    message: str
    span: s.SrcSpan | None = None

    def __str__(self) -> str:
        where = str(self.span) if self.span else self.file
        return f"{where}: {self.category}: {self.name}: {self.message}"


@dataclass
class CorpusReport:
    checked_decls: int = 0
    failures: list[Failure] = field(default_factory=list)
    axiom_mismatches: list[tuple[str, frozenset[str], frozenset[str]]] = field(default_factory=list)
    parse_errors: list[s.ParseError] = field(default_factory=list)
    env: GlobalEnv = field(default_factory=GlobalEnv, repr=False)
    origin: dict[str, str] = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return not (self.failures or self.axiom_mismatches or self.parse_errors)


def read_sources(paths: Iterable[str | os.PathLike]) -> dict[str, str]:
    return {str(p): Path(p).read_text(encoding="utf-8") for p in paths}


def _free_names(t: s.RawTerm, bound: frozenset = frozenset()) -> set[str]:
    match t:
        case s.Var(name):
            return set() if name in bound else {name}
        case s.Pi(name, d, b) | s.Sigma(name, d, b):
            return _free_names(d, bound) | _free_names(b, bound | {name})
        case s.Lam(name, b):
            return _free_names(b, bound | {name})
    out: set[str] = set()
    for u in s.children(t):
        out |= _free_names(u, bound)
    return out


def dependency_order(files: Mapping[str, s.SourceFile]) -> list[str]:
    """Order files so that each comes after the files defining names it uses.

    Ties keep the given order; files caught in a cycle keep it too.
    """
    paths = list(files)
    owner = {}
    for p in paths:
        for d in files[p].decls:
            owner.setdefault(d.name, p)
    deps = {p: set() for p in paths}
    for p in paths:
        for d in files[p].decls:
            for t in (d.type_expr, d.body):
                if t is not None:
                    deps[p] |= {owner[n] for n in _free_names(t) if n in owner and owner[n] != p}
    done: list[str] = []
    pending = list(paths)
    while pending:
        ready = next((p for p in pending if deps[p] <= set(done)), pending[0])
        done.append(ready)
        pending.remove(ready)
    return done


def check_sources(sources: Mapping[str, str], order: list[str] | None = None) -> CorpusReport:
    """Parse and check files into one environment, collecting every failure.

    A declaration that fails is skipped; later declarations that use it
    then fail with an unbound name.  A file that does not parse is skipped.
    """
    report = CorpusReport()
    parsed: dict[str, s.SourceFile] = {}
    for path, text in sources.items():
        try:
            parsed[path] = s.parse_file(text, path)
        except s.ParseError as e:
            report.parse_errors.append(e)
    paths = [p for p in (order or dependency_order(parsed)) if p in parsed]
    genv = GlobalEnv()
    for path in paths:
        for decl in parsed[path].decls:
            try:
                genv = check_declaration(genv, decl)
            except TypeCheckError as e:
                report.failures.append(Failure(decl.name, path, e.category.value, str(e),
                                               e.span or decl.span))
                continue
            except RecursionError:
                report.failures.append(Failure(decl.name, path, "ResourceError",
                                               "recursion limit exceeded", decl.span))
                continue
            report.origin[decl.name] = path
            report.checked_decls += 1
    report.env = genv
    return report


def check_corpus(sources: Mapping[str, str] | Iterable[str | os.PathLike],
                 manifest: CorpusManifest) -> CorpusReport:
    """Check files in manifest order and compare every entry's axiom closure."""
    if not isinstance(sources, Mapping):
        sources = read_sources(sources)
    by_base = {os.path.basename(p): p for p in sources}
    missing = [f for f in manifest.files if f not in by_base]
    if missing:
        raise ManifestError(0, f"manifest names files that were not given: {missing}")
    first = [by_base[f] for f in manifest.files]
    rest = [p for p in sources if p not in first]
    return compare_manifest(check_sources(sources, first + rest), manifest)


def compare_manifest(checked: CorpusReport, manifest: CorpusManifest) -> CorpusReport:
    """Compare a checked corpus with a manifest; ``checked`` itself is not modified."""
    report = CorpusReport(checked.checked_decls, list(checked.failures), [],
                          list(checked.parse_errors), checked.env, checked.origin)
    by_base = {os.path.basename(p): p for p in checked.origin.values()}
    by_base.update({os.path.basename(f.file): f.file for f in checked.failures})
    failed = {f.name for f in report.failures}
    for e in manifest.entries:
        if e.name not in report.env:
            if e.name not in failed:
                report.failures.append(Failure(e.name, by_base.get(e.file, e.file), "Missing",
                                               f"declaration '{e.name}' not found"))
            continue
        decl = report.env[e.name]
        path = report.origin[e.name]
        if os.path.basename(path) != e.file:
            report.failures.append(Failure(e.name, path, "WrongFile",
                                           f"declared in {path}, manifest says {e.file}",
                                           decl.span))
        if decl.axiom_closure != e.expected_axioms:
            report.axiom_mismatches.append((e.name, e.expected_axioms, decl.axiom_closure))
    return report
