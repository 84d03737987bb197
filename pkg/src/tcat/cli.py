"""Command line entry point.

    tcat check <files...> [--manifest PATH] [--forbid-axioms]
    tcat axioms <files...> <name>
    tcat normalize <files...> <name>

Exit codes: 0 success, 1 type/check failure, 2 parse or I/O failure,
3 manifest mismatch, 4 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence, TextIO

from tcat import syntax as s
from tcat.corpus import (
    MANIFEST_CATEGORIES, CorpusReport, ManifestError, check_corpus, check_sources,
    load_manifest, read_sources,
)
from tcat.kernel import normalize, to_raw

OK, CHECK_FAILED, PARSE_FAILED, MANIFEST_MISMATCH, USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tcat", description="Check type theory files and report axiom use.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    check = sub.add_parser("check", help="check files, optionally against a manifest")
    check.add_argument("files", nargs="+")
    check.add_argument("--manifest")
    check.add_argument("--forbid-axioms", action="store_true",
                       help="fail if any definition depends on an axiom")
    for name, help_ in (("axioms", "print the axioms a declaration depends on"),
                        ("normalize", "print the normal form of a definition")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("files", nargs="+")
        p.add_argument("name")
    return parser


def exit_code(report: CorpusReport, forbidden: Sequence[str] = ()) -> int:
    if report.parse_errors:
        return PARSE_FAILED
    if forbidden or any(f.category not in MANIFEST_CATEGORIES for f in report.failures):
        return CHECK_FAILED
    if report.failures or report.axiom_mismatches:
        return MANIFEST_MISMATCH
    return OK


def _print_report(report: CorpusReport, out: TextIO) -> None:
    for e in report.parse_errors:
        print(f"{e.span}: ParseError: expected {e.expected}, found {e.found}", file=out)
    for f in report.failures:
        print(f, file=out)
    for name, expected, actual in report.axiom_mismatches:
        print(f"{name}: AxiomMismatch: expected {{{', '.join(sorted(expected))}}}, "
              f"actual {{{', '.join(sorted(actual))}}}", file=out)


def run(argv: Sequence[str], stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    try:
        args = _build_parser().parse_args(list(argv))
    except UsageError as e:
        print(e, file=stderr)
        return USAGE
    try:
        sources = read_sources(args.files)
        manifest = None
        if getattr(args, "manifest", None):
            with open(args.manifest, encoding="utf-8") as fh:
                manifest = load_manifest(fh.read(), args.files)
    except (OSError, UnicodeDecodeError, ManifestError) as e:
        print(f"error: {e}", file=stderr)
        return PARSE_FAILED

    report = check_corpus(sources, manifest) if manifest else check_sources(sources)
    forbidden = []
    if args.command == "check" and args.forbid_axioms:
        forbidden = [d.name for d in report.env if d.kind == "def" and d.axiom_closure]
    _print_report(report, stderr)
    for name in forbidden:
        axioms = ", ".join(sorted(report.env[name].axiom_closure))
        print(f"{report.origin[name]}: ForbiddenAxiom: {name} depends on {axioms}", file=stderr)
    code = exit_code(report, forbidden)
    if code != OK:
        return code

    if args.command == "check":
        print(f"ok: {report.checked_decls} declarations checked", file=stdout)
    elif args.name not in report.env:
        print(f"error: UnboundName: '{args.name}' is not declared", file=stderr)
        return CHECK_FAILED
    elif args.command == "axioms":
        for ax in sorted(report.env[args.name].axiom_closure):
            print(ax, file=stdout)
    else:
        print(s.print_term(to_raw(normalize(report.env, args.name))), file=stdout)
    return OK


def main() -> None:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
