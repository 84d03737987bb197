"""Surface syntax of the object language: tokens, raw terms, parser, printer.

The concrete syntax is ASCII-only.  A file is a sequence of declarations::

    def name : type := body;
    def name := body;          -- body must be inferable
    axiom name : type;

Terms::

    fun x y => t                 lambda (binders are bare names)
    (x y : A) -> B    A -> B     dependent / plain function type
    (x : A) ** B      A ** B     dependent / plain pair type
    f a b                        application, left-associative
    pair a b   fst p   snd p
    Id A a b   refl A a   J A a C d b p
    N0  elim0 C e    N1  star  elim1 C c e    N2  b0  b1  elim2 C c0 c1 e
    U 0          universes
    (t : T)      annotation

``->`` and ``**`` are right-associative and ``**`` binds tighter.  ``--``
starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class SrcSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"

    def contains(self, other: SrcSpan) -> bool:
        return ((self.start_line, self.start_col) <= (other.start_line, other.start_col)
                and (other.end_line, other.end_col) <= (self.end_line, self.end_col))


def join(a: SrcSpan, b: SrcSpan) -> SrcSpan:
    return SrcSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


class ParseError(Exception):
    def __init__(self, span: SrcSpan, expected: str, found: str):
        super().__init__(f"{span}: expected {expected}, found {found}")
        self.span = span
        self.expected = expected
        self.found = found


# ---------------------------------------------------------------- tokens

KEYWORDS = {
    "def", "axiom", "fun", "U", "pair", "fst", "snd", "Id", "refl", "J",
    "N0", "elim0", "N1", "star", "elim1", "N2", "b0", "b1", "elim2",
}

SYMBOLS = {
    ":=": "ASSIGN",
    "->": "ARROW",
    "=>": "FATARROW",
    "**": "STARSTAR",
    "(": "LPAREN",
    ")": "RPAREN",
    ":": "COLON",
    ";": "SEMI",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<nat>[0-9]+)
  | (?P<sym>:=|->|=>|\*\*|[():;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SrcSpan

    def __repr__(self) -> str:
        if self.kind in ("IDENT", "NAT"):
            return f"{self.kind} {self.text}"
        return self.kind


def _advance(line: int, col: int, text: str) -> tuple[int, int]:
    newlines = text.count("\n")
    if newlines:
        return line + newlines, len(text) - text.rfind("\n")
    return line, col + len(text)


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    """Split ``text`` into tokens, dropping whitespace and comments.

    The returned list always ends with an ``EOF`` token.
    """
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SrcSpan(file, line, col, line, col + 1)
            raise ParseError(span, "a token", repr(text[pos]))
        chunk = m.group()
        end_line, end_col = _advance(line, col, chunk)
        kind = m.lastgroup
        if kind == "ident":
            kind = f"KW_{chunk.upper()}" if chunk in KEYWORDS else "IDENT"
        elif kind == "nat":
            kind = "NAT"
        elif kind == "sym":
            kind = SYMBOLS[chunk]
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, SrcSpan(file, line, col, end_line, end_col)))
        pos, line, col = m.end(), end_line, end_col
    tokens.append(Token("EOF", "", SrcSpan(file, line, col, line, col)))
    return tokens


# ---------------------------------------------------------------- raw terms

def _span():
    return field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Var:
    name: str
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Universe:
    level: int
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Pi:
    name: str
    domain: RawTerm
    codomain: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Lam:
    name: str
    body: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class App:
    fn: RawTerm
    arg: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Sigma:
    name: str
    first: RawTerm
    second: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Pair:
    first: RawTerm
    second: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Fst:
    term: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Snd:
    term: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class IdTy:
    type: RawTerm
    lhs: RawTerm
    rhs: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Refl:
    type: RawTerm
    point: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class J:
    type: RawTerm
    base: RawTerm
    motive: RawTerm
    case: RawTerm
    end: RawTerm
    proof: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Empty:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class ElimEmpty:
    motive: RawTerm
    scrutinee: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Unit:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Star:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class ElimUnit:
    motive: RawTerm
    case: RawTerm
    scrutinee: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Bool:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class BZero:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class BOne:
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class ElimBool:
    motive: RawTerm
    zero: RawTerm
    one: RawTerm
    scrutinee: RawTerm
    span: SrcSpan | None = _span()


@dataclass(frozen=True)
class Ann:
    term: RawTerm
    type: RawTerm
    span: SrcSpan | None = _span()


RawTerm = Union[Var, Universe, Pi, Lam, App, Sigma, Pair, Fst, Snd, IdTy, Refl, J,
                Empty, ElimEmpty, Unit, Star, ElimUnit, Bool, BZero, BOne, ElimBool, Ann]


@dataclass(frozen=True)
class RawDecl:
    kind: str  # "def" or "axiom"
    name: str
    type_expr: RawTerm | None
    body: RawTerm | None
    span: SrcSpan | None = field(default=None, compare=False)
    # offsets into the source text, used to cut a declaration out of a file
    start: int = field(default=0, compare=False, repr=False)
    stop: int = field(default=0, compare=False, repr=False)


@dataclass
class SourceFile:
    path: str
    decls: list[RawDecl]


def children(t: RawTerm) -> Iterator[RawTerm]:
    for name in t.__dataclass_fields__:
        if name == "span":
            continue
        v = getattr(t, name)
        if not isinstance(v, (str, int)):
            yield v


# ---------------------------------------------------------------- parser

# Prefix formers with a fixed number of atomic arguments.
_PRIMS = {
    "KW_PAIR": (Pair, 2),
    "KW_FST": (Fst, 1),
    "KW_SND": (Snd, 1),
    "KW_ID": (IdTy, 3),
    "KW_REFL": (Refl, 2),
    "KW_J": (J, 6),
    "KW_ELIM0": (ElimEmpty, 2),
    "KW_ELIM1": (ElimUnit, 3),
    "KW_ELIM2": (ElimBool, 4),
}

_CONSTS = {
    "KW_N0": Empty,
    "KW_N1": Unit,
    "KW_STAR": Star,
    "KW_N2": Bool,
    "KW_B0": BZero,
    "KW_B1": BOne,
}

_ATOM_START = {"IDENT", "LPAREN", *_CONSTS}


class _Parser:
    def __init__(self, text: str, file: str):
        self.text = text
        self.path = file
        self.toks = tokenize(text, file)
        self.i = 0
        # annotations written directly as `(t : T)`; candidates for binder groups
        self.groups: dict[int, RawTerm] = {}
        self._line_offsets = [0]
        for m in re.finditer("\n", text):
            self._line_offsets.append(m.end())

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.fail(what)
        return self.next()

    def fail(self, expected: str):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(t.span, expected, found)

    def offset(self, line: int, col: int) -> int:
        return self._line_offsets[line - 1] + col - 1

    # declarations

    def file(self) -> list[RawDecl]:
        decls = []
        while self.tok.kind != "EOF":
            decls.append(self.decl())
        return decls

    def decl(self) -> RawDecl:
        start = self.tok
        if start.kind not in ("KW_DEF", "KW_AXIOM"):
            self.fail("'def' or 'axiom'")
        self.next()
        name = self.expect("IDENT", "a declaration name").text
        type_expr = body = None
        if start.kind == "KW_AXIOM":
            self.expect("COLON", "':'")
            type_expr = self.term()
        else:
            if self.tok.kind == "COLON":
                self.next()
                type_expr = self.term()
            self.expect("ASSIGN", "':='")
            body = self.term()
        end = self.expect("SEMI", "';'")
        span = join(start.span, end.span)
        return RawDecl(start.kind[3:].lower(), name, type_expr, body, span,
                       self.offset(span.start_line, span.start_col),
                       self.offset(span.end_line, span.end_col))

    # terms

    def term(self) -> RawTerm:
        if self.tok.kind == "KW_FUN":
            start = self.next()
            names = [self.expect("IDENT", "a binder name")]
            while self.tok.kind == "IDENT":
                names.append(self.next())
            self.expect("FATARROW", "'=>'")
            body = self.term()
            for n in reversed(names[1:]):
                body = Lam(n.text, body, span=join(n.span, body.span))
            return Lam(names[0].text, body, span=join(start.span, body.span))
        return self.arrow()

    def arrow(self) -> RawTerm:
        left = self.sigma()
        if self.tok.kind != "ARROW":
            return left
        self.next()
        right = self.term()
        return self._binder(Pi, left, right)

    def sigma(self) -> RawTerm:
        left = self.app()
        if self.tok.kind != "STARSTAR":
            return left
        self.next()
        right = self.sigma()
        return self._binder(Sigma, left, right)

    def _binder(self, former, left: RawTerm, right: RawTerm) -> RawTerm:
        if self.groups.pop(id(left), None) is left:
            names = _binder_names(left.term)
            if names is None:
                raise ParseError(left.term.span, "binder names before ':'", "a term")
            out = right
            for n in reversed(names[1:]):
                out = former(n.name, left.type, out, span=join(n.span, out.span))
            return former(names[0].name, left.type, out, span=join(left.span, out.span))
        return former("_", left, right, span=join(left.span, right.span))

    def app(self) -> RawTerm:
        kind = self.tok.kind
        if kind in _PRIMS:
            start = self.next()
            ctor, arity = _PRIMS[kind]
            args = [self.atom() for _ in range(arity)]
            head = ctor(*args, span=join(start.span, args[-1].span))
        elif kind == "KW_U":
            start = self.next()
            n = self.expect("NAT", "a universe level")
            head = Universe(int(n.text), span=join(start.span, n.span))
        else:
            head = self.atom()
        while self.tok.kind in _ATOM_START:
            arg = self.atom()
            head = App(head, arg, span=join(head.span, arg.span))
        return head

    def atom(self) -> RawTerm:
        t = self.tok
        if t.kind == "IDENT":
            self.next()
            return Var(t.text, span=t.span)
        if t.kind in _CONSTS:
            self.next()
            return _CONSTS[t.kind](span=t.span)
        if t.kind == "LPAREN":
            self.next()
            inner = self.term()
            if self.tok.kind == "COLON":
                self.next()
                ty = self.term()
                end = self.expect("RPAREN", "')'")
                node = Ann(inner, ty, span=join(t.span, end.span))
                self.groups[id(node)] = node
                return node
            self.expect("RPAREN", "')'")
            if self.groups.get(id(inner)) is inner:
                del self.groups[id(inner)]
            return inner
        self.fail("a term")


def _binder_names(t: RawTerm) -> list[Var] | None:
    if isinstance(t, Var):
        return [t]
    if isinstance(t, App) and isinstance(t.arg, Var):
        head = _binder_names(t.fn)
        return None if head is None else head + [t.arg]
    return None


def parse_file(text: str, file: str = "<input>") -> SourceFile:
    return SourceFile(file, _Parser(text, file).file())


def parse_term(text: str, file: str = "<input>") -> RawTerm:
    p = _Parser(text, file)
    t = p.term()
    if p.tok.kind != "EOF":
        p.fail("end of input")
    return t


# ---------------------------------------------------------------- printer

_TERM, _SIGMA, _APP, _ATOM = range(4)

_CONST_TEXT = {Empty: "N0", Unit: "N1", Star: "star", Bool: "N2", BZero: "b0", BOne: "b1"}

_PRIM_TEXT = {Pair: "pair", Fst: "fst", Snd: "snd", IdTy: "Id", Refl: "refl", J: "J",
              ElimEmpty: "elim0", ElimUnit: "elim1", ElimBool: "elim2"}


def print_term(t: RawTerm) -> str:
    return _print(t, _TERM)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


def _print(t: RawTerm, prec: int) -> str:
    match t:
        case Var(name):
            return name
        case Universe(level):
            return _paren(f"U {level}", prec > _APP)
        case Lam():
            names = []
            while isinstance(t, Lam):
                names.append(t.name)
                t = t.body
            return _paren(f"fun {' '.join(names)} => {_print(t, _TERM)}", prec > _TERM)
        case Pi(name, dom, cod):
            if name == "_":
                s = f"{_print_operand(dom, _SIGMA)} -> {_print(cod, _TERM)}"
            else:
                s = f"({name} : {_print(dom, _TERM)}) -> {_print(cod, _TERM)}"
            return _paren(s, prec > _TERM)
        case Sigma(name, first, second):
            if name == "_":
                s = f"{_print_operand(first, _APP)} ** {_print(second, _SIGMA)}"
            else:
                s = f"({name} : {_print(first, _TERM)}) ** {_print(second, _SIGMA)}"
            return _paren(s, prec > _SIGMA)
        case App(fn, arg):
            return _paren(f"{_print(fn, _APP)} {_print(arg, _ATOM)}", prec > _APP)
        case Ann(term, ty):
            return f"({_print(term, _TERM)} : {_print(ty, _TERM)})"
        case _ if type(t) in _CONST_TEXT:
            return _CONST_TEXT[type(t)]
        case _ if type(t) in _PRIM_TEXT:
            args = " ".join(_print(c, _ATOM) for c in children(t))
            return _paren(f"{_PRIM_TEXT[type(t)]} {args}", prec > _APP)
    raise TypeError(f"not a raw term: {t!r}")


def _print_operand(t: RawTerm, prec: int) -> str:
    # an annotation on the left of -> or ** would reparse as a binder group
    s = _print(t, prec)
    return f"({s})" if isinstance(t, Ann) else s


# ---------------------------------------------------------------- alpha equality

_BINDERS = {Pi: ("domain", "codomain"), Sigma: ("first", "second"), Lam: (None, "body")}


def alpha_eq(a: RawTerm, b: RawTerm) -> bool:
    """Structural equality up to renaming of bound variables, ignoring spans."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a, b, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = env_a.get(a.name), env_b.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, Universe):
        return a.level == b.level
    if type(a) in _BINDERS:
        dom, body = _BINDERS[type(a)]
        if dom and not _alpha(getattr(a, dom), getattr(b, dom), env_a, env_b, depth):
            return False
        return _alpha(getattr(a, body), getattr(b, body),
                      {**env_a, a.name: depth}, {**env_b, b.name: depth}, depth + 1)
    return all(_alpha(x, y, env_a, env_b, depth) for x, y in zip(children(a), children(b)))
