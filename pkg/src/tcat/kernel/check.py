"""Bidirectional elaboration of raw terms into core terms.

Inferable: variables, globals, universes, applications, projections,
annotations, every type former and every eliminator.  Lambdas and pairs
are only checked.  Universes are cumulative: a term of type ``U l`` is
accepted where ``U l'`` with ``l <= l'`` is expected, covariantly under
Pi codomains and Sigma components.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable

from tcat import syntax as s
from tcat.kernel import core as c
from tcat.kernel.nbe import (
    HAxiom, HGlobal, Lazy, Value, VB0, VB1, VBool, VEmpty, VId, VLam, VNeutral, VPi,
    VRefl, VSigma, VStar, VUnit, VUniv, conv, evaluate, force, fresh, quote, vapp, vfst,
)


class Category(enum.Enum):
    """Closed list of elaboration error categories.

    UnboundName         name is neither bound locally nor declared
    NotAFunction        application of a non-function, or a lambda checked
                        against a non-function type
    NotAPair            projection from a non-pair, or a pair checked against
                        a non-Sigma type
    TypeMismatch        inferred and expected types are not convertible
                        (includes eliminator motives of the wrong arity)
    UniverseError       universe level too small, e.g. ``U 0 : U 0``
    ExpectedType        a type was required but the term is not one, or the
                        term cannot be inferred (bare lambda or pair)
    IdEndpointMismatch  an identity proof whose endpoints differ from the
                        required ones
    DuplicateName       a declaration reuses an existing global name
    """

    UnboundName = "UnboundName"
    NotAFunction = "NotAFunction"
    NotAPair = "NotAPair"
    TypeMismatch = "TypeMismatch"
    UniverseError = "UniverseError"
    ExpectedType = "ExpectedType"
    IdEndpointMismatch = "IdEndpointMismatch"
    DuplicateName = "DuplicateName"


class TypeCheckError(Exception):
    def __init__(self, category: Category, span: s.SrcSpan | None, message: str,
                 expected: str | None = None, actual: str | None = None):
        detail = message
        if expected is not None:
            detail += f"\n  expected: {expected}\n  actual:   {actual}"
        super().__init__(detail)
        self.category = category
        self.span = span
        self.message = message
        self.expected = expected
        self.actual = actual


# ---------------------------------------------------------------- globals

@dataclass(eq=False)
class Declaration:
    name: str
    kind: str  # "def" or "axiom"
    type: c.Term
    body: c.Term | None
    axiom_closure: frozenset[str]
    span: s.SrcSpan | None = None
    height: int = 0
    _type_value: Lazy | None = field(default=None, repr=False)
    _value: Lazy | None = field(default=None, repr=False)

    def type_value(self) -> Value:
        return self._type_value.force()

    def value(self) -> Value:
        """The unfolded value of a definition (axioms are their own neutral)."""
        return self._value.force()


class GlobalEnv:
    """Ordered, persistent map from names to checked declarations."""

    def __init__(self, decls: dict[str, Declaration] | None = None):
        self._decls = dict(decls or {})

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def __getitem__(self, name: str) -> Declaration:
        return self._decls[name]

    def __iter__(self):
        return iter(self._decls.values())

    def __len__(self) -> int:
        return len(self._decls)

    def names(self) -> list[str]:
        return list(self._decls)

    def global_value(self, name: str) -> Value:
        d = self._decls[name]
        if d.kind == "axiom":
            return VNeutral(HAxiom(name))
        return VNeutral(HGlobal(name, d.height), (), d._value)

    def extend(self, decl: Declaration) -> GlobalEnv:
        if decl.name in self._decls:
            raise TypeCheckError(Category.DuplicateName, decl.span,
                                 f"'{decl.name}' is already declared")
        env = GlobalEnv(self._decls)
        env._decls[decl.name] = decl
        decl._type_value = Lazy(lambda: evaluate(env, (), decl.type))
        if decl.kind == "def":
            decl._value = Lazy(lambda: evaluate(env, (), decl.body))
        return env


# ---------------------------------------------------------------- contexts

@dataclass(frozen=True)
class Context:
    names: tuple[str, ...] = ()
    types: tuple[Value, ...] = ()
    env: tuple[Value, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.names)

    def bind(self, name: str, ty: Value) -> Context:
        return Context(self.names + (name,), self.types + (ty,), self.env + (fresh(self.depth),))

    def lookup(self, name: str) -> tuple[int, Value] | None:
        if name == "_":
            return None
        for pos in range(len(self.names) - 1, -1, -1):
            if self.names[pos] == name:
                return len(self.names) - 1 - pos, self.types[pos]
        return None


# ---------------------------------------------------------------- elaborator

def subtype(depth: int, a: Value, b: Value) -> bool:
    if conv(depth, a, b):
        return True
    a, b = force(a), force(b)
    match a, b:
        case VUniv(l1), VUniv(l2):
            return l1 <= l2
        case VPi(_, d1, c1), VPi(_, d2, c2):
            x = fresh(depth)
            return conv(depth, d1, d2) and subtype(depth + 1, c1(x), c2(x))
        case VSigma(_, d1, c1), VSigma(_, d2, c2):
            x = fresh(depth)
            return subtype(depth, d1, d2) and subtype(depth + 1, c1(x), c2(x))
    return False


MotiveDomain = Callable[[list[Value]], Value]


class Elaborator:
    def __init__(self, genv: GlobalEnv):
        self.genv = genv

    # helpers

    def eval(self, ctx: Context, t: c.Term) -> Value:
        return evaluate(self.genv, ctx.env, t)

    def show(self, ctx: Context, v: Value) -> str:
        return s.print_term(to_raw(quote(ctx.depth, v), ctx.names))

    def error(self, cat: Category, raw: s.RawTerm, msg: str, ctx: Context | None = None,
              expected: Value | str | None = None, actual: Value | None = None) -> TypeCheckError:
        exp = act = None
        if actual is not None:
            exp = expected if isinstance(expected, str) else self.show(ctx, expected)
            act = self.show(ctx, actual)
        return TypeCheckError(cat, raw.span, msg, exp, act)

    # types

    def check_type(self, ctx: Context, raw: s.RawTerm) -> tuple[c.Term, int]:
        t, ty = self.infer(ctx, raw)
        ty = force(ty)
        if not isinstance(ty, VUniv):
            raise TypeCheckError(Category.ExpectedType, raw.span, "expected a type",
                                 "U _", self.show(ctx, ty))
        return t, ty.level

    # checking

    def check(self, ctx: Context, raw: s.RawTerm, expected: Value) -> c.Term:
        match raw:
            case s.Lam(name, body):
                ty = force(expected)
                if not isinstance(ty, VPi):
                    raise self.error(Category.NotAFunction, raw,
                                     "lambda checked against a non-function type",
                                     ctx, "a function type", ty)
                inner = ctx.bind(name, ty.dom)
                b = self.check(inner, body, ty.cod(inner.env[-1]))
                return c.Lam(name, b)
            case s.Pair(first, second):
                ty = force(expected)
                if not isinstance(ty, VSigma):
                    raise self.error(Category.NotAPair, raw,
                                     "pair checked against a non-Sigma type", ctx, "a Sigma type", ty)
                a = self.check(ctx, first, ty.dom)
                b = self.check(ctx, second, ty.cod(self.eval(ctx, a)))
                return c.Pair(a, b)
        t, actual = self.infer(ctx, raw)
        if not subtype(ctx.depth, actual, expected):
            raise self.mismatch(ctx, raw, expected, actual)
        return t

    def mismatch(self, ctx: Context, raw: s.RawTerm, expected: Value,
                 actual: Value) -> TypeCheckError:
        e, a = force(expected), force(actual)
        if isinstance(e, VUniv) and isinstance(a, VUniv):
            return self.error(Category.UniverseError, raw,
                              f"universe level {a.level} does not fit in {e.level}",
                              ctx, expected, actual)
        if isinstance(e, VId) and isinstance(a, VId) and conv(ctx.depth, e.type, a.type):
            return self.error(Category.IdEndpointMismatch, raw,
                              "identity proof has the wrong endpoints", ctx, expected, actual)
        return self.error(Category.TypeMismatch, raw, "type mismatch", ctx, expected, actual)

    def check_motive(self, ctx: Context, raw: s.RawTerm,
                     domains: list[MotiveDomain]) -> c.Term:
        """Check an eliminator motive: a type family over ``domains``, into any universe."""
        bound: list[Value] = []
        inner = ctx
        lams = []
        body = raw
        while isinstance(body, s.Lam) and len(bound) < len(domains):
            dom = domains[len(bound)](bound)
            lams.append(body.name)
            inner = inner.bind(body.name, dom)
            bound.append(inner.env[-1])
            body = body.body
        if len(bound) == len(domains):
            t, _ = self.check_type(inner, body)
        else:
            t, ty = self.infer(inner, body)
            for i in range(len(bound), len(domains)):
                ty = force(ty)
                dom = domains[i](bound)
                if not isinstance(ty, VPi) or not conv(inner.depth + i - len(lams), ty.dom, dom):
                    raise TypeCheckError(
                        Category.TypeMismatch, raw.span,
                        f"motive must be a type family of {len(domains)} argument(s)")
                x = fresh(inner.depth + i - len(lams))
                bound.append(x)
                ty = ty.cod(x)
            if not isinstance(force(ty), VUniv):
                raise TypeCheckError(Category.TypeMismatch, raw.span,
                                     f"motive must be a type family of {len(domains)} argument(s)")
        for name in reversed(lams):
            t = c.Lam(name, t)
        return t

    # inference

    def infer(self, ctx: Context, raw: s.RawTerm) -> tuple[c.Term, Value]:
        match raw:
            case s.Var(name):
                hit = ctx.lookup(name)
                if hit is not None:
                    return c.Var(hit[0]), hit[1]
                if name in self.genv:
                    return c.Global(name), self.genv[name].type_value()
                raise TypeCheckError(Category.UnboundName, raw.span, f"unbound name '{name}'")
            case s.Universe(level):
                return c.Univ(level), VUniv(level + 1)
            case s.Pi(name, dom, cod) | s.Sigma(name, dom, cod):
                d, l1 = self.check_type(ctx, dom)
                inner = ctx.bind(name, self.eval(ctx, d))
                b, l2 = self.check_type(inner, cod)
                former = c.Pi if isinstance(raw, s.Pi) else c.Sigma
                return former(name, d, b), VUniv(max(l1, l2))
            case s.Lam():
                raise TypeCheckError(Category.ExpectedType, raw.span,
                                     "cannot infer the type of an un-annotated lambda")
            case s.Pair():
                raise TypeCheckError(Category.ExpectedType, raw.span,
                                     "cannot infer the type of an un-annotated pair")
            case s.App(fn, arg):
                f, fty = self.infer(ctx, fn)
                fty = force(fty)
                if not isinstance(fty, VPi):
                    raise self.error(Category.NotAFunction, fn,
                                     "applied term is not a function", ctx, "a function type", fty)
                a = self.check(ctx, arg, fty.dom)
                return c.App(f, a), fty.cod(self.eval(ctx, a))
            case s.Fst(p) | s.Snd(p):
                t, ty = self.infer(ctx, p)
                ty = force(ty)
                if not isinstance(ty, VSigma):
                    raise self.error(Category.NotAPair, p, "projection from a non-pair",
                                     ctx, "a Sigma type", ty)
                if isinstance(raw, s.Fst):
                    return c.Fst(t), ty.dom
                return c.Snd(t), ty.cod(vfst(self.eval(ctx, t)))
            case s.IdTy(a, x, y):
                at, level = self.check_type(ctx, a)
                av = self.eval(ctx, at)
                return c.IdTy(at, self.check(ctx, x, av), self.check(ctx, y, av)), VUniv(level)
            case s.Refl(a, x):
                at, _ = self.check_type(ctx, a)
                av = self.eval(ctx, at)
                xt = self.check(ctx, x, av)
                xv = self.eval(ctx, xt)
                return c.Refl(at, xt), VId(av, xv, xv)
            case s.J(a, x, motive, case, end, proof):
                at, _ = self.check_type(ctx, a)
                av = self.eval(ctx, at)
                xt = self.check(ctx, x, av)
                xv = self.eval(ctx, xt)
                mt = self.check_motive(ctx, motive, [lambda vs: av,
                                                     lambda vs: VId(av, xv, vs[0])])
                mv = self.eval(ctx, mt)
                ct = self.check(ctx, case, vapp(vapp(mv, xv), VRefl(av, xv)))
                et = self.check(ctx, end, av)
                ev = self.eval(ctx, et)
                pt = self.check(ctx, proof, VId(av, xv, ev))
                return c.J(at, xt, mt, ct, et, pt), vapp(vapp(mv, ev), self.eval(ctx, pt))
            case s.Empty():
                return c.Empty(), VUniv(0)
            case s.Unit():
                return c.Unit(), VUniv(0)
            case s.Bool():
                return c.Bool(), VUniv(0)
            case s.Star():
                return c.Star(), VUnit()
            case s.BZero():
                return c.BZero(), VBool()
            case s.BOne():
                return c.BOne(), VBool()
            case s.ElimEmpty(motive, e):
                mt = self.check_motive(ctx, motive, [lambda vs: VEmpty()])
                et = self.check(ctx, e, VEmpty())
                return c.ElimEmpty(mt, et), vapp(self.eval(ctx, mt), self.eval(ctx, et))
            case s.ElimUnit(motive, case, e):
                mt = self.check_motive(ctx, motive, [lambda vs: VUnit()])
                mv = self.eval(ctx, mt)
                ct = self.check(ctx, case, vapp(mv, VStar()))
                et = self.check(ctx, e, VUnit())
                return c.ElimUnit(mt, ct, et), vapp(mv, self.eval(ctx, et))
            case s.ElimBool(motive, zero, one, e):
                mt = self.check_motive(ctx, motive, [lambda vs: VBool()])
                mv = self.eval(ctx, mt)
                zt = self.check(ctx, zero, vapp(mv, VB0()))
                ot = self.check(ctx, one, vapp(mv, VB1()))
                et = self.check(ctx, e, VBool())
                return c.ElimBool(mt, zt, ot, et), vapp(mv, self.eval(ctx, et))
            case s.Ann(term, ty):
                tt, _ = self.check_type(ctx, ty)
                tv = self.eval(ctx, tt)
                return self.check(ctx, term, tv), tv
        raise TypeError(f"not a raw term: {raw!r}")


# ---------------------------------------------------------------- declarations

def check_declaration(genv: GlobalEnv, decl: s.RawDecl) -> GlobalEnv:
    """Elaborate one declaration and return the extended environment."""
    if decl.name in genv:
        raise TypeCheckError(Category.DuplicateName, decl.span,
                             f"'{decl.name}' is already declared")
    el = Elaborator(genv)
    ctx = Context()
    body = None
    if decl.type_expr is not None:
        ty, _ = el.check_type(ctx, decl.type_expr)
        if decl.kind == "def":
            body = el.check(ctx, decl.body, el.eval(ctx, ty))
    else:
        body, tyv = el.infer(ctx, decl.body)
        ty = quote(0, tyv)
    refs = c.globals_of(ty) | (c.globals_of(body) if body is not None else set())
    if decl.kind == "axiom":
        closure = frozenset({decl.name})
    else:
        closure = frozenset().union(*(genv[r].axiom_closure for r in refs))
    height = 1 + max((genv[r].height for r in refs), default=0)
    return genv.extend(Declaration(decl.name, decl.kind, ty, body, closure, decl.span, height))


def check_declarations(decls: Iterable[s.RawDecl], genv: GlobalEnv | None = None) -> GlobalEnv:
    genv = genv or GlobalEnv()
    for d in decls:
        genv = check_declaration(genv, d)
    return genv


def axiom_closure(genv: GlobalEnv, name: str) -> frozenset[str]:
    if name not in genv:
        raise TypeCheckError(Category.UnboundName, None, f"unbound name '{name}'")
    return genv[name].axiom_closure


def normalize(genv: GlobalEnv, target: str | s.RawTerm) -> c.Term:
    """Beta-normal form with definitions unfolded; axioms stay opaque."""
    if isinstance(target, str):
        if target not in genv:
            raise TypeCheckError(Category.UnboundName, None, f"unbound name '{target}'")
        d = genv[target]
        if d.kind == "axiom":
            return c.Global(target)
        return quote(0, d.value(), unfold=True)
    t, _ = Elaborator(genv).infer(Context(), target)
    return quote(0, evaluate(genv, (), t), unfold=True)


# ---------------------------------------------------------------- readback to surface

def occurs(t: c.Term, index: int) -> bool:
    match t:
        case c.Var(i):
            return i == index
        case c.Pi(_, d, b) | c.Sigma(_, d, b):
            return occurs(d, index) or occurs(b, index + 1)
        case c.Lam(_, b):
            return occurs(b, index + 1)
    return any(occurs(u, index) for u in c.subterms(t))


def to_raw(t: c.Term, names: tuple[str, ...] | list[str] = ()) -> s.RawTerm:
    """Name a core term's variables so that it prints and reparses faithfully.

    ``names`` lists the context's binder names, outermost first.  Binders
    are renamed when they would capture a variable or a global.
    """
    return _to_raw(t, list(names), c.globals_of(t))


def _pick(name: str, used: set[str]) -> str:
    if name not in used and name not in s.KEYWORDS:
        return name
    base = name.rstrip("0123456789") or "x"
    i = 1
    while f"{base}{i}" in used or f"{base}{i}" in s.KEYWORDS:
        i += 1
    return f"{base}{i}"


def _to_raw(t: c.Term, names: list[str], globals_: set[str]) -> s.RawTerm:
    match t:
        case c.Var(i):
            return s.Var(names[-1 - i])
        case c.Global(name):
            return s.Var(name)
        case c.Univ(level):
            return s.Universe(level)
        case c.Pi(name, _, b) | c.Sigma(name, _, b) | c.Lam(name, b):
            if occurs(b, 0):
                name = _pick("x" if name == "_" else name, set(names) | globals_)
            elif name != "_":
                name = _pick(name, set(names) | globals_)
            body = _to_raw(b, names + [name], globals_)
            if isinstance(t, c.Lam):
                return s.Lam(name, body)
            dom = _to_raw(t.dom, names, globals_)
            return (s.Pi if isinstance(t, c.Pi) else s.Sigma)(name, dom, body)
    ctor = getattr(s, type(t).__name__.replace("Univ", "Universe"))
    return ctor(*(_to_raw(u, names, globals_) for u in c.subterms(t)))
