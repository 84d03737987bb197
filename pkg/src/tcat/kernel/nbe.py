"""Normalization by evaluation.

Terms use de Bruijn indices, values use de Bruijn levels.  References to
defined globals evaluate to *glued* neutrals: a neutral headed by the
global's name that also carries a lazily computed unfolding.  Conversion
compares glued neutrals by head first and unfolds only when that fails,
so definitions stay folded in types and error messages unless needed.
Axioms evaluate to plain neutrals and never unfold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from tcat.kernel import core as c


class Lazy:
    __slots__ = ("_thunk", "_value")

    def __init__(self, thunk: Callable[[], Value]):
        self._thunk = thunk
        self._value = None

    def force(self) -> Value:
        if self._thunk is not None:
            self._value = self._thunk()
            self._thunk = None
        return self._value


# ---------------------------------------------------------------- values

class Closure:
    __slots__ = ("genv", "env", "body")

    def __init__(self, genv, env: tuple, body: c.Term):
        self.genv = genv
        self.env = env
        self.body = body

    def __call__(self, arg: Value) -> Value:
        return evaluate(self.genv, self.env + (arg,), self.body)


@dataclass(frozen=True, slots=True)
class VLam:
    name: str
    body: Closure


@dataclass(frozen=True, slots=True)
class VPi:
    name: str
    dom: Value
    cod: Closure


@dataclass(frozen=True, slots=True)
class VSigma:
    name: str
    dom: Value
    cod: Closure


@dataclass(frozen=True, slots=True)
class VPair:
    first: Value
    second: Value


@dataclass(frozen=True, slots=True)
class VUniv:
    level: int


@dataclass(frozen=True, slots=True)
class VId:
    type: Value
    lhs: Value
    rhs: Value


@dataclass(frozen=True, slots=True)
class VRefl:
    type: Value
    point: Value


@dataclass(frozen=True, slots=True)
class VEmpty:
    pass


@dataclass(frozen=True, slots=True)
class VUnit:
    pass


@dataclass(frozen=True, slots=True)
class VStar:
    pass


@dataclass(frozen=True, slots=True)
class VBool:
    pass


@dataclass(frozen=True, slots=True)
class VB0:
    pass


@dataclass(frozen=True, slots=True)
class VB1:
    pass


# neutral heads

@dataclass(frozen=True, slots=True)
class HVar:
    level: int


@dataclass(frozen=True, slots=True)
class HAxiom:
    name: str


@dataclass(frozen=True, slots=True)
class HGlobal:
    name: str
    height: int


# spine frames, innermost first

@dataclass(frozen=True, slots=True)
class EApp:
    arg: Value


@dataclass(frozen=True, slots=True)
class EFst:
    pass


@dataclass(frozen=True, slots=True)
class ESnd:
    pass


@dataclass(frozen=True, slots=True)
class EJ:
    type: Value
    base: Value
    motive: Value
    case: Value
    end: Value


@dataclass(frozen=True, slots=True)
class EElim0:
    motive: Value


@dataclass(frozen=True, slots=True)
class EElim1:
    motive: Value
    case: Value


@dataclass(frozen=True, slots=True)
class EElim2:
    motive: Value
    zero: Value
    one: Value


Head = Union[HVar, HAxiom, HGlobal]
Frame = Union[EApp, EFst, ESnd, EJ, EElim0, EElim1, EElim2]


@dataclass(frozen=True, slots=True)
class VNeutral:
    head: Head
    spine: tuple = ()
    glued: Lazy | None = None


Value = Union[VLam, VPi, VSigma, VPair, VUniv, VId, VRefl, VEmpty, VUnit, VStar,
              VBool, VB0, VB1, VNeutral]


def fresh(level: int) -> VNeutral:
    return VNeutral(HVar(level))


def force(v: Value) -> Value:
    """Unfold glued global references until the head is canonical or stuck."""
    while isinstance(v, VNeutral) and v.glued is not None:
        v = v.glued.force()
    return v


# ---------------------------------------------------------------- elimination

def _stuck(v: VNeutral, frame: Frame) -> VNeutral:
    glued = None
    if v.glued is not None:
        inner = v.glued
        glued = Lazy(lambda: eliminate(inner.force(), frame))
    return VNeutral(v.head, v.spine + (frame,), glued)


def eliminate(v: Value, frame: Frame) -> Value:
    if isinstance(v, VNeutral):
        return _stuck(v, frame)
    match frame:
        case EApp(arg):
            if isinstance(v, VLam):
                return v.body(arg)
        case EFst():
            if isinstance(v, VPair):
                return v.first
        case ESnd():
            if isinstance(v, VPair):
                return v.second
        case EJ(case=case):
            if isinstance(v, VRefl):
                return case
        case EElim1(case=case):
            if isinstance(v, VStar):
                return case
        case EElim2(zero=zero, one=one):
            if isinstance(v, VB0):
                return zero
            if isinstance(v, VB1):
                return one
    raise RuntimeError(f"ill-typed elimination {frame!r} of {v!r}")


def vapp(f: Value, a: Value) -> Value:
    if isinstance(f, VLam):
        return f.body(a)
    return eliminate(f, EApp(a))


def vfst(v: Value) -> Value:
    return v.first if isinstance(v, VPair) else eliminate(v, EFst())


def vsnd(v: Value) -> Value:
    return v.second if isinstance(v, VPair) else eliminate(v, ESnd())


# ---------------------------------------------------------------- evaluation

def evaluate(genv, env: tuple, t: c.Term) -> Value:
    match t:
        case c.Var(i):
            return env[-1 - i]
        case c.Global(name):
            return genv.global_value(name)
        case c.App(fn, arg):
            return vapp(evaluate(genv, env, fn), evaluate(genv, env, arg))
        case c.Lam(name, body):
            return VLam(name, Closure(genv, env, body))
        case c.Pi(name, dom, cod):
            return VPi(name, evaluate(genv, env, dom), Closure(genv, env, cod))
        case c.Sigma(name, dom, cod):
            return VSigma(name, evaluate(genv, env, dom), Closure(genv, env, cod))
        case c.Pair(a, b):
            return VPair(evaluate(genv, env, a), evaluate(genv, env, b))
        case c.Fst(p):
            return vfst(evaluate(genv, env, p))
        case c.Snd(p):
            return vsnd(evaluate(genv, env, p))
        case c.Univ(level):
            return VUniv(level)
        case c.IdTy(a, x, y):
            return VId(evaluate(genv, env, a), evaluate(genv, env, x), evaluate(genv, env, y))
        case c.Refl(a, x):
            return VRefl(evaluate(genv, env, a), evaluate(genv, env, x))
        case c.J(a, x, motive, case, end, proof):
            ev = lambda u: evaluate(genv, env, u)  # noqa: E731
            return eliminate(ev(proof), EJ(ev(a), ev(x), ev(motive), ev(case), ev(end)))
        case c.ElimEmpty(motive, e):
            return eliminate(evaluate(genv, env, e), EElim0(evaluate(genv, env, motive)))
        case c.ElimUnit(motive, case, e):
            return eliminate(evaluate(genv, env, e),
                             EElim1(evaluate(genv, env, motive), evaluate(genv, env, case)))
        case c.ElimBool(motive, zero, one, e):
            ev = lambda u: evaluate(genv, env, u)  # noqa: E731
            return eliminate(ev(e), EElim2(ev(motive), ev(zero), ev(one)))
        case c.Empty():
            return VEmpty()
        case c.Unit():
            return VUnit()
        case c.Star():
            return VStar()
        case c.Bool():
            return VBool()
        case c.BZero():
            return VB0()
        case c.BOne():
            return VB1()
    raise TypeError(f"not a core term: {t!r}")


# ---------------------------------------------------------------- readback

def quote(depth: int, v: Value, unfold: bool = False) -> c.Term:
    """Read a value back into a beta-normal core term.

    With ``unfold`` set, defined globals are expanded; otherwise glued
    references are read back as the global name applied to its spine.
    """
    if unfold:
        v = force(v)
    match v:
        case VNeutral(head, spine):
            match head:
                case HVar(level):
                    t = c.Var(depth - 1 - level)
                case HAxiom(name) | HGlobal(name):
                    t = c.Global(name)
            for frame in spine:
                t = _quote_frame(depth, t, frame, unfold)
            return t
        case VLam(name, body):
            return c.Lam(name, quote(depth + 1, body(fresh(depth)), unfold))
        case VPi(name, dom, cod):
            return c.Pi(name, quote(depth, dom, unfold), quote(depth + 1, cod(fresh(depth)), unfold))
        case VSigma(name, dom, cod):
            return c.Sigma(name, quote(depth, dom, unfold), quote(depth + 1, cod(fresh(depth)), unfold))
        case VPair(a, b):
            return c.Pair(quote(depth, a, unfold), quote(depth, b, unfold))
        case VUniv(level):
            return c.Univ(level)
        case VId(a, x, y):
            return c.IdTy(quote(depth, a, unfold), quote(depth, x, unfold), quote(depth, y, unfold))
        case VRefl(a, x):
            return c.Refl(quote(depth, a, unfold), quote(depth, x, unfold))
        case VEmpty():
            return c.Empty()
        case VUnit():
            return c.Unit()
        case VStar():
            return c.Star()
        case VBool():
            return c.Bool()
        case VB0():
            return c.BZero()
        case VB1():
            return c.BOne()
    raise TypeError(f"not a value: {v!r}")


def _quote_frame(depth: int, t: c.Term, frame: Frame, unfold: bool) -> c.Term:
    q = lambda v: quote(depth, v, unfold)  # noqa: E731
    match frame:
        case EApp(arg):
            return c.App(t, q(arg))
        case EFst():
            return c.Fst(t)
        case ESnd():
            return c.Snd(t)
        case EJ(a, x, motive, case, end):
            return c.J(q(a), q(x), q(motive), q(case), q(end), t)
        case EElim0(motive):
            return c.ElimEmpty(q(motive), t)
        case EElim1(motive, case):
            return c.ElimUnit(q(motive), q(case), t)
        case EElim2(motive, zero, one):
            return c.ElimBool(q(motive), q(zero), q(one), t)
    raise TypeError(f"not a frame: {frame!r}")


# ---------------------------------------------------------------- conversion

_CONSTANTS = (VEmpty, VUnit, VStar, VBool, VB0, VB1)


def conv(depth: int, a: Value, b: Value) -> bool:
    """Definitional equality: beta, delta for defined globals, eta for Pi and Sigma."""
    if a is b:
        return True
    if isinstance(a, VNeutral) and isinstance(b, VNeutral):
        if a.head == b.head and _conv_spines(depth, a.spine, b.spine):
            return True
        ha = a.head.height if a.glued is not None else -1
        hb = b.head.height if b.glued is not None else -1
        if ha < 0 and hb < 0:
            return False
        # unfold the taller definition first; both when equally tall
        if ha >= hb:
            a = a.glued.force()
        if hb >= ha:
            b = b.glued.force()
        return conv(depth, a, b)
    if isinstance(a, VNeutral) and a.glued is not None:
        return conv(depth, a.glued.force(), b)
    if isinstance(b, VNeutral) and b.glued is not None:
        return conv(depth, a, b.glued.force())

    if isinstance(a, VLam) or isinstance(b, VLam):
        if not isinstance(a, (VLam, VNeutral)) or not isinstance(b, (VLam, VNeutral)):
            return False
        x = fresh(depth)
        return conv(depth + 1, vapp(a, x), vapp(b, x))
    if isinstance(a, VPair) or isinstance(b, VPair):
        if not isinstance(a, (VPair, VNeutral)) or not isinstance(b, (VPair, VNeutral)):
            return False
        return conv(depth, vfst(a), vfst(b)) and conv(depth, vsnd(a), vsnd(b))

    match a, b:
        case VPi(_, d1, c1), VPi(_, d2, c2):
            return conv(depth, d1, d2) and conv(depth + 1, c1(fresh(depth)), c2(fresh(depth)))
        case VSigma(_, d1, c1), VSigma(_, d2, c2):
            return conv(depth, d1, d2) and conv(depth + 1, c1(fresh(depth)), c2(fresh(depth)))
        case VUniv(l1), VUniv(l2):
            return l1 == l2
        case VId(t1, x1, y1), VId(t2, x2, y2):
            return conv(depth, t1, t2) and conv(depth, x1, x2) and conv(depth, y1, y2)
        case VRefl(t1, x1), VRefl(t2, x2):
            return conv(depth, t1, t2) and conv(depth, x1, x2)
    if isinstance(a, _CONSTANTS):
        return type(a) is type(b)
    return False


def _conv_spines(depth: int, s1: tuple, s2: tuple) -> bool:
    if len(s1) != len(s2):
        return False
    for f1, f2 in zip(s1, s2):
        if type(f1) is not type(f2):
            return False
        match f1, f2:
            case EApp(x), EApp(y):
                if not conv(depth, x, y):
                    return False
            case (EFst(), EFst()) | (ESnd(), ESnd()):
                pass
            case _:
                # J and the finite-type eliminators: compare every component
                for name in f1.__dataclass_fields__:
                    if not conv(depth, getattr(f1, name), getattr(f2, name)):
                        return False
    return True
