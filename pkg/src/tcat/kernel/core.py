"""Core terms: de Bruijn indexed kernel syntax.

Binder names are display hints only and take no part in equality, so ``==``
on core terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Global:
    name: str


@dataclass(frozen=True)
class Univ:
    level: int


@dataclass(frozen=True)
class Pi:
    name: str = field(compare=False)
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Lam:
    name: str = field(compare=False)
    body: Term


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Sigma:
    name: str = field(compare=False)
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Pair:
    first: Term
    second: Term


@dataclass(frozen=True)
class Fst:
    term: Term


@dataclass(frozen=True)
class Snd:
    term: Term


@dataclass(frozen=True)
class IdTy:
    type: Term
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Refl:
    type: Term
    point: Term


@dataclass(frozen=True)
class J:
    type: Term
    base: Term
    motive: Term
    case: Term
    end: Term
    proof: Term


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class ElimEmpty:
    motive: Term
    scrutinee: Term


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class ElimUnit:
    motive: Term
    case: Term
    scrutinee: Term


@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class BZero:
    pass


@dataclass(frozen=True)
class BOne:
    pass


@dataclass(frozen=True)
class ElimBool:
    motive: Term
    zero: Term
    one: Term
    scrutinee: Term


Term = Union[Var, Global, Univ, Pi, Lam, App, Sigma, Pair, Fst, Snd, IdTy, Refl, J,
             Empty, ElimEmpty, Unit, Star, ElimUnit, Bool, BZero, BOne, ElimBool]

BINDERS = (Pi, Lam, Sigma)


def subterms(t: Term) -> Iterator[Term]:
    for name in t.__dataclass_fields__:
        v = getattr(t, name)
        if not isinstance(v, (str, int)):
            yield v


def globals_of(t: Term) -> set[str]:
    """Names of all global references occurring in ``t``."""
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Global):
            out.add(t.name)
        else:
            stack.extend(subterms(t))
    return out


def size(t: Term) -> int:
    n, stack = 0, [t]
    while stack:
        n += 1
        stack.extend(subterms(stack.pop()))
    return n
