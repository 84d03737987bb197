import pytest
from hypothesis import given, settings, strategies as st

from tcat import syntax as s
from tcat.kernel import (
    Category, Context, Elaborator, GlobalEnv, TypeCheckError, axiom_closure,
    check_declarations, conv, evaluate, normalize, quote, to_raw,
)
from tcat.kernel import core as c
from tcat.kernel.nbe import VB0, VNeutral, VUniv, fresh
from tcat.syntax import parse_file, parse_term, print_term

PRELUDE = """
def idfun : (A : U 0) -> A -> A := fun A x => x;
def not : N2 -> N2 := fun x => elim2 (fun _ => N2) b1 b0 x;
axiom opaque : N2 -> N2;
def uses_opaque : N2 := opaque b0;
def twice : N2 := not (not b1);
"""


@pytest.fixture(scope="module")
def env():
    return check_declarations(parse_file(PRELUDE).decls)


def nf(env, src):
    return print_term(to_raw(normalize(env, parse_term(src))))


def context(env, *binders):
    """A context built from (name, type source) pairs."""
    ctx, el = Context(), Elaborator(env)
    for name, ty in binders:
        t, _ = el.check_type(ctx, parse_term(ty))
        ctx = ctx.bind(name, el.eval(ctx, t))
    return ctx


def value(env, ctx, src):
    el = Elaborator(env)
    t, _ = el.infer(ctx, parse_term(src))
    return el.eval(ctx, t)


def error_of(env, src):
    with pytest.raises(TypeCheckError) as err:
        check_declarations(parse_file(src).decls, env)
    return err.value


# ---------------------------------------------------------------- beta goldens

@pytest.mark.parametrize("src, expected", [
    ("(fun x => x : N2 -> N2) b0", "b0"),
    ("(fun x y => x : N2 -> N1 -> N2) b1 star", "b1"),
    ("fst (pair b0 star : N2 ** N1)", "b0"),
    ("snd (pair b0 star : N2 ** N1)", "star"),
    ("J N2 b0 (fun z p => N2) b1 b0 (refl N2 b0)", "b1"),
    ("elim1 (fun _ => N2) b1 star", "b1"),
    ("elim2 (fun _ => N1) star star b0", "star"),
    ("elim2 (fun _ => N2) b0 b1 b1", "b1"),
    ("elim2 (fun _ => N2) b1 b0 b1", "b0"),
], ids=["pi", "pi2", "fst", "snd", "J", "elim1", "elim2-b0", "elim2-b1", "elim2-value"])
def test_beta(env, src, expected):
    assert nf(env, src) == expected


def test_definitions_unfold(env):
    assert nf(env, "twice") == "b1"
    assert print_term(to_raw(normalize(env, "not"))) == "fun x => elim2 (fun _ => N2) b1 b0 x"


def test_axioms_stay_opaque(env):
    assert nf(env, "uses_opaque") == "opaque b0"
    assert normalize(env, "opaque") == c.Global("opaque")


def test_eval_application_of_identity():
    t = c.App(c.Lam("x", c.Var(0)), c.BZero())
    assert evaluate(GlobalEnv(), (), t) == VB0()


def test_eval_stuck_application():
    v = evaluate(GlobalEnv(), (fresh(0),), c.App(c.Var(0), c.Star()))
    assert isinstance(v, VNeutral)
    assert quote(1, v) == c.App(c.Var(0), c.Star())


def test_quote_variable():
    assert quote(1, fresh(0)) == c.Var(0)
    assert quote(0, VB0()) == c.BZero()


@pytest.mark.parametrize("src", [
    "fun x => elim2 (fun _ => N2) b0 b1 x",
    "fun x => elim1 (fun _ => N2) b0 x",
    "fun x => elim0 (fun _ => N2) x",
    "fun p => J N2 b0 (fun z q => N2) b1 b0 p",
    "fun p => fst p",
])
def test_eliminators_stuck_on_neutrals(env, src):
    types = {"elim2": "N2 -> N2", "elim1": "N1 -> N2", "elim0": "N0 -> N2",
             "J N2": "Id N2 b0 b0 -> N2", "fst": "N2 ** N1 -> N2"}
    ty = next(v for k, v in types.items() if k in src)
    out = nf(env, f"({src} : {ty})")
    assert out == print_term(parse_term(src))


# ---------------------------------------------------------------- conversion

def test_conv_beta(env):
    ctx = Context()
    assert conv(0, value(env, ctx, "(fun x => x : N2 -> N2) b0"), value(env, ctx, "b0"))


def test_eta_pi(env):
    ctx = context(env, ("f", "N2 -> N2"))
    f = value(env, ctx, "f")
    eta = value(env, ctx, "(fun x => f x : N2 -> N2)")
    assert conv(ctx.depth, f, eta) and conv(ctx.depth, eta, f)


def test_eta_sigma(env):
    ctx = context(env, ("p", "N2 ** N1"))
    p = value(env, ctx, "p")
    eta = value(env, ctx, "(pair (fst p) (snd p) : N2 ** N1)")
    assert conv(ctx.depth, p, eta) and conv(ctx.depth, eta, p)


def test_eta_is_not_applied_by_normalize(env):
    assert nf(env, "(fun f => fun x => f x : (N2 -> N2) -> N2 -> N2)") == "fun f x => f x"


def test_distinct_identity_proofs_not_convertible(env):
    ctx = context(env, ("p", "Id N2 b0 b0"), ("q", "Id N2 b0 b0"))
    p, q = value(env, ctx, "p"), value(env, ctx, "q")
    assert not conv(ctx.depth, p, q)
    assert conv(ctx.depth, p, p)
    assert not conv(ctx.depth, p, value(env, ctx, "refl N2 b0"))


def test_no_definitional_uip(env):
    err = error_of(env, "def k : (p q : Id N2 b0 b0) -> Id (Id N2 b0 b0) p q "
                        ":= fun p q => refl (Id N2 b0 b0) p;")
    assert err.category is Category.IdEndpointMismatch


def test_distinct_axioms_not_convertible():
    env = check_declarations(parse_file("axiom a : N2; axiom b : N2;").decls)
    assert not conv(0, value(env, Context(), "a"), value(env, Context(), "b"))


def test_definitions_unfold_in_conversion(env):
    ctx = Context()
    assert conv(0, value(env, ctx, "twice"), value(env, ctx, "b1"))
    assert not conv(0, value(env, ctx, "twice"), value(env, ctx, "b0"))


# ---------------------------------------------------------------- typing

def test_infer_universe(env):
    t, ty = Elaborator(env).infer(Context(), parse_term("U 0"))
    assert t == c.Univ(0) and ty == VUniv(1)


@pytest.mark.parametrize("src, level", [
    ("(A : U 1) -> U 0", 2),
    ("(A : U 0) -> A", 1),
    ("N2 ** U 0", 1),
    ("N2 -> N2", 0),
    ("Id (U 0) N2 N2", 1),
])
def test_formation_levels(env, src, level):
    _, ty = Elaborator(env).infer(Context(), parse_term(src))
    assert ty == VUniv(level)


def test_cumulativity(env):
    check_declarations(parse_file("def t : U 2 := U 0; def f : U 1 -> U 2 := fun A => A;").decls, env)


def test_universe_not_in_itself(env):
    assert error_of(env, "def bad : U 0 := U 0;").category is Category.UniverseError


def test_infer_refl(env):
    _, ty = Elaborator(env).infer(Context(), parse_term("refl N2 b0"))
    assert print_term(to_raw(quote(0, ty))) == "Id N2 b0 b0"


def test_bare_lambda_not_inferable(env):
    with pytest.raises(TypeCheckError) as err:
        Elaborator(env).infer(Context(), parse_term("fun x => x"))
    assert err.value.category is Category.ExpectedType


def test_check_polymorphic_identity(env):
    check_declarations(parse_file("def i2 : (A : U 0) -> A -> A := fun A x => x;").decls, env)


def test_lambda_against_non_function(env):
    assert error_of(env, "def bad : N2 := fun x => x;").category is Category.NotAFunction


def test_mismatch_reports_printed_types(env):
    err = error_of(env, "def broken : N1 := b0;")
    assert err.category is Category.TypeMismatch
    assert (err.expected, err.actual) == ("N1", "N2")


def test_star_is_not_a_boolean(env):
    assert error_of(env, "def broken : N2 := star;").category is Category.TypeMismatch


def test_duplicate_name(env):
    assert error_of(env, "def idfun : N2 := b0;").category is Category.DuplicateName


def test_j_motive_arity(env):
    err = error_of(env, "def bad : N2 := J N2 b0 (fun z => N2) b1 b0 (refl N2 b0);")
    assert err.category is Category.TypeMismatch
    assert "motive" in err.message


def test_error_spans_point_at_subterm(env):
    err = error_of(env, "def bad : N2 -> N2 :=\n  fun x => not (not star);")
    assert (err.span.start_line, err.span.start_col) == (2, 21)


# ---------------------------------------------------------------- axiom closures

def test_axiom_closures(env):
    assert axiom_closure(env, "idfun") == frozenset()
    assert axiom_closure(env, "opaque") == {"opaque"}
    assert axiom_closure(env, "uses_opaque") == {"opaque"}
    assert axiom_closure(env, "uses_opaque") == axiom_closure(env, "uses_opaque")


def test_axiom_closure_unbound(env):
    with pytest.raises(TypeCheckError) as err:
        axiom_closure(env, "nowhere")
    assert err.value.category is Category.UnboundName


def test_closure_through_types_only():
    env = check_declarations(parse_file(
        "axiom T : U 0; def f : T -> T := fun x => x;").decls)
    assert axiom_closure(env, "f") == {"T"}


def test_closure_monotone_over_corpus(genv):
    for d in genv:
        refs = c.globals_of(d.type) | (c.globals_of(d.body) if d.body is not None else set())
        for r in refs:
            assert genv[r].axiom_closure <= d.axiom_closure, (d.name, r)


# ---------------------------------------------------------------- corpus-wide properties

def test_normalize_idempotent_on_corpus(genv, normal_forms):
    for name, t in normal_forms.items():
        assert quote(0, evaluate(genv, (), t), unfold=True) == t, name


def test_normal_forms_recheck(genv, normal_forms):
    # The largest normal forms (the choice construction) take minutes to
    # print, reparse and re-elaborate; they are covered by idempotence above.
    checked = 0
    for name, t in normal_forms.items():
        if c.size(t) > 60000:
            continue
        d = genv[name]
        raw = parse_term(print_term(to_raw(t)))
        again = normalize(genv, s.Ann(raw, to_raw(d.type)))
        assert again == t, name
        checked += 1
    assert checked >= len(normal_forms) - 6


def test_corpus_types_convert_with_themselves(genv):
    for d in genv:
        v = evaluate(genv, (), d.type)
        assert conv(0, v, v), d.name


def test_normal_forms_are_beta_normal(normal_forms):
    def redex(t):
        match t:
            case c.App(c.Lam(), _) | c.Fst(c.Pair()) | c.Snd(c.Pair()):
                return True
            case c.J(_, _, _, _, _, c.Refl()) | c.ElimUnit(_, _, c.Star()):
                return True
            case c.ElimBool(_, _, _, c.BZero() | c.BOne()):
                return True
        return any(redex(u) for u in c.subterms(t))
    for name, t in normal_forms.items():
        if c.size(t) < 60000:
            assert not redex(t), name


# ---------------------------------------------------------------- generated terms

def bool_terms():
    base = st.sampled_from(["b0", "b1", "x"])
    return st.recursive(
        base,
        lambda sub: st.one_of(
            st.builds(lambda a, b, t: f"elim2 (fun _ => N2) ({a}) ({b}) ({t})", sub, sub, sub),
            st.builds(lambda a: f"(fun y => y : N2 -> N2) ({a})", sub),
            st.builds(lambda a, b: f"fst (pair ({a}) ({b}) : N2 ** N2)", sub, sub),
            st.builds(lambda a: f"not ({a})", sub),
        ),
        max_leaves=8)


@settings(max_examples=60, deadline=None)
@given(bool_terms(), bool_terms(), bool_terms())
def test_conv_is_an_equivalence(env, a, b, c_):
    ctx = context(env, ("x", "N2"))
    va, vb, vc = (value(env, ctx, f"({t} : N2)") for t in (a, b, c_))
    d = ctx.depth
    assert conv(d, va, va)
    assert conv(d, va, vb) == conv(d, vb, va)
    if conv(d, va, vb) and conv(d, vb, vc):
        assert conv(d, va, vc)
    same = quote(d, va, unfold=True) == quote(d, vb, unfold=True)
    assert conv(d, va, vb) == same


@settings(max_examples=60, deadline=None)
@given(bool_terms())
def test_quote_eval_idempotent(env, t):
    ctx = context(env, ("x", "N2"))
    once = quote(1, value(env, ctx, f"({t} : N2)"), unfold=True)
    twice = quote(1, evaluate(env, (fresh(0),), once), unfold=True)
    assert once == twice
