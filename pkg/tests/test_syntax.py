import pytest
from hypothesis import given, settings

from tslsynth.syntax import (ParseError, KindConflict, ArityConflict, Signal,
                             Apply, Const, Pred, Update, Not, And, Or, Next,
                             Until, Globally, WeakUntil, AsSoonAs, parse_formula,
                             parse_term, parse_spec, classify, desugar,
                             subformula_count, pretty, pretty_term, atoms_of)

from strategies import tsl_formulas, terms

CORE_TYPES = (Const, Pred, Update, Not, And, Next, Until)


def test_parse_update_atom():
    f = parse_formula("[count <- increment(count)]")
    assert f == Update("count", Apply("increment", (Signal("count"),)))


def test_parse_predicate_atom():
    f = parse_formula("eq(steps, moveup())")
    assert f == Pred("eq", (Signal("steps"), Apply("moveup", ())))


def test_parse_precedence():
    f = parse_formula("a() && b() || c()")
    assert isinstance(f, Or) and isinstance(f.left, And)
    g = parse_formula("G p(x) -> q(x) U r(x)")
    # implication binds loosest, until tighter than it
    assert g.__class__.__name__ == "Implies"
    assert isinstance(g.right, Until)


def test_parse_spec_sections():
    text = """
    assume {
        G !p(x) ;
    }
    guarantee {
        G [y <- f(x)] ;
    }
    """
    formula, symtab = parse_spec(text)
    assert formula.__class__.__name__ == "Implies"
    assert symtab.inputs == ("x",)
    assert symtab.outputs == ("y",)


def test_parse_spec_bare_formula():
    formula, symtab = parse_spec("G [y <- f(x)]")
    assert isinstance(formula, Globally)
    assert symtab.outputs == ("y",)


@pytest.mark.parametrize("bad", [
    "[x <- ]",
    "(p(x)",
    "p(x) &&",
    "[x <- y] y",
    "G",
])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_formula(bad)


def test_classify_kind_conflict():
    with pytest.raises(KindConflict):
        classify(parse_formula("p(x) && [p <- f(x)]"))


def test_classify_arity_conflict():
    with pytest.raises(ArityConflict):
        classify(parse_formula("p(f(x), y) && p(x)"))


def test_classify_button(button):
    _, symtab, _ = button
    assert symtab.inputs == ("click",)
    assert symtab.outputs == ("count", "display")
    assert symtab.functions == {"increment": 1, "render": 1}
    assert symtab.predicates == {"event": 1}


@given(tsl_formulas())
@settings(max_examples=150, deadline=None)
def test_pretty_parse_round_trip(f):
    assert parse_formula(pretty(f)) == f


@given(terms())
@settings(max_examples=100, deadline=None)
def test_pretty_term_round_trip(t):
    assert parse_term(pretty_term(t)) == t


@given(tsl_formulas())
@settings(max_examples=150, deadline=None)
def test_desugar_reaches_core(f):
    def walk(g):
        assert isinstance(g, CORE_TYPES), g
        for attr in ("child", "left", "right"):
            kid = getattr(g, attr, None)
            if kid is not None:
                walk(kid)
    walk(desugar(f))


def test_desugar_as_soon_as():
    # phi A psi waits while !psi, then requires phi at the first psi
    phi, psi = Pred("p", ()), Pred("q", ())
    assert desugar(AsSoonAs(phi, psi)) == desugar(WeakUntil(Not(psi),
                                                            And(psi, phi)))


def test_desugar_fixes_core_formulas():
    f = parse_formula("p(x) U [y <- f(x)]")
    assert desugar(f) == f


@given(tsl_formulas())
@settings(max_examples=100, deadline=None)
def test_subformula_count_positive(f):
    n = subformula_count(f)
    assert n >= 1
    assert subformula_count(Next(f)) == n + 1


def test_atoms_of_collects_both_kinds():
    f = parse_formula("p(x) && [y <- f(x)] && p(y)")
    kinds = {type(a) for a in atoms_of(f)}
    assert kinds == {Pred, Update}
