"""Shared hypothesis strategies for formulas, terms, and lassos.

The generated name pools are deliberately small so that random formulas
collide on signals and predicates often enough to exercise interesting
structure, while keeping every sample kind-consistent: i* names are input
signals, s* names output signals, f*/g* functions, p*/q* predicates.
"""

import hypothesis.strategies as st

from tslsynth.syntax import (Signal, Apply, Const, Pred, Update, Not, And, Or,
                             Implies, Iff, Next, Until, Release, Finally_,
                             Globally, WeakUntil, AsSoonAs)
from tslsynth.ltl import (lap, lnot, land, lor, lnext, luntil, lrelease,
                          lglobally, lfinally)

INPUTS = ("i0", "i1")
OUTPUTS = ("s0", "s1")
LTL_PROPS = ("a", "b", "c")


def signals():
    return st.sampled_from(INPUTS + OUTPUTS).map(Signal)


def terms(max_depth=2):
    def extend(children):
        unary = st.builds(lambda a: Apply("f", (a,)), children)
        binary = st.builds(lambda a, b: Apply("g", (a, b)), children, children)
        return st.one_of(unary, binary)
    return st.recursive(
        st.one_of(signals(), st.just(Apply("c0", ()))),
        extend, max_leaves=max_depth + 2)


def update_atoms():
    return st.builds(Update, st.sampled_from(OUTPUTS), terms())


def pred_atoms():
    nullary = st.just(Pred("q", ()))
    unary = st.builds(lambda a: Pred("p", (a,)), terms())
    return st.one_of(nullary, unary)


def tsl_atoms():
    return st.one_of(update_atoms(), pred_atoms(),
                     st.sampled_from([Const(True), Const(False)]))


def tsl_formulas(max_depth=3):
    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(Next, children),
            st.builds(Globally, children),
            st.builds(Finally_, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
            st.builds(Iff, children, children),
            st.builds(Until, children, children),
            st.builds(Release, children, children),
            st.builds(WeakUntil, children, children),
            st.builds(AsSoonAs, children, children),
        )
    return st.recursive(tsl_atoms(), extend, max_leaves=2 ** max_depth)


def ltl_formulas(max_depth=4, props=LTL_PROPS):
    atom = st.sampled_from(props).map(lap)

    def extend(children):
        return st.one_of(
            st.builds(lnot, children),
            st.builds(lnext, children),
            st.builds(lglobally, children),
            st.builds(lfinally, children),
            st.builds(land, children, children),
            st.builds(lor, children, children),
            st.builds(luntil, children, children),
            st.builds(lrelease, children, children),
        )
    return st.recursive(atom, extend, max_leaves=2 ** max_depth)


def letters(props=LTL_PROPS):
    return st.frozensets(st.sampled_from(props))


def lassos(props=LTL_PROPS, max_prefix=3, max_loop=4):
    return st.tuples(
        st.lists(letters(props), max_size=max_prefix),
        st.lists(letters(props), min_size=1, max_size=max_loop))


def computations(max_prefix=2, max_loop=3):
    """Lasso computations assigning both output signals each step."""
    pool = [Signal("s0"), Signal("s1"), Apply("c0", ()),
            Apply("f", (Signal("s0"),)), Apply("f", (Signal("i0"),))]
    step = st.fixed_dictionaries({s: st.sampled_from(pool) for s in OUTPUTS})
    return st.tuples(
        st.lists(step, max_size=max_prefix),
        st.lists(step, min_size=1, max_size=max_loop))
