import pytest
from hypothesis import given, settings

from tslsynth.syntax import Signal, Apply, Pred, Update, Not, And, Globally, parse_formula
from tslsynth.semantics import (LassoComputation, FiniteComputation, Opaque,
                                Token, Interpretation, MissingInterpretation,
                                HorizonExceeded, eval_term, eval_value,
                                builtin_interpretation, tsl_holds)

from strategies import computations

INC = Apply("increment", (Signal("count"),))
KEEP = Signal("count")


def lasso(prefix, loop):
    return LassoComputation(tuple(prefix), tuple(loop))


def test_lasso_requires_nonempty_loop():
    with pytest.raises(ValueError):
        lasso([], [])


def test_lasso_requires_uniform_outputs():
    with pytest.raises(ValueError):
        lasso([{"count": KEEP}], [{"other": KEEP}])


def test_eval_term_unfolds_to_inits_and_inputs():
    comp = lasso([], [{"count": INC}])
    t0 = eval_term(comp, 0, Signal("count"))
    assert t0 == Apply("init", (Signal("count"),))
    t2 = eval_term(comp, 2, Signal("count"))
    assert t2 == Apply("increment", (Apply("increment", (t0,)),))


def test_eval_term_keeps_input_leaves():
    comp = lasso([], [{"count": Apply("f", (Signal("click"),))}])
    t1 = eval_term(comp, 1, Signal("count"))
    assert t1 == Apply("f", (Signal("click"),))


def test_eval_value_increment_chain():
    comp = lasso([], [{"count": INC}])
    interp = builtin_interpretation()
    vals = [eval_value(comp, t, Signal("count"), interp) for t in range(4)]
    assert vals == [0, 1, 2, 3]


def test_eval_value_reads_input_stream_at_use_time():
    comp = lasso([], [{"count": Apply("add", (Signal("count"), Signal("x")))}])
    interp = builtin_interpretation(input_streams={"x": [5, 7, 100]})
    # count at t reads x at every earlier step once
    assert eval_value(comp, 2, Signal("count"), interp) == 12


def test_input_stream_forms():
    interp = builtin_interpretation(input_streams={
        "cyc": [1, 2],
        "pair": ([9], [3, 4]),
        "fn": lambda t: t * t,
    })
    assert [interp.input_at("cyc", t) for t in range(4)] == [1, 2, 1, 2]
    assert [interp.input_at("pair", t) for t in range(4)] == [9, 3, 4, 3]
    assert interp.input_at("fn", 5) == 25
    with pytest.raises(MissingInterpretation):
        interp.input_at("absent", 0)


def test_builtin_fallbacks_are_stable():
    interp = builtin_interpretation()
    f = interp.functions.get("mystery")
    assert f() == Token("mystery")
    assert f(1, 2) == Opaque("mystery", (1, 2))
    p = interp.predicates.get("oracle")
    assert p(3) == p(3)
    assert isinstance(p(3), bool)


def test_partial_interpretation_raises():
    interp = builtin_interpretation(total=False)
    with pytest.raises(MissingInterpretation):
        interp.function("mystery", 1)


def test_tsl_holds_update_atom():
    comp = lasso([{"count": KEEP}], [{"count": INC}])
    assert not tsl_holds(Update("count", INC), comp)
    assert tsl_holds(parse_formula("X [count <- increment(count)]"), comp)
    assert tsl_holds(parse_formula("G X [count <- increment(count)]"), comp)


def test_tsl_holds_predicates_through_interpretation():
    comp = lasso([], [{"count": INC}])
    interp = builtin_interpretation()
    assert tsl_holds(parse_formula("eq0(count)"), comp, interp)
    assert not tsl_holds(parse_formula("X eq0(count)"), comp, interp)


def test_tsl_holds_safe_vs_strict_horizon():
    # eventually eq0 never resolves on a strictly increasing counter
    comp = lasso([], [{"count": INC}])
    interp = builtin_interpretation(inits={"count": 1})
    f = parse_formula("F eq0(count)")
    assert tsl_holds(f, comp, interp, mode="safe") is False
    with pytest.raises(HorizonExceeded):
        tsl_holds(f, comp, interp, mode="strict")


def test_tsl_holds_rejects_unknown_mode():
    comp = lasso([], [{"count": KEEP}])
    with pytest.raises(ValueError):
        tsl_holds(Update("count", KEEP), comp, mode="both")


@given(computations())
@settings(max_examples=80, deadline=None)
def test_globally_update_matches_every_step(steps):
    prefix, loop = steps
    comp = lasso(prefix, loop)
    atom = Update("s0", Apply("c0", ()))
    want = all(step["s0"] == atom.term for step in list(prefix) + list(loop))
    assert tsl_holds(Globally(atom), comp) == want


@given(computations())
@settings(max_examples=80, deadline=None)
def test_negation_is_complement(steps):
    prefix, loop = steps
    comp = lasso(prefix, loop)
    atom = Update("s1", Signal("s1"))
    f = Globally(atom)
    assert tsl_holds(Not(f), comp) == (not tsl_holds(f, comp))


def test_finite_computation_grows():
    comp = FiniteComputation(frozenset({"count"}))
    comp.steps.append({"count": INC})
    assert eval_term(comp, 1, Signal("count")) == Apply(
        "increment", (Apply("init", (Signal("count"),)),))
