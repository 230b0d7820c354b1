import pytest
from hypothesis import given, settings

from tslsynth.ltl import (lap, lnot, land, lglobally, lfinally, luntil,
                          ltl_lasso_holds, LFF)
from tslsynth.automata import (ltl_to_nba, nba_accepts_lasso,
                               bounded_determinize, SINK)

from strategies import ltl_formulas, lassos

A, B = lap("a"), lap("b")
PROPS = ("a", "b", "c")


def run_counting(aut, prefix, loop, rounds=3):
    """Drive the counting automaton around the lasso; True iff sink-free."""
    state = aut.initial
    for letter in list(prefix) + list(loop) * rounds:
        if state is SINK:
            return False
        state = aut.step(state, aut.nba.mask(letter))
    return state is not SINK


def test_globally_two_states():
    # the pre-initial node consumes the first letter, then one body state
    nba = ltl_to_nba(lglobally(A), PROPS)
    assert nba.n_states == 2
    assert len(nba.initial) == 1
    assert nba_accepts_lasso(nba, [], [{"a"}])
    assert not nba_accepts_lasso(nba, [], [{"a"}, set()])


def test_finally_requires_witness():
    nba = ltl_to_nba(lfinally(A), PROPS)
    assert nba_accepts_lasso(nba, [set(), {"a"}], [set()])
    assert not nba_accepts_lasso(nba, [], [set()])


def test_false_formula_empty_language():
    nba = ltl_to_nba(LFF, PROPS)
    assert nba.accepting == frozenset()
    assert not nba_accepts_lasso(nba, [], [set()])


def test_until_needs_left_until_right():
    nba = ltl_to_nba(luntil(A, B), PROPS)
    assert nba_accepts_lasso(nba, [{"a"}, {"a", "b"}], [set()])
    assert not nba_accepts_lasso(nba, [{"a"}, set()], [{"b"}])


def test_prop_limit_guard():
    with pytest.raises(ValueError):
        ltl_to_nba(A, tuple("p%d" % i for i in range(25)))


def test_unknown_prop_rejected():
    with pytest.raises(ValueError):
        ltl_to_nba(lap("zz"), PROPS)


@given(ltl_formulas(max_depth=3), lassos())
@settings(max_examples=300, deadline=None)
def test_membership_matches_lasso_oracle(f, lasso):
    prefix, loop = lasso
    nba = ltl_to_nba(f, PROPS)
    assert nba_accepts_lasso(nba, prefix, loop) == ltl_lasso_holds(f, prefix, loop)


def test_counting_automaton_monotone_in_k():
    # a word kept safe at bound k stays safe at k+1
    nba = ltl_to_nba(lglobally(lfinally(A)), PROPS)
    word = ([], [{"a"}, set()])
    results = [run_counting(bounded_determinize(nba, k), *word) for k in (0, 1, 2, 3)]
    for earlier, later in zip(results, results[1:]):
        assert (not earlier) or later


def test_counting_automaton_sink_absorbs():
    # staying sink-free in NBA(!(G a)) means no violation of G a yet
    nba = ltl_to_nba(lnot(lglobally(A)), PROPS)
    aut = bounded_determinize(nba, 0)
    state = aut.initial
    for _ in range(3):
        state = aut.step(state, aut.nba.mask({"a"}))
        assert state is not SINK
    assert aut.step(state, aut.nba.mask(set())) is SINK
    assert aut.step(SINK, 0) is SINK


def test_counting_rejects_negative_bound():
    nba = ltl_to_nba(A, PROPS)
    with pytest.raises(ValueError):
        bounded_determinize(nba, -1)


def test_empty_counting_state_is_safe_forever():
    # once every run dies the safety automaton stays out of the sink
    nba = ltl_to_nba(land(A, lglobally(lnot(A))), PROPS)
    aut = bounded_determinize(nba, 4)
    state = aut.initial
    for letter in ({"a"}, {"a"}, set(), {"a"}):
        state = aut.step(state, aut.nba.mask(letter))
        assert state is not SINK


@given(ltl_formulas(max_depth=3))
@settings(max_examples=60, deadline=None)
def test_negation_splits_every_lasso(f):
    nba_pos = ltl_to_nba(f, PROPS)
    nba_neg = ltl_to_nba(lnot(f), PROPS)
    for lasso in ([[], [set()]], [[{"a"}], [{"b"}, {"a", "c"}]]):
        prefix, loop = lasso
        assert nba_accepts_lasso(nba_pos, prefix, loop) != \
            nba_accepts_lasso(nba_neg, prefix, loop)
