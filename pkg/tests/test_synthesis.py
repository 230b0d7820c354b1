import warnings

import pytest

from tslsynth.syntax import parse_formula
from tslsynth.encoding import encode, ExactlyOneViolation
from tslsynth.ltl import lnot, lap, lglobally, lfinally, land, limplies, lnext
from tslsynth.automata import ltl_to_nba, bounded_determinize
from tslsynth.synthesis import (Limits, MealyMachine, synthesize,
                                check_unrealizable, solve_safety_game,
                                minimize_mealy, reduce_mealy, export_mealy,
                                import_mealy, machine_lasso_word,
                                MealyFormatError, TotalityError,
                                _violation_reachable)
from conftest import load_corpus


def synth(text, **kw):
    spec = encode(parse_formula(text))
    return spec, synthesize(spec, Limits(**kw) if kw else Limits(seconds=60))


def test_button_machine_is_single_state(button_machine):
    assert button_machine.n_states == 1
    assert button_machine.init == 0


def test_conflicting_updates_unrealizable():
    _, result = synth("G ([x <- a()] && [x <- b()])")
    assert result.status == "unrealizable"
    assert result.k == 0
    assert result.witness is not None


def test_eventual_switch_needs_two_states():
    _, result = synth("[x <- a()] && X G [x <- b()]")
    assert result.status == "realizable"
    assert result.machine.n_states == 2


def test_unknown_on_exhausted_budget():
    spec = encode(parse_formula("G ([x <- a()] || [x <- b()])"))
    result = synthesize(spec, Limits(max_k=0, seconds=0))
    assert result.status == "unknown"
    assert "k=0" in result.reason


def test_realizable_and_env_side_agree():
    formula, symtab = load_corpus("frpzoo0.tsl")
    spec = encode(formula, symtab)
    assert synthesize(spec, Limits(seconds=60)).status == "realizable"
    env = check_unrealizable(spec, Limits(max_k=1, seconds=60))
    assert env.status != "unrealizable"


def test_unrealizable_side_finds_witness():
    formula, symtab = load_corpus("frpzoo0-noassume.tsl")
    spec = encode(formula, symtab)
    result = synthesize(spec, Limits(seconds=60))
    assert result.status == "unrealizable"
    moves = result.witness.emit(result.witness.init)
    assert moves <= set(spec.inputs)


# ---------------------------------------------------------------------------
# Public safety game
# ---------------------------------------------------------------------------

def test_solve_safety_game_partition_checked():
    nba = ltl_to_nba(lglobally(lap("a")), ("a", "b"))
    aut = bounded_determinize(nba, 0)
    with pytest.raises(ValueError):
        solve_safety_game(aut, ("a",), ("a", "b"))
    with pytest.raises(ValueError):
        solve_safety_game(aut, ("a",), ())


def test_solve_safety_game_winnable():
    # avoid ever violating G(req -> grant): the system controls grant
    objective = lglobally(limplies(lap("req"), lap("grant")))
    aut = bounded_determinize(ltl_to_nba(lnot(objective), ("req", "grant")), 0)
    machine = solve_safety_game(aut, ("req",), ("grant",))
    assert machine is not None
    word_p, word_l = machine_lasso_word(machine, [{"req"}], [{"req"}, set()])
    from tslsynth.ltl import ltl_lasso_holds
    assert ltl_lasso_holds(objective, word_p, word_l)


def test_solve_safety_game_lost():
    # the environment can always pick the target the system must miss
    objective = lglobally(land(lap("a"), lnot(lap("a"))))
    aut = bounded_determinize(ltl_to_nba(lnot(objective), ("i", "a")), 0)
    assert solve_safety_game(aut, ("i",), ("a",)) is None


# ---------------------------------------------------------------------------
# Machine operations
# ---------------------------------------------------------------------------

def two_state_redundant():
    # both states behave identically; state 1 is a copy of state 0
    transitions = {}
    for q in (0, 1):
        transitions[(q, 0)] = (1, 1 - q)
        transitions[(q, 1)] = (2, 1 - q)
    return MealyMachine(inputs=("i",), outputs=("x", "y"), n_states=2,
                        init=0, transitions=transitions)


def test_minimize_collapses_copies():
    m = minimize_mealy(two_state_redundant())
    assert m.n_states == 1


def test_minimize_idempotent(button_machine):
    once = minimize_mealy(button_machine)
    twice = minimize_mealy(once)
    assert once.transitions == twice.transitions


def test_minimize_preserves_words(button_machine):
    m = minimize_mealy(button_machine)
    ins = [{"event_l_click_r_"}, set(), {"event_l_click_r_"}]
    assert machine_lasso_word(button_machine, ins[:1], ins[1:]) == \
        machine_lasso_word(m, ins[:1], ins[1:])


def test_reduce_mealy_merges_when_language_allows():
    # objective: always emit x; a two-state round-robin that always emits x
    # collapses to one state
    objective = lglobally(lap("x"))
    avoid = ltl_to_nba(lnot(objective), ("i", "x"))
    transitions = {(q, im): (1, 1 - q) for q in (0, 1) for im in (0, 1)}
    m = MealyMachine(inputs=("i",), outputs=("x",), n_states=2, init=0,
                     transitions=transitions)
    r = reduce_mealy(m, avoid)
    assert r.n_states == 1
    assert not _violation_reachable(r, avoid)


def test_reduce_mealy_keeps_needed_states():
    # emit x at even steps and y at odd steps: two states are required
    objective = lglobally(land(limplies(lap("x"), lnext(lap("y"))),
                               limplies(lap("y"), lnext(lap("x")))))
    avoid = ltl_to_nba(lnot(objective), ("i", "x", "y"))
    transitions = {(0, im): (0b01, 1) for im in (0, 1)}
    transitions.update({(1, im): (0b10, 0) for im in (0, 1)})
    m = MealyMachine(inputs=("i",), outputs=("x", "y"), n_states=2, init=0,
                     transitions=transitions)
    assert not _violation_reachable(m, avoid)
    r = reduce_mealy(m, avoid)
    assert r.n_states == 2


def test_violation_reachable_detects_bad_machine():
    objective = lglobally(lap("x"))
    avoid = ltl_to_nba(lnot(objective), ("i", "x"))
    transitions = {(0, im): (0, 0) for im in (0, 1)}  # never emits x
    m = MealyMachine(inputs=("i",), outputs=("x",), n_states=1, init=0,
                     transitions=transitions)
    assert _violation_reachable(m, avoid)


def test_machine_lasso_word_is_periodic(button_machine):
    pre, loop = machine_lasso_word(button_machine, [],
                                   [{"event_l_click_r_"}, set()])
    assert loop
    assert all(isinstance(letter, frozenset) for letter in pre + loop)


def test_machine_lasso_word_rejects_empty_loop(button_machine):
    with pytest.raises(ValueError):
        machine_lasso_word(button_machine, [set()], [])


# ---------------------------------------------------------------------------
# JSON round trip and validation
# ---------------------------------------------------------------------------

def test_mealy_round_trip(button_machine):
    data = export_mealy(button_machine)
    back = import_mealy(data)
    assert back.inputs == button_machine.inputs
    assert back.outputs == button_machine.outputs
    assert back.transitions == button_machine.transitions


def test_import_rejects_partial_table(button_machine):
    data = export_mealy(button_machine)
    data["transitions"] = [r for r in data["transitions"]
                           if r["given"].get("event_l_click_r_") is not True]
    with pytest.raises(TotalityError):
        import_mealy(data)
    with pytest.raises(MealyFormatError):
        import_mealy(data)  # TotalityError specializes the format error


def test_import_rejects_overlapping_guards(button_machine):
    data = export_mealy(button_machine)
    rows = data["transitions"]
    rows.append(dict(rows[0]))
    with pytest.raises(MealyFormatError):
        import_mealy(data)


def test_import_checks_exactly_one_update(button_machine):
    data = export_mealy(button_machine)
    for row in data["transitions"]:
        row["emit"] = [p for p in row["emit"] if not p.startswith("u_count")]
    with pytest.raises(ExactlyOneViolation):
        import_mealy(data)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        machine = import_mealy(data, permissive=True)
    assert machine.n_states == button_machine.n_states
    assert any("update" in str(w.message) for w in caught)


def test_import_skips_update_check_for_bare_props():
    data = {"inputs": ["i"], "outputs": ["o"], "states": 1, "init": 0,
            "transitions": [
                {"from": 0, "given": {}, "emit": [], "to": 0}]}
    machine = import_mealy(data)
    assert machine.transitions[(0, 0)] == (0, 0)
    assert machine.transitions[(0, 1)] == (0, 0)


def test_import_rejects_bad_shapes():
    with pytest.raises(MealyFormatError):
        import_mealy({"inputs": [], "outputs": []})
    with pytest.raises(MealyFormatError):
        import_mealy({"inputs": ["i"], "outputs": ["o"], "states": 0,
                      "init": 0, "transitions": []})
    with pytest.raises(MealyFormatError):
        import_mealy({"inputs": ["i"], "outputs": ["i"], "states": 1,
                      "init": 0, "transitions": []})
