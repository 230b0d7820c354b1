import copy

import pytest

from tslsynth.syntax import Signal, Apply, parse_formula
from tslsynth.encoding import encode
from tslsynth.ltl import ltl_lasso_holds
from tslsynth.semantics import builtin_interpretation
from tslsynth.synthesis import Limits, synthesize
from tslsynth.cfm import (Cfm, Row, CfmFormatError, mealy_to_cfm, cfm_step,
                          cfm_trace, cfm_run, verify_cfm, cfm_stats,
                          export_cfm, import_cfm)
from conftest import load_corpus


@pytest.fixture(scope="module")
def button_cfm(button, button_machine):
    _, symtab, _ = button
    return mealy_to_cfm(button_machine, symtab)


def test_button_rows(button_cfm):
    assert button_cfm.n_states == 1
    rows = button_cfm.state_rows(0)
    assert rows[-1].otherwise and rows[-1].given == ()
    clicked = [r for r in rows if dict(r.given).get("event_l_click_r_")]
    assert len(clicked) == 1
    ups = clicked[0].updates_map()
    assert ups["count"] == Apply("increment", (Signal("count"),))
    assert ups["display"] == Apply("render", (Signal("count"),))


def test_rows_cover_all_outputs(button_cfm):
    for state_rows in button_cfm.rows:
        for row in state_rows:
            assert set(dict(row.updates)) == set(button_cfm.symtab.outputs)


def test_cfm_step_picks_first_match(button_cfm):
    ups, nxt = cfm_step(button_cfm, 0, {"event_l_click_r_"})
    assert ups["count"] == Apply("increment", (Signal("count"),))
    ups, nxt = cfm_step(button_cfm, 0, set())
    assert ups["count"] == Signal("count")
    assert nxt == 0


def test_cfm_run_reads_values_before_update(button_cfm):
    interp = builtin_interpretation(input_streams={"click": [0, 1, 0, 0, 1, 0]})
    interp.predicates["event"] = lambda v: bool(v)
    _, values = cfm_run(button_cfm, interp, 6)
    assert [v["count"] for v in values] == [0, 0, 1, 1, 1, 2]


def test_cfm_trace_records_choices(button_cfm):
    interp = builtin_interpretation(input_streams={"click": [1, 0]})
    interp.predicates["event"] = lambda v: bool(v)
    _, trace = cfm_trace(button_cfm, interp, 2)
    assert trace[0]["preds"] == {"event_l_click_r_": True}
    assert trace[0]["updates"]["count"] == Apply("increment", (Signal("count"),))
    assert trace[1]["updates"]["count"] == Signal("count")


def test_verify_button_passes(button, button_cfm):
    formula, _, _ = button
    assert verify_cfm(button_cfm, formula).ok


def test_verify_mutation_yields_real_counterexample(button, button_cfm):
    formula, _, spec = button
    rows = [list(state_rows) for state_rows in button_cfm.rows]
    fixed = []
    for row in rows[0]:
        ups = dict(row.updates)
        ups["count"] = Signal("count")  # drop the increment
        fixed.append(Row(given=row.given,
                         updates=tuple(sorted(ups.items())),
                         next=row.next, otherwise=row.otherwise))
    mutated = Cfm(symtab=button_cfm.symtab, pred_ids=button_cfm.pred_ids,
                  n_states=1, init=0, rows=(tuple(fixed),))
    res = verify_cfm(mutated, formula)
    assert not res.ok
    assert res.loop
    assert not ltl_lasso_holds(spec.formula, list(res.prefix), list(res.loop))


def test_verify_larger_machines():
    for name in ("escalator-counting.tsl", "music-simple.tsl"):
        formula, symtab = load_corpus(name)
        spec = encode(formula, symtab)
        result = synthesize(spec, Limits(seconds=120))
        assert result.status == "realizable"
        cfm = mealy_to_cfm(result.machine, symtab)
        assert verify_cfm(cfm, formula).ok


def test_cfm_stats_counts_terms(button_cfm):
    stats = cfm_stats(button_cfm)
    assert stats == {"states": 1, "inputs": 1, "outputs": 2,
                     "n_predicates": 1, "n_functions": 2}


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def test_export_rows_are_flat_and_ordered(button_cfm):
    data = export_cfm(button_cfm)
    assert set(data) == {"symtab", "preds", "states", "init", "rows"}
    states_seen = [row["state"] for row in data["rows"]]
    assert states_seen == sorted(states_seen)
    last = [r for r in data["rows"] if r["state"] == 0][-1]
    assert all(v == "*" for v in last["given"].values())


def test_cfm_round_trip(button_cfm):
    back = import_cfm(export_cfm(button_cfm))
    assert back.pred_ids == button_cfm.pred_ids
    assert back.n_states == button_cfm.n_states
    assert back.rows == button_cfm.rows
    assert back.symtab.outputs == button_cfm.symtab.outputs


def test_import_requires_catch_all(button_cfm):
    data = export_cfm(button_cfm)
    data["rows"] = [r for r in data["rows"]
                    if any(v != "*" for v in r["given"].values())]
    with pytest.raises(CfmFormatError):
        import_cfm(data)


def test_import_rejects_overlapping_rows(button_cfm):
    data = export_cfm(button_cfm)
    dup = copy.deepcopy(data["rows"][0])
    data["rows"].insert(0, dup)
    with pytest.raises(CfmFormatError):
        import_cfm(data)


def test_import_rejects_missing_output(button_cfm):
    data = export_cfm(button_cfm)
    for row in data["rows"]:
        row["updates"].pop("display", None)
    with pytest.raises(CfmFormatError):
        import_cfm(data)


def test_import_rejects_bad_pred_ids(button_cfm):
    data = export_cfm(button_cfm)
    data["preds"] = ["not_a_mangled_pred"]
    for row in data["rows"]:
        row["given"] = {"not_a_mangled_pred": row["given"].get(
            "event_l_click_r_", "*")}
    with pytest.raises(CfmFormatError):
        import_cfm(data)


def test_import_rejects_unparseable_update_terms(button_cfm):
    data = export_cfm(button_cfm)
    data["rows"][0]["updates"]["count"] = "increment(("
    with pytest.raises(CfmFormatError):
        import_cfm(data)
