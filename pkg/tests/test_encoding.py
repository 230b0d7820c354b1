import pytest
from hypothesis import given, settings

from tslsynth.syntax import (Signal, Apply, Pred, Update, Globally, And,
                             parse_formula, classify, pretty)
from tslsynth.encoding import (encode, term_prop, unmangle, purity_assumptions,
                               export_tlsf, NoOutputs, MangleCollision,
                               TlsfNameCollision)
from tslsynth.ltl import ltl_pretty

from strategies import update_atoms, pred_atoms


@given(update_atoms())
@settings(max_examples=100, deadline=None)
def test_update_prop_round_trip(atom):
    assert unmangle(term_prop(atom)) == atom


@given(pred_atoms())
@settings(max_examples=100, deadline=None)
def test_pred_prop_round_trip(atom):
    assert unmangle(term_prop(atom)) == atom


def test_unmangle_rejects_bare_names():
    with pytest.raises(ValueError):
        unmangle("c0")


def test_prop_ids_are_identifiers():
    pid = term_prop(Update("count", Apply("increment", (Signal("count"),))))
    assert pid.replace("_", "").isalnum()
    assert pid == "u_count_eq_increment_l_count_r_"


def test_encode_button_interface(button):
    _, _, spec = button
    assert spec.inputs == ("event_l_click_r_",)
    assert set(spec.outputs) == {
        "u_count_eq_increment_l_count_r_", "u_count_eq_count",
        "u_display_eq_render_l_count_r_", "u_display_eq_display"}
    assert spec.group_signals == ("count", "display")


def test_encode_groups_put_self_update_last(button):
    _, _, spec = button
    for signal, group in zip(spec.group_signals, spec.groups):
        assert group[-1] == term_prop(Update(signal, Signal(signal)))
        assert len(set(group)) == len(group)


def test_encode_core_omits_exactly_one(button):
    _, _, spec = button
    core, full = ltl_pretty(spec.core), ltl_pretty(spec.formula)
    assert core in full and core != full
    # the added conjunct mentions the self updates the core never uses
    assert "u_count_eq_count" in full
    assert "u_count_eq_count" not in core


def test_encode_no_outputs():
    f = parse_formula("G p(x)")
    with pytest.raises(NoOutputs):
        encode(f)
    spec = encode(f, allow_no_outputs=True)
    assert spec.outputs == () and spec.groups is None


def test_encode_props_partition(button):
    _, _, spec = button
    assert set(spec.props) == set(spec.inputs) | set(spec.outputs)
    assert not set(spec.inputs) & set(spec.outputs)


def test_encode_distinct_terms_get_distinct_props():
    f = parse_formula("G ([y <- f(x)] || [y <- f(f(x))])")
    spec = encode(f)
    assert len(spec.outputs) == 3  # two applied updates plus the self update


def test_purity_assumptions_shape():
    st = classify(parse_formula("p(X()) -> X p(X())"))
    pure = purity_assumptions(st)
    assert isinstance(pure, And)
    # both polarities of the stability schema appear
    text = pretty(pure)
    assert "p(X()) -> G p(X())" in text
    assert "!p(X()) -> G !p(X())" in text


def test_purity_assumptions_empty_is_true():
    st = classify(parse_formula("G [y <- f(x)]"))
    assert pretty(purity_assumptions(st)) == "true"


def test_tlsf_sections(button):
    _, _, spec = button
    text = export_tlsf(spec)
    assert "SEMANTICS:   Mealy" in text
    assert "INPUTS" in text and "OUTPUTS" in text
    for pid in spec.props:
        assert pid.lower() in text


def test_tlsf_case_collision():
    f = parse_formula("G (p(x) -> [y <- F(x)]) && G [y <- f(x)]")
    spec = encode(f)
    with pytest.raises(TlsfNameCollision):
        export_tlsf(spec)


def test_mangle_collision_detected():
    # a signal whose name spells out another atom's serialization
    a = Pred("p", (Signal("f_l_x_r_"),))
    b = Pred("p", (Apply("f", (Signal("x"),)),))
    assert term_prop(a) == term_prop(b)
    f = And(Globally(a), And(Globally(b), Globally(Update("y", Signal("x")))))
    with pytest.raises(MangleCollision):
        encode(f)
