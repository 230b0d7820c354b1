"""Encoding stream-logic formulas into propositional LTL.

Every distinct predicate term becomes an input proposition and every update
term becomes an output proposition; the encoded formula conjoins the
substituted original with a global exactly-one constraint per output signal
over that signal's update propositions (the self update `[s <- s]` is always
included, so doing nothing is always available).  A system winning this LTL
game yields a correct stream machine for every interpretation of the
function and predicate names; the converse direction is lost, which is the
price of the abstraction.

Proposition names mangle terms reversibly: `f(a, b)` becomes `f_l_a_c_b_r_`
and `[x <- f(x)]` becomes `u_x_eq_f_l_x_r_`.  Identifiers contain no
underscores, so the markers `_l_`, `_c_`, `_r_`, `u_`, `_eq_` parse back
unambiguously.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (Signal, Apply, Const, Pred, Update, Not, And, Next, Until,
                     Implies, Globally, classify, desugar, conj, pretty_term)
from . import ltl
from .ltl import Ltl, lap, lnot, land, lor, lnext, luntil, conj_all, disj_all, lglobally


class NoOutputs(Exception):
    """The formula contains no update term, so there is nothing to drive."""


class ExactlyOneViolation(Exception):
    """A machine transition does not pick exactly one update per signal."""


class MangleCollision(Exception):
    pass


class TlsfNameCollision(Exception):
    pass


# ---------------------------------------------------------------------------
# Term <-> proposition name mangling
# ---------------------------------------------------------------------------

def _ser(term):
    if isinstance(term, Signal):
        return term.name
    return term.name + "_l_" + "_c_".join(_ser(a) for a in term.args) + "_r_"


def term_prop(atom):
    """Proposition id of a predicate or update atom."""
    if isinstance(atom, Pred):
        return _ser(Apply(atom.name, atom.args))
    if isinstance(atom, Update):
        return "u_" + atom.target + "_eq_" + _ser(atom.term)
    raise TypeError("not an atom: %r" % (atom,))


def _parse_ident(s, i):
    j = i
    n = len(s)
    while j < n and s[j].isalnum():
        j += 1
    if j == i:
        raise ValueError("expected identifier at %d in %r" % (i, s))
    return s[i:j], j


def _parse_ser(s, i):
    name, j = _parse_ident(s, i)
    if not s.startswith("_l_", j):
        return Signal(name), j
    j += 3
    args = []
    if s.startswith("_r_", j):
        return Apply(name, ()), j + 3
    while True:
        arg, j = _parse_ser(s, j)
        args.append(arg)
        if s.startswith("_c_", j):
            j += 3
            continue
        if s.startswith("_r_", j):
            return Apply(name, tuple(args)), j + 3
        raise ValueError("expected _c_ or _r_ at %d in %r" % (j, s))


def unmangle(prop_id):
    """Inverse of term_prop."""
    if prop_id.startswith("u_"):
        try:
            target, j = _parse_ident(prop_id, 2)
            if prop_id.startswith("_eq_", j):
                term, end = _parse_ser(prop_id, j + 4)
                if end == len(prop_id):
                    return Update(target, term)
        except ValueError:
            pass
    term, end = _parse_ser(prop_id, 0)
    if end != len(prop_id):
        raise ValueError("trailing characters in proposition id %r" % prop_id)
    if not isinstance(term, Apply):
        raise ValueError("proposition id %r is a bare name" % prop_id)
    return Pred(term.name, term.args)


# ---------------------------------------------------------------------------
# The encoding
# ---------------------------------------------------------------------------

@dataclass
class LtlSpec:
    """Propositional LTL synthesis problem produced by `encode`.

    `formula` is the full objective including the exactly-one constraint;
    `core` omits that constraint (the game enforces it by move restriction
    when `groups` is present).  `groups` lists, per output signal, that
    signal's update proposition ids with the self update last.
    """
    inputs: tuple
    outputs: tuple
    formula: Ltl
    core: Ltl
    groups: tuple = None           # tuple of tuples of prop ids, or None
    group_signals: tuple = ()      # signal names aligned with groups
    symtab: object = None

    @property
    def props(self):
        return tuple(self.inputs) + tuple(self.outputs)


def _substituted(core_formula, prop_of):
    f = core_formula
    if isinstance(f, Const):
        return ltl.LTT if f.value else ltl.LFF
    if isinstance(f, (Pred, Update)):
        return lap(prop_of(f))
    if isinstance(f, Not):
        return lnot(_substituted(f.child, prop_of))
    if isinstance(f, And):
        return land(_substituted(f.left, prop_of), _substituted(f.right, prop_of))
    if isinstance(f, Next):
        return lnext(_substituted(f.child, prop_of))
    if isinstance(f, Until):
        return luntil(_substituted(f.left, prop_of), _substituted(f.right, prop_of))
    raise TypeError("not a core formula: %r" % (f,))


def encode(formula, symtab=None, allow_no_outputs=False):
    """Encode a stream-logic formula as an LTL synthesis problem.

    Predicate terms become input propositions; per output signal, the update
    terms occurring in the formula plus the self update become that signal's
    output propositions, constrained to exactly one per step.  Raises
    NoOutputs when the formula has no update at all, unless
    `allow_no_outputs` (useful for checking input-only properties).
    """
    st = symtab if symtab is not None else classify(formula)
    core = desugar(formula)

    by_id = {}

    def prop_of(atom):
        if isinstance(atom, Update):
            atom = Update(atom.target, atom.term)
        pid = term_prop(atom)
        seen = by_id.get(pid)
        if seen is not None and seen != atom:
            raise MangleCollision("%r and %r both mangle to %s" % (seen, atom, pid))
        by_id[pid] = atom
        return pid

    pred_ids = set()
    updates_by_signal = {s: set() for s in st.outputs}
    stack = [core]
    while stack:
        f = stack.pop()
        if isinstance(f, Pred):
            pred_ids.add(prop_of(f))
        elif isinstance(f, Update):
            updates_by_signal[f.target].add(prop_of(f))
        else:
            for attr in ("child", "left", "right"):
                v = getattr(f, attr, None)
                if v is not None:
                    stack.append(v)

    if not st.outputs and not allow_no_outputs:
        raise NoOutputs("formula contains no update term")

    groups, signals, outputs = [], [], []
    for s in sorted(st.outputs):
        self_id = prop_of(Update(s, Signal(s)))
        rest = sorted(updates_by_signal[s] - {self_id})
        group = tuple(rest) + (self_id,)
        groups.append(group)
        signals.append(s)
        outputs.extend(group)

    inputs = tuple(sorted(pred_ids))
    core_ltl = _substituted(core, prop_of)

    exactly_one = conj_all(
        disj_all(land(lap(t), conj_all(lnot(lap(o)) for o in group if o != t))
                 for t in group)
        for group in groups)
    full = land(core_ltl, lglobally(exactly_one)) if groups else core_ltl

    return LtlSpec(inputs=inputs, outputs=tuple(outputs), formula=full,
                   core=core_ltl, groups=tuple(groups) if groups else None,
                   group_signals=tuple(signals), symtab=st)


def purity_assumptions(symtab):
    """Stability assumptions for predicates applied to nullary functions.

    For each unary predicate p and nullary function X the result conjoins
    (p(X()) -> G p(X())) && (!p(X()) -> G !p(X())), stating that such a
    predicate's value never changes.  Empty quantifier ranges give `true`.
    """
    parts = []
    nullary = sorted(n for n, a in symtab.functions.items() if a == 0)
    unary_preds = sorted(n for n, a in symtab.predicates.items() if a == 1)
    for p in unary_preds:
        for x in nullary:
            atom = Pred(p, (Apply(x, ()),))
            parts.append(Implies(atom, Globally(atom)))
            parts.append(Implies(Not(atom), Globally(Not(atom))))
    return conj(parts)


# ---------------------------------------------------------------------------
# TLSF export
# ---------------------------------------------------------------------------

def _tlsf_formula(f, rename, level=0):
    op = f.op
    if op == "tt":
        return "true"
    if op == "ff":
        return "false"
    if op == "ap":
        return rename[f.name]
    if op == "not":
        return "!" + _tlsf_formula(f.kids[0], rename, 4)
    if op == "X":
        return "X " + _tlsf_formula(f.kids[0], rename, 4)
    sym = {"and": "&&", "or": "||", "U": "U", "R": "R"}[op]
    lvl = {"or": 1, "and": 2, "U": 3, "R": 3}[op]
    text = "%s %s %s" % (_tlsf_formula(f.kids[0], rename, lvl + 1), sym,
                         _tlsf_formula(f.kids[1], rename, lvl))
    return "(" + text + ")" if level > lvl else text


def export_tlsf(spec, title="encoded stream-logic specification",
                description="generated by tslsynth"):
    """Render an LtlSpec in TLSF (basic format, Mealy semantics).

    Proposition ids are lowercased to fit the format's identifier rules; a
    collision between ids differing only in case is an error.
    """
    rename = {}
    taken = {}
    for pid in spec.props:
        low = pid.lower()
        if low in taken and taken[low] != pid:
            raise TlsfNameCollision("%r and %r collide after lowercasing" % (taken[low], pid))
        taken[low] = pid
        rename[pid] = low

    lines = [
        "INFO {",
        '  TITLE:       "%s"' % title,
        '  DESCRIPTION: "%s"' % description,
        "  SEMANTICS:   Mealy",
        "  TARGET:      Mealy",
        "}",
        "",
        "MAIN {",
        "  INPUTS {",
    ]
    lines += ["    %s;" % rename[p] for p in spec.inputs]
    lines += ["  }", "  OUTPUTS {"]
    lines += ["    %s;" % rename[p] for p in spec.outputs]
    lines += ["  }", "  GUARANTEES {",
              "    %s;" % _tlsf_formula(spec.formula, rename),
              "  }", "}", ""]
    return "\n".join(lines)
