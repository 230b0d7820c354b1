"""Control-flow models: the function-term view of synthesized machines.

A control-flow model keeps the structure a Mealy machine over encoded
propositions loses: each transition row guards on predicate terms and picks
one function term per output signal.  Rows per state are ordered, pairwise
disjoint, and end in an `otherwise` row that catches every remaining input
valuation, so exactly one row applies at any step (the first match).

`verify_cfm` model checks the machine against a formula by building the
product with the Buechi automaton of the negated encoding.  Update terms the
encoding does not know about make every update proposition of their signal
false, which the exactly-one constraint rejects; the abstraction cannot do
better, and this keeps verification sound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .syntax import (SymbolTable, Signal, Pred, Update, ParseError, classify,
                     parse_term, pretty_term)
from .semantics import FiniteComputation, eval_value
from .encoding import term_prop, unmangle, encode, ExactlyOneViolation
from .ltl import lnot
from .automata import ltl_to_nba, _sccs
from .cubes import cube_cover


class CfmFormatError(Exception):
    pass


@dataclass(frozen=True)
class Row:
    given: tuple          # ((pred_id, bool), ...), empty for the otherwise row
    updates: tuple        # ((signal, term), ...) sorted by signal
    next: int
    otherwise: bool = False

    def given_map(self):
        return dict(self.given)

    def updates_map(self):
        return dict(self.updates)


@dataclass
class Cfm:
    symtab: SymbolTable
    pred_ids: tuple       # predicate-term proposition ids, fixed bit order
    n_states: int
    init: int
    rows: tuple           # rows[state] = tuple of Row, otherwise row last

    def state_rows(self, state):
        return self.rows[state]

    @property
    def predicate_terms(self):
        return tuple(unmangle(pid) for pid in self.pred_ids)

    @property
    def function_terms(self):
        """Distinct non-identity update terms, in render order."""
        seen = {}
        for state_rows in self.rows:
            for row in state_rows:
                for _, term in row.updates:
                    if isinstance(term, Signal):
                        continue
                    seen.setdefault(pretty_term(term), term)
        return tuple(seen[k] for k in sorted(seen))


def _row_matches(row, true_ids):
    if row.otherwise:
        return True
    return all((pid in true_ids) == want for pid, want in row.given)


def cfm_step(cfm, state, predset):
    """First matching row for a set of true predicates.

    `predset` holds Pred atoms or their proposition ids, all of which must
    be predicates the model guards on.  Returns (updates dict, next state).
    """
    known = set(cfm.pred_ids)
    true_ids = set()
    for p in predset:
        pid = term_prop(p) if isinstance(p, Pred) else p
        if pid not in known:
            raise ValueError("unknown predicate term %r" % (p,))
        true_ids.add(pid)
    for row in cfm.rows[state]:
        if _row_matches(row, true_ids):
            return row.updates_map(), row.next
    raise CfmFormatError("state %d has no applicable row" % state)


# ---------------------------------------------------------------------------
# From Mealy machines
# ---------------------------------------------------------------------------

def mealy_to_cfm(mealy, symtab):
    """Decode a Mealy machine over encoded propositions into a model.

    Every transition must emit exactly one update proposition per output
    signal.  Input cubes with equal effect are merged; the group containing
    the all-false input valuation becomes the state's otherwise row.
    """
    signals = sorted(symtab.outputs)
    n_in = len(mealy.inputs)

    def decode_updates(om):
        per_signal = {}
        for i, pid in enumerate(mealy.outputs):
            if not om >> i & 1:
                continue
            atom = unmangle(pid)
            if not isinstance(atom, Update):
                raise ExactlyOneViolation("output %r is not an update" % pid)
            if atom.target in per_signal:
                raise ExactlyOneViolation(
                    "two updates chosen for signal %r" % atom.target)
            per_signal[atom.target] = atom.term
        missing = [s for s in signals if s not in per_signal]
        if missing:
            raise ExactlyOneViolation("no update chosen for %r" % missing[0])
        extra = [s for s in per_signal if s not in signals]
        if extra:
            raise ExactlyOneViolation("update for undeclared signal %r" % extra[0])
        return tuple(sorted(per_signal.items()))

    all_rows = []
    for q in range(mealy.n_states):
        groups = {}
        for im in range(1 << n_in):
            om, nxt = mealy.transitions[(q, im)]
            groups.setdefault((decode_updates(om), nxt), []).append(im)
        otherwise_key = next(k for k, masks in groups.items() if 0 in masks)
        rows = []
        for key, masks in sorted(groups.items(), key=lambda kv: min(kv[1])):
            if key == otherwise_key:
                continue
            updates, nxt = key
            for care, value in cube_cover(masks, n_in):
                given = tuple((pid, bool(value >> i & 1))
                              for i, pid in enumerate(mealy.inputs) if care >> i & 1)
                rows.append(Row(given=given, updates=updates, next=nxt))
        updates, nxt = otherwise_key
        rows.append(Row(given=(), updates=updates, next=nxt, otherwise=True))
        all_rows.append(tuple(rows))

    return Cfm(symtab=symtab, pred_ids=tuple(mealy.inputs),
               n_states=mealy.n_states, init=mealy.init, rows=tuple(all_rows))


# ---------------------------------------------------------------------------
# Closed-loop execution
# ---------------------------------------------------------------------------

def cfm_trace(cfm, interp, steps):
    """Execute the model against an interpretation for a number of steps.

    Per step the record holds the current signal values (the ones the step
    reads, i.e. before its updates land), the predicate valuation those
    values induce, the chosen update terms, and the successor state.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    comp = FiniteComputation(frozenset(cfm.symtab.outputs))
    atoms = {pid: unmangle(pid) for pid in cfm.pred_ids}
    cache = {}
    trace = []
    state = cfm.init
    for t in range(steps):
        values = {s: eval_value(comp, t, Signal(s), interp, _sig_cache=cache)
                  for s in sorted(cfm.symtab.outputs)}
        preds = {}
        for pid, atom in atoms.items():
            fn = interp.predicate(atom.name, len(atom.args))
            args = [eval_value(comp, t, a, interp, _sig_cache=cache)
                    for a in atom.args]
            preds[pid] = bool(fn(*args))
        true_ids = {pid for pid, v in preds.items() if v}
        updates, nxt = cfm_step(cfm, state, true_ids)
        trace.append({"t": t, "state": state, "values": values,
                      "preds": preds, "updates": updates, "next": nxt})
        comp.steps.append(dict(updates))
        state = nxt
    return comp, trace


def cfm_run(cfm, interp, steps):
    """Closed-loop run; returns the driven computation and the value trace.

    The computation is the finite prefix of update terms the machine chose;
    the trace lists, per step, the output values that step read.
    """
    comp, trace = cfm_trace(cfm, interp, steps)
    return comp, [rec["values"] for rec in trace]


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class VerifyResult:
    ok: bool
    prefix: tuple = None    # letters (frozensets of prop ids) when not ok
    loop: tuple = None

    def __bool__(self):
        return self.ok


def verify_cfm(cfm, formula):
    """Model check the machine against the formula's LTL encoding.

    Explores the product of the machine (driven by every predicate
    valuation) with the Buechi automaton of the negated encoding; an
    accepting lasso is returned as a counterexample word.
    """
    spec = encode(formula, allow_no_outputs=True)
    nba = ltl_to_nba(lnot(spec.formula), spec.props)

    branch_ids = sorted(set(cfm.pred_ids) | set(spec.inputs))
    known_updates = set(spec.outputs)

    def letter_for(true_ids, updates):
        out = set(true_ids)
        for s, term in updates.items():
            pid = term_prop(Update(s, term))
            if pid in known_updates:
                out.add(pid)
        return frozenset(out)

    nodes = {}
    order = []
    succ = []
    labels = []
    cfm_preds = set(cfm.pred_ids)

    def node_id(key):
        if key not in nodes:
            nodes[key] = len(order)
            order.append(key)
        return nodes[key]

    roots = [node_id((cfm.init, q)) for q in sorted(nba.initial)]
    i = 0
    while i < len(order):
        m, q = order[i]
        row = []
        lab = []
        for bits in range(1 << len(branch_ids)):
            true_ids = {p for j, p in enumerate(branch_ids) if bits >> j & 1}
            updates, nxt = cfm_step(cfm, m, true_ids & cfm_preds)
            letter = letter_for(true_ids, updates)
            mask = nba.mask(letter)
            for q2 in nba.successors(q, mask):
                row.append(node_id((nxt, q2)))
                lab.append(letter)
        succ.append(row)
        labels.append(lab)
        i += 1

    comps = _sccs(len(order), succ)
    good = set()
    for comp in comps:
        cs = set(comp)
        cyclic = len(comp) > 1 or any(d in cs for v in comp for d in succ[v])
        if cyclic and any(order[v][1] in nba.accepting for v in comp):
            good |= cs

    if not good:
        return VerifyResult(ok=True)

    # shortest path from a root into the accepting region, then a cycle
    parent = {r: None for r in roots}
    frontier = list(roots)
    hit = None
    while frontier and hit is None:
        nxt_frontier = []
        for v in frontier:
            if v in good:
                hit = v
                break
            for j, w in enumerate(succ[v]):
                if w not in parent:
                    parent[w] = (v, labels[v][j])
                    nxt_frontier.append(w)
        frontier = nxt_frontier
    assert hit is not None, "accepting region must be reachable"

    prefix = []
    v = hit
    while parent[v] is not None:
        u, letter = parent[v]
        prefix.append(letter)
        v = u
    prefix.reverse()

    scc = None
    for comp in comps:
        if hit in comp:
            scc = set(comp)
            break
    loop = _cycle_letters(hit, succ, labels, scc)
    return VerifyResult(ok=False, prefix=tuple(prefix), loop=tuple(loop))


def _cycle_letters(start, succ, labels, scc):
    parent = {}
    queue = [start]
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for j, w in enumerate(succ[u]):
            if w == start:
                letters = [labels[u][j]]
                v = u
                while v != start:
                    pv, pj = parent[v]
                    letters.append(labels[pv][pj])
                    v = pv
                letters.reverse()
                return letters
            if w in scc and w not in parent:
                parent[w] = (u, j)
                queue.append(w)
    raise AssertionError("no cycle through accepting node")


# ---------------------------------------------------------------------------
# Stats and serialization
# ---------------------------------------------------------------------------

def cfm_stats(cfm):
    """Size record: states, signal counts, and distinct term counts.

    Predicates and functions are counted as distinct terms, not names;
    `eq(steps, moveup())` and `eq(steps, movedown())` are two predicates.
    """
    st = cfm.symtab
    return {"states": cfm.n_states,
            "inputs": len(st.inputs),
            "outputs": len(st.outputs),
            "n_predicates": len(cfm.pred_ids),
            "n_functions": len(cfm.function_terms)}


def export_cfm(cfm):
    """JSON-ready dict with one flat row list across states.

    Every row lists all predicate ids, '*' = don't care; rows of one state
    appear consecutively in evaluation order, the catch-all last.
    """
    st = cfm.symtab
    rows_out = []
    for q in range(cfm.n_states):
        for row in cfm.rows[q]:
            given_full = {pid: "*" for pid in cfm.pred_ids}
            for pid, want in row.given:
                given_full[pid] = want
            rows_out.append({
                "state": q,
                "given": given_full,
                "updates": {s: pretty_term(t) for s, t in row.updates},
                "next": row.next,
            })
    return {
        "symtab": {
            "inputs": list(st.inputs),
            "outputs": list(st.outputs),
            "functions": dict(sorted(st.functions.items())),
            "predicates": dict(sorted(st.predicates.items())),
        },
        "preds": list(cfm.pred_ids),
        "states": cfm.n_states,
        "init": cfm.init,
        "rows": rows_out,
    }


def import_cfm(data):
    """Parse and validate the JSON form produced by export_cfm.

    Within a state, rows before the final one must be pairwise disjoint and
    the final row must be a full don't-care catch-all.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        st = data["symtab"]
        symtab = SymbolTable(inputs=tuple(st["inputs"]), outputs=tuple(st["outputs"]),
                             functions=dict(st["functions"]),
                             predicates=dict(st["predicates"]))
        pred_ids = tuple(data["preds"])
        n_states = int(data["states"])
        init = int(data["init"])
        raw_rows = data["rows"]
    except (KeyError, TypeError, ValueError) as e:
        raise CfmFormatError("missing or malformed field: %s" % e)
    if n_states < 1 or not 0 <= init < n_states:
        raise CfmFormatError("bad state count or initial state")

    for pid in pred_ids:
        try:
            atom = unmangle(pid)
        except ValueError as e:
            raise CfmFormatError("bad predicate id: %s" % e)
        if not isinstance(atom, Pred):
            raise CfmFormatError("%r is not a predicate-term id" % pid)

    by_state = [[] for _ in range(n_states)]
    for raw in raw_rows:
        try:
            q = int(raw["state"])
            given_raw = raw["given"]
            updates_raw = raw["updates"]
            nxt = int(raw["next"])
        except (KeyError, TypeError, ValueError) as e:
            raise CfmFormatError("malformed row: %s" % e)
        if not 0 <= q < n_states:
            raise CfmFormatError("row state out of range")
        if not 0 <= nxt < n_states:
            raise CfmFormatError("row target out of range in state %d" % q)
        by_state[q].append((given_raw, updates_raw, nxt))

    all_rows = []
    for q, state_rows in enumerate(by_state):
        if not state_rows:
            raise CfmFormatError("state %d has no rows" % q)
        rows = []
        for idx, (given_raw, updates_raw, nxt) in enumerate(state_rows):
            given = []
            for pid, v in given_raw.items():
                if pid not in pred_ids:
                    raise CfmFormatError("row guards on unknown id %r" % pid)
                if v == "*":
                    continue
                if not isinstance(v, bool):
                    raise CfmFormatError("guard value must be a bool or '*'")
                given.append((pid, v))
            given.sort()
            if set(updates_raw) != set(symtab.outputs):
                raise CfmFormatError(
                    "state %d row %d must update every output exactly once" % (q, idx))
            try:
                updates = tuple(sorted((s, parse_term(t))
                                       for s, t in updates_raw.items()))
            except ParseError as e:
                raise CfmFormatError("state %d row %d: %s" % (q, idx, e))
            last = idx == len(state_rows) - 1
            if last and given:
                raise CfmFormatError("state %d must end in a catch-all row" % q)
            rows.append(Row(given=tuple(given), updates=updates, next=nxt,
                            otherwise=last))
        for a in range(len(rows) - 1):
            for b in range(a + 1, len(rows) - 1):
                if _cubes_overlap(rows[a].given, rows[b].given):
                    raise CfmFormatError(
                        "state %d rows %d and %d overlap" % (q, a, b))
        all_rows.append(tuple(rows))
    return Cfm(symtab=symtab, pred_ids=pred_ids, n_states=n_states,
               init=init, rows=tuple(all_rows))


def _cubes_overlap(given_a, given_b):
    da, db = dict(given_a), dict(given_b)
    return all(da[k] == db[k] for k in set(da) & set(db))
