"""Arrowized-FRP code generation from control-flow models.

The emitted program is a single looped stream function: the loop state
carries the current output values and a mode integer (the machine state),
and the step function is one guard cascade with a row per model transition,
closing with a literal `otherwise`.  Uninterpreted function and predicate
names are assumed to be in scope via an `import Terms`.

Identifiers are lowered to fit the target's value-name rule; names that
then collide with a reserved word or with each other get apostrophes
appended, and every applied rename is listed in a header comment.  The
header also carries a machine-readable STATS json line with the model
counts and the number of emitted conditionals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .syntax import Signal, Apply
from .encoding import unmangle
from .cfm import cfm_stats

RESERVED = {
    "case", "class", "data", "default", "deriving", "do", "else", "foreign",
    "if", "import", "in", "infix", "infixl", "infixr", "instance", "let",
    "module", "newtype", "of", "then", "type", "where",
}

DIALECTS = {
    "cca": ("Control.CCA", "loopD ({init}, 0) step"),
    "yampa": ("FRP.Yampa", "loopPre ({init}, 0) (arr step)"),
}


@dataclass(frozen=True)
class CodegenOptions:
    module_name: str = "Controller"
    dialect: str = "cca"


def _lower(name):
    return name[0].lower() + name[1:]


class _Names:
    def __init__(self):
        self.by_orig = {}
        self.taken = set(RESERVED)
        self.renamed = []

    def get(self, orig):
        if orig in self.by_orig:
            return self.by_orig[orig]
        name = _lower(orig)
        while name in self.taken:
            name += "'"
        if name != _lower(orig):
            self.renamed.append((orig, name))
        self.taken.add(name)
        self.by_orig[orig] = name
        return name

    def fresh(self, want):
        name = want
        while name in self.taken:
            name += "'"
        self.taken.add(name)
        return name


def _render_term(term, names):
    if isinstance(term, Signal):
        return names.get(term.name), True
    if not term.args:
        return names.get(term.name), True
    parts = [names.get(term.name)]
    for a in term.args:
        text, atomic = _render_term(a, names)
        parts.append(text if atomic else "(%s)" % text)
    return " ".join(parts), False


def _tuple_text(items):
    if not items:
        return "()"
    if len(items) == 1:
        return items[0]
    return "(" + ", ".join(items) + ")"


def generate_frp(cfm, symtab=None, options=CodegenOptions()):
    """Render the model as an arrowized-FRP program (deterministic text)."""
    if options.dialect not in DIALECTS:
        raise ValueError("unknown dialect %r (have: %s)"
                         % (options.dialect, ", ".join(sorted(DIALECTS))))
    frp_import, loop_tpl = DIALECTS[options.dialect]
    names = _Names()
    st = symtab if symtab is not None else cfm.symtab
    in_signals = sorted(st.inputs)
    out_signals = sorted(st.outputs)
    for s in in_signals + out_signals:       # claim signal names first
        names.get(s)
    mode = names.fresh("m")
    out_helper = names.fresh("emit")
    sf_name = names.fresh(_lower(options.module_name))
    init_names = [names.fresh("init" + s[0].upper() + s[1:]) for s in out_signals]

    stats = dict(cfm_stats(cfm))
    stats["conditionals"] = count_conditionals(cfm)

    def pred_text(pid, want):
        atom = unmangle(pid)
        text, atomic = _render_term(Apply(atom.name, atom.args), names)
        if want:
            return text
        return "not %s" % (text if atomic else "(%s)" % text)

    guards = []
    n_states = cfm.n_states
    for q in range(n_states):
        rows = cfm.rows[q]
        for ri, row in enumerate(rows):
            last_overall = q == n_states - 1 and ri == len(rows) - 1
            conds = [pred_text(pid, want) for pid, want in row.given]
            if not last_overall:
                conds.append("%s == %d" % (mode, q))
            cond = " && ".join(conds) if conds else "otherwise"
            if last_overall:
                cond = "otherwise"
            upd = dict(row.updates)
            rhs_items = []
            for s in out_signals:
                text, atomic = _render_term(upd[s], names)
                rhs_items.append(text if atomic else "(%s)" % text)
            guards.append("  | %s = %s %s %d"
                          % (cond, out_helper, _tuple_text(rhs_items), row.next))

    init_tuple = _tuple_text(init_names)
    in_tuple = _tuple_text([names.get(s) for s in in_signals])
    out_tuple = _tuple_text([names.get(s) for s in out_signals])

    lines = []
    lines.append("-- %s: reactive program generated from a control-flow model"
                 % options.module_name)
    lines.append("-- STATS %s" % json.dumps(stats, sort_keys=True))
    if names.renamed:
        notes = ", ".join("%s -> %s" % (a, b) for a, b in sorted(names.renamed))
        lines.append("-- renamed to avoid reserved words: %s" % notes)
    lines.append("")
    lines.append("module %s where" % options.module_name)
    lines.append("")
    lines.append("import %s" % frp_import)
    lines.append("import Terms")
    lines.append("")
    lines.append("%s = %s" % (sf_name, loop_tpl.format(init=init_tuple)))
    lines.append("")
    for s, init_name in zip(out_signals, init_names):
        lines.append("-- bind %s in Terms to the initial value of %s" % (init_name, s))
    lines.append("")
    lines.append("step (%s, (%s, %s))" % (in_tuple, out_tuple, mode))
    lines.extend(guards)
    lines.append("  where %s vs m' = (vs, (vs, m'))" % out_helper)
    lines.append("")
    return "\n".join(lines)


def count_conditionals(cfm):
    """Number of guard branches the model compiles to: one per row."""
    return sum(len(rows) for rows in cfm.rows)


def _guard_lines(frp_text):
    return sum(1 for line in frp_text.splitlines() if line.lstrip().startswith("| "))


def validate_frp(frp_text):
    """Structural checks on generated text; returns a list of problems."""
    problems = []
    pairs = {"(": ")", "[": "]", "{": "}"}
    stack = []
    for ch in frp_text:
        if ch in pairs:
            stack.append(pairs[ch])
        elif ch in pairs.values():
            if not stack or stack.pop() != ch:
                problems.append("unbalanced brackets")
                break
    else:
        if stack:
            problems.append("unbalanced brackets")

    lines = frp_text.splitlines()
    if not any(line.startswith("module ") for line in lines):
        problems.append("missing module header")
    stats_lines = [l for l in lines if l.startswith("-- STATS ")]
    if len(stats_lines) != 1:
        problems.append("missing STATS header")
    else:
        try:
            stats = json.loads(stats_lines[0][len("-- STATS "):])
            if stats.get("conditionals") != _guard_lines(frp_text):
                problems.append("STATS conditionals disagrees with emitted guards")
        except ValueError:
            problems.append("STATS header is not valid json")
    guard_lines = [l for l in lines if l.lstrip().startswith("| ")]
    for l in guard_lines:
        if " = " not in l:
            problems.append("guard without a right-hand side: %r" % l.strip())
    if not any(l.lstrip().startswith("| otherwise") for l in guard_lines):
        problems.append("missing final otherwise guard")
    return problems
