"""Arity normalization, an undecidability gadget, and a scaling family.

The three kappa transforms rewrite any formula into one whose function and
predicate names all have arity exactly two, preserving realizability:
nullary names become fresh output signals pinned by a global self update,
unary applications duplicate their argument, and higher arities fold their
argument tail through one fresh binary name.

`pcp_formula` reduces a Post correspondence problem instance to a
realizability question: the formula is realizable iff the instance has no
solution, which is where the general decision problem dies.

`counter_ltl` builds the n-bit click counter directly as an LTL problem,
a family whose minimal controllers double in size per added bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (Signal, Apply, Const, Pred, Update, Not, And, Or, Implies,
                     Iff, Next, Until, Release, WeakUntil, AsSoonAs, Finally_,
                     Globally, TT, conj, classify)
from .ltl import (LTT, lap, lnot, land, lor, lnext, conj_all, limplies, liff,
                  lglobally)
from .encoding import LtlSpec


def _used_names(symtab):
    used = set(symtab.inputs) | set(symtab.outputs)
    used |= set(symtab.functions) | set(symtab.predicates)
    return used


def _fresh(base, used):
    i = 1
    while "%s%d" % (base, i) in used:
        i += 1
    name = "%s%d" % (base, i)
    used.add(name)
    return name


def _map_formula(f, term_fn, pred_fn):
    def go(g):
        if isinstance(g, Const):
            return g
        if isinstance(g, Pred):
            return pred_fn(g)
        if isinstance(g, Update):
            return Update(g.target, term_fn(g.term))
        if isinstance(g, Not):
            return Not(go(g.child))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Next, Finally_, Globally)):
            return type(g)(go(g.child))
        if isinstance(g, (Until, Release, WeakUntil, AsSoonAs)):
            return type(g)(go(g.left), go(g.right))
        raise TypeError("unexpected formula node %r" % (g,))
    return go(f)


def kappa0(formula):
    """Eliminate nullary function and predicate names.

    Each nullary function becomes an output signal frozen by a conjoined
    `G [x <- x]`; each nullary predicate p() becomes p'(p) for a fresh unary
    name over a fresh frozen signal p.  Already clean formulas just gain a
    `true` conjunct.
    """
    st = classify(formula)
    used = _used_names(st)
    moved_fns = sorted(n for n, a in st.functions.items() if a == 0)
    moved_preds = sorted(n for n, a in st.predicates.items() if a == 0)
    pred_rename = {p: _fresh(p, used) for p in moved_preds}

    def term_fn(t):
        if isinstance(t, Signal):
            return t
        if not t.args and t.name in moved_fns:
            return Signal(t.name)
        return Apply(t.name, tuple(term_fn(a) for a in t.args))

    def pred_fn(p):
        if not p.args and p.name in moved_preds:
            return Pred(pred_rename[p.name], (Signal(p.name),))
        return Pred(p.name, tuple(term_fn(a) for a in p.args))

    moved = sorted(moved_fns + moved_preds)
    frozen = conj([Globally(Update(x, Signal(x))) for x in moved])
    return And(frozen, _map_formula(formula, term_fn, pred_fn))


def kappa1(formula):
    """Duplicate the argument of every unary application: x(t) -> x(t, t)."""
    def term_fn(t):
        if isinstance(t, Signal):
            return t
        args = tuple(term_fn(a) for a in t.args)
        if len(args) == 1:
            return Apply(t.name, (args[0], args[0]))
        return Apply(t.name, args)

    def pred_fn(p):
        args = tuple(term_fn(a) for a in p.args)
        if len(args) == 1:
            return Pred(p.name, (args[0], args[0]))
        return Pred(p.name, args)

    return _map_formula(formula, term_fn, pred_fn)


def kappa2(formula):
    """Fold arities above two through one fresh binary name.

    x(t0, ..., tm) becomes x(t0, f(t1, ... f(tm-1, tm)...)) with a single
    fresh f shared by the whole formula.
    """
    st = classify(formula)
    used = _used_names(st)
    needs = any(a > 2 for a in st.functions.values()) or \
        any(a > 2 for a in st.predicates.values())
    fold_name = _fresh("pair", used) if needs else None

    def fold(args):
        if len(args) == 1:
            return args[0]
        return Apply(fold_name, (args[0], fold(args[1:])))

    def fix(name, args):
        if len(args) <= 2:
            return name, args
        return name, (args[0], fold(list(args[1:])))

    def term_fn(t):
        if isinstance(t, Signal):
            return t
        args = tuple(term_fn(a) for a in t.args)
        name, args = fix(t.name, args)
        return Apply(name, args)

    def pred_fn(p):
        args = tuple(term_fn(a) for a in p.args)
        name, args = fix(p.name, args)
        return Pred(name, args)

    return _map_formula(formula, term_fn, pred_fn)


def to_tsl2(formula):
    """Compose the three transforms and audit the result.

    Every function and predicate name in the result has arity exactly two
    (signals stay nullary); realizability is preserved.
    """
    g = kappa2(kappa1(kappa0(formula)))
    st = classify(g)
    bad = {n: a for n, a in list(st.functions.items()) + list(st.predicates.items())
           if a != 2}
    if bad:
        raise AssertionError("arity normalization left %r" % (bad,))
    return g


# ---------------------------------------------------------------------------
# Post correspondence reduction
# ---------------------------------------------------------------------------

RESERVED_PCP_NAMES = {"A", "B", "X", "p"}


def pcp_formula(pairs):
    """Formula realizable iff the correspondence instance has no solution.

    `pairs` is a sequence of word pairs over single lowercase letters (the
    letters become unary function names; 'p' is taken).  Two signals build
    the words of a candidate solution letter by letter from a shared seed
    X(); the environment could reveal an existing solution through the
    final equality test, so only unsolvable instances are realizable.
    """
    pairs = [(str(w), str(v)) for w, v in pairs]
    if not pairs:
        raise ValueError("need at least one word pair")
    for w, v in pairs:
        if not w or not v:
            raise ValueError("words must be nonempty")
        for c in w + v:
            if not (c.isalpha() and c.islower()):
                raise ValueError("letters must be lowercase, got %r" % c)
            if c in RESERVED_PCP_NAMES:
                raise ValueError("letter %r collides with a fixed name" % c)

    def grow(word, signal):
        term = Signal(signal)
        for c in reversed(word):
            term = Apply(c, (term,))
        return term

    seed = And(Update("A", Apply("X", ())), Update("B", Apply("X", ())))
    steps = None
    for w, v in pairs:
        choice = And(Update("A", grow(w, "A")), Update("B", grow(v, "B")))
        steps = choice if steps is None else Or(steps, choice)
    equal = Iff(Pred("p", (Signal("A"),)), Pred("p", (Signal("B"),)))
    return And(And(seed, Next(Globally(steps))),
               Next(Next(Finally_(equal))))


# ---------------------------------------------------------------------------
# Counter family
# ---------------------------------------------------------------------------

def counter_ltl(n_bits):
    """LTL synthesis problem of the n-bit click counter.

    One input `click`, outputs `c0..c(n-1)` holding the count of clicks so
    far, modulo 2^n; a click in the current step already shows in the
    current value.  Pure safety, and any controller needs 2^n states.
    """
    if not 1 <= n_bits <= 6:
        raise ValueError("supported range is 1..6 bits")
    click = lap("click")
    bits = [lap("c%d" % i) for i in range(n_bits)]

    def carry(i):
        return conj_all(bits[j] for j in range(i))

    def lxor(a, b):
        return lnot(liff(a, b))

    start = land(liff(bits[0], click),
                 conj_all(lnot(b) for b in bits[1:]))
    inc = conj_all(liff(lnext(bits[i]), lxor(bits[i], carry(i)))
                   for i in range(n_bits))
    hold = conj_all(liff(lnext(b), b) for b in bits)
    step = land(limplies(lnext(click), inc),
                limplies(lnot(lnext(click)), hold))
    formula = land(start, lglobally(step))
    return LtlSpec(inputs=("click",),
                   outputs=tuple("c%d" % i for i in range(n_bits)),
                   formula=formula, core=formula, groups=None,
                   group_signals=(), symtab=None)
