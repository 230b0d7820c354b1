"""Propositional linear temporal logic over named propositions.

This is the target language of the stream-logic encoding and the input of
the automaton construction.  Formulas are immutable trees with operators
tt, ff, atom, not, and, or, X (next), U (until), R (release); G and F are
builders on top.  `nnf` pushes negations to the atoms, `simplify` applies
cheap local rewrites, and `ltl_lasso_holds` evaluates a formula exactly on
an ultimately periodic word via least fixpoints on the loop.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, eq=False)
class Ltl:
    op: str            # 'tt' 'ff' 'ap' 'not' 'and' 'or' 'X' 'U' 'R'
    name: str = ""     # for 'ap'
    kids: tuple = ()

    # Formulas live in large frozensets during the tableau expansion, so
    # the recursive tuple hash is cached per node and equality bails out
    # on the hash before walking subtrees.
    def __post_init__(self):
        object.__setattr__(self, "_h", hash((self.op, self.name, self.kids)))

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Ltl):
            return NotImplemented
        return (self._h == other._h and self.op == other.op
                and self.name == other.name and self.kids == other.kids)

    def __repr__(self):
        return ltl_pretty(self)


LTT = Ltl("tt")
LFF = Ltl("ff")


def lap(name):
    return Ltl("ap", name=name)


def lnot(f):
    if f.op == "tt":
        return LFF
    if f.op == "ff":
        return LTT
    if f.op == "not":
        return f.kids[0]
    return Ltl("not", kids=(f,))


def land(a, b):
    if a.op == "ff" or b.op == "ff":
        return LFF
    if a.op == "tt":
        return b
    if b.op == "tt":
        return a
    if a == b:
        return a
    return Ltl("and", kids=(a, b))


def lor(a, b):
    if a.op == "tt" or b.op == "tt":
        return LTT
    if a.op == "ff":
        return b
    if b.op == "ff":
        return a
    if a == b:
        return a
    return Ltl("or", kids=(a, b))


def lnext(f):
    if f.op in ("tt", "ff"):
        return f
    return Ltl("X", kids=(f,))


def luntil(a, b):
    if b.op in ("tt", "ff"):
        return b
    if a.op == "ff":
        return b
    if a == b:
        return a
    return Ltl("U", kids=(a, b))


def lrelease(a, b):
    if b.op in ("tt", "ff"):
        return b
    if a.op == "tt":
        return b
    if a == b:
        return a
    return Ltl("R", kids=(a, b))


def lglobally(f):
    return lrelease(LFF, f)


def lfinally(f):
    return luntil(LTT, f)


def conj_all(formulas):
    out = LTT
    for f in formulas:
        out = land(out, f)
    return out


def disj_all(formulas):
    out = LFF
    for f in formulas:
        out = lor(out, f)
    return out


def limplies(a, b):
    return lor(lnot(a), b)


def liff(a, b):
    return land(limplies(a, b), limplies(b, a))


def nnf(f, negate=False):
    """Negation normal form; literals are 'ap' or not('ap')."""
    op = f.op
    if op == "tt":
        return LFF if negate else LTT
    if op == "ff":
        return LTT if negate else LFF
    if op == "ap":
        return Ltl("not", kids=(f,)) if negate else f
    if op == "not":
        return nnf(f.kids[0], not negate)
    if op == "and":
        a, b = (nnf(k, negate) for k in f.kids)
        return lor(a, b) if negate else land(a, b)
    if op == "or":
        a, b = (nnf(k, negate) for k in f.kids)
        return land(a, b) if negate else lor(a, b)
    if op == "X":
        return lnext(nnf(f.kids[0], negate))
    if op == "U":
        a, b = (nnf(k, negate) for k in f.kids)
        return lrelease(a, b) if negate else luntil(a, b)
    if op == "R":
        a, b = (nnf(k, negate) for k in f.kids)
        return luntil(a, b) if negate else lrelease(a, b)
    raise ValueError("unknown operator %r" % op)


def simplify(f):
    """Bottom-up pass through the smart constructors, plus a weak-until
    rewrite (a U b) | (ff R a) -> b R (b | a), which needs no acceptance
    bookkeeping in the automaton construction."""
    op = f.op
    if op in ("tt", "ff", "ap"):
        return f
    kids = tuple(simplify(k) for k in f.kids)
    if op == "not":
        return lnot(kids[0])
    if op == "and":
        return land(*kids)
    if op == "or":
        a, b = kids
        for x, y in ((a, b), (b, a)):
            if (x.op == "U" and y.op == "R" and y.kids[0] == LFF
                    and y.kids[1] == x.kids[0]):
                return lrelease(x.kids[1], lor(x.kids[1], x.kids[0]))
        return lor(a, b)
    if op == "X":
        return lnext(kids[0])
    if op == "U":
        return luntil(*kids)
    if op == "R":
        return lrelease(*kids)
    raise ValueError("unknown operator %r" % op)


def atoms(f):
    """The set of proposition names occurring in a formula."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.op == "ap":
            out.add(g.name)
        stack.extend(g.kids)
    return out


def temporal_depth(f):
    d = max((temporal_depth(k) for k in f.kids), default=0)
    return d + 1 if f.op in ("X", "U", "R") else d


_PREC = {"or": 1, "and": 2, "U": 3, "R": 3, "not": 4, "X": 4}


def ltl_pretty(f, level=0):
    if f.op == "tt":
        return "true"
    if f.op == "ff":
        return "false"
    if f.op == "ap":
        return f.name
    if f.op == "not":
        return "!" + ltl_pretty(f.kids[0], _PREC["not"])
    if f.op == "X":
        return "X " + ltl_pretty(f.kids[0], _PREC["X"])
    sym = {"and": "&&", "or": "||", "U": "U", "R": "R"}[f.op]
    lvl = _PREC[f.op]
    text = "%s %s %s" % (ltl_pretty(f.kids[0], lvl + 1), sym, ltl_pretty(f.kids[1], lvl))
    return "(" + text + ")" if level > lvl else text


# ---------------------------------------------------------------------------
# Exact evaluation on lasso words
# ---------------------------------------------------------------------------

def ltl_lasso_holds(formula, prefix, loop):
    """Whether `formula` holds at position 0 of the word prefix . loop^omega.

    `prefix` and `loop` are sequences of sets (or frozensets) of proposition
    names; the loop must be nonempty.  Until and release are solved as least
    and greatest fixpoints over the finitely many positions of the lasso,
    which is exact for every LTL formula.
    """
    if not loop:
        raise ValueError("loop must be nonempty")
    word = [frozenset(p) for p in prefix] + [frozenset(p) for p in loop]
    n = len(word)
    first = len(prefix)

    def succ(i):
        return i + 1 if i + 1 < n else first

    cache = {}

    def values(f):
        if f in cache:
            return cache[f]
        op = f.op
        if op == "tt":
            vals = [True] * n
        elif op == "ff":
            vals = [False] * n
        elif op == "ap":
            vals = [f.name in word[i] for i in range(n)]
        elif op == "not":
            vals = [not v for v in values(f.kids[0])]
        elif op == "and":
            a, b = values(f.kids[0]), values(f.kids[1])
            vals = [x and y for x, y in zip(a, b)]
        elif op == "or":
            a, b = values(f.kids[0]), values(f.kids[1])
            vals = [x or y for x, y in zip(a, b)]
        elif op == "X":
            a = values(f.kids[0])
            vals = [a[succ(i)] for i in range(n)]
        elif op == "U":
            a, b = values(f.kids[0]), values(f.kids[1])
            vals = [False] * n
            changed = True
            while changed:
                changed = False
                for i in range(n - 1, -1, -1):
                    v = b[i] or (a[i] and vals[succ(i)])
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
        elif op == "R":
            a, b = values(f.kids[0]), values(f.kids[1])
            vals = [True] * n
            changed = True
            while changed:
                changed = False
                for i in range(n - 1, -1, -1):
                    v = b[i] and (a[i] or vals[succ(i)])
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
        else:
            raise ValueError("unknown operator %r" % op)
        cache[f] = vals
        return vals

    return values(formula)[0]
