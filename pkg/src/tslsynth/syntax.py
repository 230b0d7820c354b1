"""Syntax of temporal stream logic: terms, formulas, parsing, classification.

A formula talks about two kinds of atoms: predicate terms ``p(tau, ...)``
applied to function terms, and update terms ``[s <- tau]`` assigning a
function term to a signal.  Names are classified by use: a name applied at
formula position is a predicate, a name applied inside a term is a function,
a bare name at term position is a signal.  Signals that appear as update
targets are outputs, all remaining signals are inputs.

Concrete grammar (one formula, or `assume{...} guarantee{...}` sections with
`;`-separated formulas, `//` line comments):

    formula   :=  iff
    iff       :=  implies ('<->' implies)*            (right associative)
    implies   :=  or ('->' implies)?                  (right associative)
    or        :=  and ('||' and)*
    and       :=  temporal ('&&' temporal)*
    temporal  :=  unary (('U'|'R'|'W'|'A') temporal)?  (right associative)
    unary     :=  ('!'|'G'|'F'|'X') unary | atom
    atom      :=  'true' | 'false' | '(' formula ')' | update | ident '(' terms ')'
    update    :=  '[' ident '<-' term ']'
    term      :=  ident | ident '(' terms ')'

Identifiers match [A-Za-z][A-Za-z0-9]* (no underscores; proposition name
mangling depends on that).  The letters G F X U R W A act as operators at
formula positions only; inside terms and as update targets they are ordinary
names.  An application's opening parenthesis must follow the name with no
space in between; `X (...)` is the operator, `X()` is a nullary function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class ParseError(Exception):
    """Raised on malformed input; message carries line and column."""


class KindConflict(Exception):
    """A name is used in more than one role (signal/function/predicate)."""


class ArityConflict(Exception):
    """A function or predicate name is applied with two different arities."""


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Signal:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Apply:
    name: str
    args: tuple = ()

    def __repr__(self):
        return "%s(%s)" % (self.name, ", ".join(repr(a) for a in self.args))


# A function term is a Signal or an Apply.
FunctionTerm = (Signal, Apply)


@dataclass(frozen=True)
class Const:
    value: bool

    def __repr__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Update:
    target: str
    term: object


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Next:
    child: object


@dataclass(frozen=True)
class Until:
    left: object
    right: object


@dataclass(frozen=True)
class Release:
    left: object
    right: object


@dataclass(frozen=True)
class Finally_:
    child: object


@dataclass(frozen=True)
class Globally:
    child: object


@dataclass(frozen=True)
class WeakUntil:
    left: object
    right: object


@dataclass(frozen=True)
class AsSoonAs:
    left: object
    right: object


TT = Const(True)
FF = Const(False)

UNARY_OPS = {"G": Globally, "F": Finally_, "X": Next}
BINARY_OPS = {"U": Until, "R": Release, "W": WeakUntil, "A": AsSoonAs}
OPERATOR_LETTERS = set(UNARY_OPS) | set(BINARY_OPS)
KEYWORDS = {"true", "false", "assume", "guarantee"}

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")


def conj(formulas):
    """Left-fold a list of formulas with And; empty list gives true."""
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TT if out is None else out


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = ["<->", "->", "<-", "&&", "||", "!", "(", ")", "[", "]", "{", "}", ";", ","]


@dataclass
class Token:
    kind: str   # 'ident', 'apply', 'punct', 'eof'
    text: str
    line: int
    col: int


def tokenize(text):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            name = m.group(0)
            end = m.end()
            if end < n and text[end] == "(":
                tokens.append(Token("apply", name, line, col))
                col += end - i + 1
                i = end + 1
            else:
                tokens.append(Token("ident", name, line, col))
                col += end - i
                i = end
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError("unexpected character %r at line %d col %d" % (c, line, col))
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, msg):
        t = self.peek()
        raise ParseError("%s at line %d col %d (near %r)" % (msg, t.line, t.col, t.text))

    def expect(self, text):
        t = self.next()
        if t.text != text or t.kind == "eof":
            raise ParseError("expected %r at line %d col %d (got %r)" % (text, t.line, t.col, t.text))
        return t

    def at(self, text):
        return self.peek().text == text and self.peek().kind != "eof"

    # formulas -------------------------------------------------------------

    def formula(self):
        return self.iff()

    def iff(self):
        left = self.implies()
        if self.at("<->"):
            self.next()
            return Iff(left, self.iff())
        return left

    def implies(self):
        left = self.or_()
        if self.at("->"):
            self.next()
            return Implies(left, self.implies())
        return left

    def or_(self):
        left = self.and_()
        while self.at("||"):
            self.next()
            left = Or(left, self.and_())
        return left

    def and_(self):
        left = self.temporal()
        while self.at("&&"):
            self.next()
            left = And(left, self.temporal())
        return left

    def temporal(self):
        left = self.unary()
        t = self.peek()
        if t.kind == "ident" and t.text in BINARY_OPS:
            self.next()
            return BINARY_OPS[t.text](left, self.temporal())
        return left

    def unary(self):
        t = self.peek()
        if t.kind == "punct" and t.text == "!":
            self.next()
            return Not(self.unary())
        if t.kind == "ident" and t.text in UNARY_OPS:
            self.next()
            return UNARY_OPS[t.text](self.unary())
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "punct" and t.text == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "punct" and t.text == "[":
            return self.update()
        if t.kind == "ident" and t.text == "true":
            self.next()
            return TT
        if t.kind == "ident" and t.text == "false":
            self.next()
            return FF
        if t.kind == "apply":
            if t.text in OPERATOR_LETTERS:
                self.fail("operator letter %r applied as a predicate" % t.text)
            self.next()
            args = self.term_list()
            return Pred(t.text, tuple(args))
        if t.kind == "ident":
            self.fail("bare name %r at formula position (predicates need parentheses)" % t.text)
        self.fail("expected a formula")

    def update(self):
        self.expect("[")
        t = self.next()
        if t.kind != "ident":
            raise ParseError("expected signal name in update at line %d col %d" % (t.line, t.col))
        if t.text in KEYWORDS:
            raise ParseError("reserved word %r as update target at line %d" % (t.text, t.line))
        self.expect("<-")
        term = self.term()
        self.expect("]")
        return Update(t.text, term)

    # terms ----------------------------------------------------------------

    def term(self):
        t = self.next()
        if t.kind == "apply":
            return Apply(t.text, tuple(self.term_list()))
        if t.kind == "ident":
            if t.text in KEYWORDS:
                raise ParseError("reserved word %r inside a term at line %d" % (t.text, t.line))
            return Signal(t.text)
        raise ParseError("expected a term at line %d col %d (got %r)" % (t.line, t.col, t.text))

    def term_list(self):
        # called just after an 'apply' token, i.e. the '(' is already consumed
        if self.at(")"):
            self.next()
            return []
        args = [self.term()]
        while self.at(","):
            self.next()
            args.append(self.term())
        self.expect(")")
        return args


def parse_formula(text):
    """Parse a single bare formula (no sections). Returns the raw AST."""
    p = _Parser(tokenize(text))
    f = p.formula()
    if p.peek().kind != "eof":
        p.fail("trailing input after formula")
    return f


def parse_term(text):
    """Parse a function term, e.g. `increment(count)` or a bare signal name."""
    p = _Parser(tokenize(text))
    t = p.term()
    if p.peek().kind != "eof":
        p.fail("trailing input after term")
    return t


def parse_spec(text):
    """Parse a specification file and classify its names.

    A file is either one bare formula or a sequence of `assume { ... }` /
    `guarantee { ... }` sections holding `;`-terminated formulas.  Sections
    combine as (and of assumptions) -> (and of guarantees).  Returns
    (formula, symbol table).
    """
    tokens = tokenize(text)
    p = _Parser(tokens)
    first = p.peek()
    if first.kind == "eof":
        raise ParseError("empty specification")
    if first.kind == "ident" and first.text in ("assume", "guarantee"):
        assumes, guarantees = [], []
        while p.peek().kind != "eof":
            t = p.next()
            if t.kind != "ident" or t.text not in ("assume", "guarantee"):
                raise ParseError("expected 'assume' or 'guarantee' at line %d col %d" % (t.line, t.col))
            bucket = assumes if t.text == "assume" else guarantees
            p.expect("{")
            while not p.at("}"):
                bucket.append(p.formula())
                p.expect(";")
            p.expect("}")
        formula = conj(guarantees)
        if assumes:
            formula = Implies(conj(assumes), formula)
    else:
        formula = p.formula()
        if p.peek().kind != "eof":
            p.fail("trailing input after formula")
    return formula, classify(formula)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass
class SymbolTable:
    inputs: tuple = ()
    outputs: tuple = ()
    functions: dict = field(default_factory=dict)   # name -> arity
    predicates: dict = field(default_factory=dict)  # name -> arity

    def signals(self):
        return tuple(self.inputs) + tuple(self.outputs)


def _walk_formula(formula):
    """Yield every formula node, depth first."""
    stack = [formula]
    while stack:
        f = stack.pop()
        yield f
        for attr in ("child", "left", "right"):
            v = getattr(f, attr, None)
            if v is not None:
                stack.append(v)


def _walk_term(term):
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, Apply):
            stack.extend(t.args)


def atoms_of(formula):
    """Yield the Pred and Update atoms of a formula."""
    for node in _walk_formula(formula):
        if isinstance(node, (Pred, Update)):
            yield node


def classify(formula):
    """Derive the symbol table of a formula from how each name is used.

    Raises KindConflict if a name appears in two roles and ArityConflict if
    a function or predicate is applied with inconsistent arities.
    """
    functions, predicates, signals, outputs = {}, {}, set(), set()

    def see_function(name, arity):
        if name in functions and functions[name] != arity:
            raise ArityConflict("function %s used with arities %d and %d"
                                % (name, functions[name], arity))
        functions[name] = arity

    def see_term(term):
        if isinstance(term, Signal):
            signals.add(term.name)
        else:
            see_function(term.name, len(term.args))
            for a in term.args:
                see_term(a)

    for atom in atoms_of(formula):
        if isinstance(atom, Pred):
            if atom.name in predicates and predicates[atom.name] != len(atom.args):
                raise ArityConflict("predicate %s used with arities %d and %d"
                                    % (atom.name, predicates[atom.name], len(atom.args)))
            predicates[atom.name] = len(atom.args)
            for a in atom.args:
                see_term(a)
        else:
            outputs.add(atom.target)
            signals.add(atom.target)
            see_term(atom.term)

    for name in sorted(signals):
        if name in functions or name in predicates:
            raise KindConflict("name %s used both as a signal and as an applied name" % name)
    for name in sorted(functions):
        if name in predicates:
            raise KindConflict("name %s used both as a function and as a predicate" % name)

    inputs = tuple(sorted(signals - outputs))
    return SymbolTable(inputs=inputs, outputs=tuple(sorted(outputs)),
                       functions=functions, predicates=predicates)


# ---------------------------------------------------------------------------
# Desugaring to the core fragment
# ---------------------------------------------------------------------------

def desugar(formula):
    """Rewrite to the core fragment: atoms, true, Not, And, Next, Until.

    The derived operators unfold as
      false      -> ! true
      a || b     -> !(!a && !b)
      a -> b     -> !a || b
      a <-> b    -> (a -> b) && (b -> a)
      F a        -> true U a
      G a        -> !(true U !a)
      a R b      -> !(!a U !b)
      a W b      -> (a U b) || G a
      a A b      -> !b W (b && a)
    Idempotent: core formulas come back unchanged.
    """
    f = formula
    if isinstance(f, Const):
        return f if f.value else Not(TT)
    if isinstance(f, (Pred, Update)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.child))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return desugar(Or(Not(f.left), f.right))
    if isinstance(f, Iff):
        return desugar(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if isinstance(f, Next):
        return Next(desugar(f.child))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right))
    if isinstance(f, Finally_):
        return Until(TT, desugar(f.child))
    if isinstance(f, Globally):
        return Not(Until(TT, Not(desugar(f.child))))
    if isinstance(f, Release):
        return Not(Until(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, WeakUntil):
        return desugar(Or(Until(f.left, f.right), Globally(f.left)))
    if isinstance(f, AsSoonAs):
        return desugar(WeakUntil(Not(f.right), And(f.right, f.left)))
    raise TypeError("not a formula: %r" % (f,))


def subformula_count(formula):
    """Number of formula nodes; atoms (predicate/update/constant) count one."""
    return sum(1 for _ in _walk_formula(formula))


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_LEVEL_IFF, _LEVEL_IMPLIES, _LEVEL_OR, _LEVEL_AND, _LEVEL_TEMPORAL, _LEVEL_UNARY = 1, 2, 3, 4, 5, 6

_BINARY_LEVEL = {
    Iff: (_LEVEL_IFF, "<->", "right"),
    Implies: (_LEVEL_IMPLIES, "->", "right"),
    Or: (_LEVEL_OR, "||", "left"),
    And: (_LEVEL_AND, "&&", "left"),
    Until: (_LEVEL_TEMPORAL, "U", "right"),
    Release: (_LEVEL_TEMPORAL, "R", "right"),
    WeakUntil: (_LEVEL_TEMPORAL, "W", "right"),
    AsSoonAs: (_LEVEL_TEMPORAL, "A", "right"),
}

_UNARY_NAME = {Not: "!", Globally: "G", Finally_: "F", Next: "X"}


def pretty_term(term):
    if isinstance(term, Signal):
        return term.name
    return "%s(%s)" % (term.name, ", ".join(pretty_term(a) for a in term.args))


def pretty(formula):
    """Render a formula in the concrete syntax; parse(pretty(f)) == f."""
    return _pretty(formula, 0)


def _pretty(f, level):
    cls = type(f)
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Pred):
        return "%s(%s)" % (f.name, ", ".join(pretty_term(a) for a in f.args))
    if isinstance(f, Update):
        return "[%s <- %s]" % (f.target, pretty_term(f.term))
    if cls in _UNARY_NAME:
        op = _UNARY_NAME[cls]
        body = _pretty(f.child, _LEVEL_UNARY)
        text = op + ("" if op == "!" else " ") + body
        return "(" + text + ")" if level > _LEVEL_UNARY else text
    if cls in _BINARY_LEVEL:
        lvl, op, assoc = _BINARY_LEVEL[cls]
        lctx = lvl if assoc == "left" else lvl + 1
        rctx = lvl + 1 if assoc == "left" else lvl
        text = "%s %s %s" % (_pretty(f.left, lctx), op, _pretty(f.right, rctx))
        return "(" + text + ")" if level > lvl else text
    raise TypeError("not a formula: %r" % (f,))
