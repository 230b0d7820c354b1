"""Semantics of stream-logic formulas over lasso-shaped computations.

A computation assigns every time step a choice of update term per output
signal.  `eval_term` unfolds a term at a time step into a symbolic term over
input-signal leaves and initial values (the reserved function name `init`
marks an initial value, as in `init(count)`).  `eval_value` computes the
concrete value of a term under an interpretation, sampling each input at
the time step where the unfolding reads it; this matches executing the
generated reactive program step by step.

`tsl_holds` checks a formula on a lasso computation.  Update atoms are
compared syntactically and are exact (the loop makes their truth periodic);
predicate atoms are evaluated through the interpretation, so eventualities
over them can only be resolved within a finite horizon.  Beyond the horizon
an unresolved obligation raises in strict mode and counts as false in safe
mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import Signal, Apply, Const, Pred, Update, Not, And, Next, Until, desugar
from .ltl import ltl_lasso_holds  # noqa: F401  (re-exported; part of this layer's surface)

INIT_NAME = "init"


class MissingInterpretation(Exception):
    pass


class HorizonExceeded(Exception):
    """An eventuality over predicate atoms was still open at the horizon."""


@dataclass(frozen=True)
class Token:
    """Opaque constant produced for nullary uninterpreted functions."""
    name: str

    def __repr__(self):
        return "<%s>" % self.name


@dataclass(frozen=True)
class Opaque:
    """Structural value of an uninterpreted function application."""
    name: str
    args: tuple

    def __repr__(self):
        return "<%s %s>" % (self.name, " ".join(repr(a) for a in self.args))


# ---------------------------------------------------------------------------
# Computations
# ---------------------------------------------------------------------------

@dataclass
class LassoComputation:
    """Ultimately periodic computation: `prefix` then `loop` forever.

    Each step is a dict mapping every output signal to the function term the
    step assigns to it.
    """
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        if not self.loop:
            raise ValueError("loop must be nonempty")
        steps = list(self.prefix) + list(self.loop)
        keys = set(steps[0].keys())
        for s in steps[1:]:
            if set(s.keys()) != keys:
                raise ValueError("all steps must assign the same output signals")

    @property
    def outputs(self):
        return frozenset(self.loop[0].keys())

    def step(self, t):
        if t < len(self.prefix):
            return self.prefix[t]
        return self.loop[(t - len(self.prefix)) % len(self.loop)]

    def position(self, t):
        """Index into prefix+loop that time t reduces to."""
        p = len(self.prefix)
        return t if t < p else p + (t - p) % len(self.loop)


@dataclass
class FiniteComputation:
    """Growing computation used while executing a machine step by step.

    `steps` holds the update choices made so far; evaluating a term at time
    t only ever reads steps strictly before t, so the current step may still
    be undecided.
    """
    output_names: frozenset
    steps: list = field(default_factory=list)

    @property
    def outputs(self):
        return self.output_names

    def step(self, t):
        return self.steps[t]


def eval_term(comp, t, term):
    """Unfold a term at time t into a symbolic term.

    Input signals stay as leaves, an output signal becomes its previous
    step's term unfolded one step earlier, and at time 0 it becomes
    `init(s)`.  Only input leaves and init applications remain.
    """
    outputs = comp.outputs
    # R[s] is the unfolding of output s at the current time u of the sweep.
    r = {s: Apply(INIT_NAME, (Signal(s),)) for s in outputs}
    for u in range(t):
        step = comp.step(u)
        r = {s: _subst(step[s], r, outputs) for s in outputs}

    return _subst(term, r, outputs)


def _subst(term, r, outputs):
    if isinstance(term, Signal):
        return r[term.name] if term.name in outputs else term
    if term.name == INIT_NAME:
        return term
    return Apply(term.name, tuple(_subst(a, r, outputs) for a in term.args))


# ---------------------------------------------------------------------------
# Interpretations and concrete values
# ---------------------------------------------------------------------------

@dataclass
class Interpretation:
    functions: dict = field(default_factory=dict)    # name -> callable(*values)
    predicates: dict = field(default_factory=dict)   # name -> callable(*values) -> bool
    inits: dict = field(default_factory=dict)        # output name -> value
    input_streams: dict = field(default_factory=dict)  # input name -> source
    default_init = 0

    def input_at(self, name, t):
        src = self.input_streams.get(name)
        if src is None:
            raise MissingInterpretation("no input stream for %r" % name)
        if callable(src):
            return src(t)
        if isinstance(src, tuple) and len(src) == 2 and isinstance(src[0], (list, tuple)):
            pre, loop = src
            if t < len(pre):
                return pre[t]
            return loop[(t - len(pre)) % len(loop)]
        return src[t % len(src)]

    def init_of(self, name):
        return self.inits.get(name, self.default_init)

    def function(self, name, arity):
        fn = self.functions.get(name)
        if fn is None:
            raise MissingInterpretation("no function %r/%d" % (name, arity))
        return fn

    def predicate(self, name, arity):
        fn = self.predicates.get(name)
        if fn is None:
            raise MissingInterpretation("no predicate %r/%d" % (name, arity))
        return fn


def eval_value(comp, t, term, interp, _sig_cache=None):
    """Concrete value of a term at time t under an interpretation.

    Output signals read the value assigned one step earlier (their init at
    t=0); input signals sample their stream at the step where the unfolding
    reads them, matching step-by-step execution of the looped program.
    """
    cache = _sig_cache if _sig_cache is not None else {}
    outputs = comp.outputs

    def term_value(tm, u):
        if isinstance(tm, Signal):
            if tm.name in outputs:
                return signal_value(tm.name, u)
            return interp.input_at(tm.name, u)
        if tm.name == INIT_NAME:
            return interp.init_of(tm.args[0].name)
        fn = interp.function(tm.name, len(tm.args))
        return fn(*(term_value(a, u) for a in tm.args))

    def signal_value(s, u):
        key = (s, u)
        if key in cache:
            return cache[key]
        if u == 0:
            v = interp.init_of(s)
        else:
            v = term_value(comp.step(u - 1)[s], u - 1)
        cache[key] = v
        return v

    return term_value(term, t)


def _stable_bool(name, values):
    import hashlib
    digest = hashlib.md5(("%s|%r" % (name, values)).encode()).digest()
    return digest[0] % 2 == 0


def builtin_interpretation(input_streams=None, inits=None, total=True):
    """Interpretation with small-integer arithmetic.

    Functions: increment/decrement (+1/-1), add, sub1, nullary zero/one.
    Predicates: eq0, eq, lt, gt, leq, geq on integers (false off-domain).
    With `total` (the default), unknown names fall back to pure defaults:
    a nullary function becomes a stable opaque token, other functions build
    structural opaque values, and unknown predicates answer a deterministic
    hash-derived boolean, so any symbol table can be simulated.
    """

    def ints(*vals):
        return all(isinstance(v, int) and not isinstance(v, bool) for v in vals)

    functions = {
        "increment": lambda v: v + 1 if ints(v) else Opaque("increment", (v,)),
        "decrement": lambda v: v - 1 if ints(v) else Opaque("decrement", (v,)),
        "add": lambda a, b: a + b if ints(a, b) else Opaque("add", (a, b)),
        "sub1": lambda v: v - 1 if ints(v) else Opaque("sub1", (v,)),
        "zero": lambda: 0,
        "one": lambda: 1,
    }
    predicates = {
        "eq0": lambda v: ints(v) and v == 0,
        "eq": lambda a, b: a == b,
        "lt": lambda a, b: ints(a, b) and a < b,
        "gt": lambda a, b: ints(a, b) and a > b,
        "leq": lambda a, b: ints(a, b) and a <= b,
        "geq": lambda a, b: ints(a, b) and a >= b,
    }

    interp = Interpretation(functions=functions, predicates=predicates,
                            inits=dict(inits or {}),
                            input_streams=dict(input_streams or {}))
    if total:
        class _TotalFunctions(dict):
            def get(self, name, default=None):
                if name in self:
                    return dict.get(self, name)
                if name == INIT_NAME:
                    return None
                return _fallback_function(name)

        class _TotalPredicates(dict):
            def get(self, name, default=None):
                if name in self:
                    return dict.get(self, name)
                return lambda *vals, _n=name: _stable_bool(_n, vals)

        tf = _TotalFunctions(functions)
        tp = _TotalPredicates(predicates)
        interp.functions = tf
        interp.predicates = tp
    return interp


def _fallback_function(name):
    def fn(*vals):
        if not vals:
            return Token(name)
        return Opaque(name, tuple(vals))
    return fn


# ---------------------------------------------------------------------------
# Satisfaction on lasso computations
# ---------------------------------------------------------------------------

def _is_syntactic(f, cache):
    if id(f) in cache:
        return cache[id(f)]
    if isinstance(f, Pred):
        v = False
    elif isinstance(f, (Update, Const)):
        v = True
    else:
        v = all(_is_syntactic(k, cache)
                for k in (getattr(f, "child", None), getattr(f, "left", None),
                          getattr(f, "right", None)) if k is not None)
    cache[id(f)] = v
    return v


def tsl_holds(formula, comp, interp=None, mode="safe", horizon=None):
    """Check a formula on a lasso computation.

    Update atoms compare the step's assignment syntactically and never touch
    the interpretation.  Subformulas free of predicate atoms are decided
    exactly through the lasso's periodicity.  Predicate atoms are evaluated
    through `interp`; an until over them unresolved at the horizon (default
    |prefix| + 2|loop|) raises HorizonExceeded in strict mode and evaluates
    false in safe mode.
    """
    if mode not in ("safe", "strict"):
        raise ValueError("mode must be 'safe' or 'strict'")
    f = desugar(formula)
    horizon = horizon if horizon is not None else len(comp.prefix) + 2 * len(comp.loop)
    syn_cache = {}
    positions = len(comp.prefix) + len(comp.loop)
    first = len(comp.prefix)
    value_cache = {}
    memo = {}
    exact_cache = {}

    def atom_at_position(atom, i):
        # position index i < positions stands for every time reducing to it
        assigned = comp.step(i).get(atom.target)
        if assigned is None:
            raise ValueError("computation does not assign output %r" % atom.target)
        return assigned == atom.term

    def exact_values(g):
        # positional fixpoint evaluation for predicate-free subformulas
        if id(g) in exact_cache:
            return exact_cache[id(g)]
        if isinstance(g, Const):
            vals = [g.value] * positions
        elif isinstance(g, Update):
            vals = [atom_at_position(g, i) for i in range(positions)]
        elif isinstance(g, Not):
            vals = [not v for v in exact_values(g.child)]
        elif isinstance(g, And):
            a, b = exact_values(g.left), exact_values(g.right)
            vals = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = exact_values(g.child)
            vals = [a[i + 1 if i + 1 < positions else first] for i in range(positions)]
        elif isinstance(g, Until):
            a, b = exact_values(g.left), exact_values(g.right)
            vals = [False] * positions
            changed = True
            while changed:
                changed = False
                for i in range(positions - 1, -1, -1):
                    nxt = i + 1 if i + 1 < positions else first
                    v = b[i] or (a[i] and vals[nxt])
                    if v != vals[i]:
                        vals[i] = v
                        changed = True
        else:
            raise TypeError("not a core formula: %r" % (g,))
        exact_cache[id(g)] = vals
        return vals

    def pred_value(atom, t):
        if interp is None:
            raise MissingInterpretation("predicate %r needs an interpretation" % atom.name)
        pred = interp.predicate(atom.name, len(atom.args))
        vals = [eval_value(comp, t, a, interp, _sig_cache=value_cache) for a in atom.args]
        return bool(pred(*vals))

    def ev(g, t):
        if _is_syntactic(g, syn_cache):
            return exact_values(g)[comp.position(t)]
        key = (id(g), t)
        if key in memo:
            return memo[key]
        if isinstance(g, Pred):
            v = pred_value(g, t)
        elif isinstance(g, Not):
            v = not ev(g.child, t)
        elif isinstance(g, And):
            v = ev(g.left, t) and ev(g.right, t)
        elif isinstance(g, Next):
            v = ev(g.child, t + 1)
        elif isinstance(g, Until):
            v = None
            for t2 in range(t, horizon):
                if ev(g.right, t2):
                    v = True
                    break
                if not ev(g.left, t2):
                    v = False
                    break
            if v is None:
                if mode == "strict":
                    raise HorizonExceeded(
                        "until over predicate atoms unresolved at horizon %d" % horizon)
                v = False
        else:
            raise TypeError("not a core formula: %r" % (g,))
        memo[key] = v
        return v

    return ev(f, 0)
