"""Bounded synthesis from encoded LTL specifications.

The search interleaves two safety games per visit bound k.  The system game
plays the counting automaton of the negated objective: the environment picks
an input valuation, the system answers with an update choice, and the system
wins by keeping every run of the negated-objective automaton under k
accepting visits forever.  The dual game swaps the roles and the automaton:
the environment, moving first and blind to the current output (a Moore
machine), wins by keeping every run of the positive-objective automaton
bounded, which certifies unrealizability.  Realizable results are minimized
Mealy machines; both outcomes report the bound that decided them.  When
budgets run out before either side wins, the result is honestly unknown.

When the specification carries update groups, system moves range over
exactly-one-per-signal valuations only and both automata are built from the
objective without its exactly-one conjunct.  Every generated word then
satisfies that conjunct by construction, and dropping dominated moves
changes neither winner.  Move order prefers each signal's self update, so
machines idle unless the objective forces progress.
"""

from __future__ import annotations

import itertools
import json
import random
import time
import warnings
from dataclasses import dataclass, field

from .syntax import Update
from .ltl import lnot, nnf, ltl_lasso_holds
from .automata import ltl_to_nba, bounded_determinize, SINK, _sccs
from .encoding import unmangle, ExactlyOneViolation
from .cubes import cube_cover


class BudgetExceeded(Exception):
    pass


class MealyFormatError(Exception):
    pass


class TotalityError(MealyFormatError):
    """An imported transition table misses some input valuation."""


class InternalVerificationError(Exception):
    pass


@dataclass(frozen=True)
class Limits:
    max_k: int = 8
    max_states: int = 200_000
    seconds: float = None

    def deadline(self):
        return None if self.seconds is None else time.monotonic() + self.seconds


@dataclass
class MealyMachine:
    """Deterministic, input-total Mealy machine over proposition ids."""
    inputs: tuple
    outputs: tuple
    n_states: int
    init: int
    transitions: dict        # (state, input_mask) -> (output_mask, next_state)

    def input_mask(self, true_props):
        m = 0
        for i, p in enumerate(self.inputs):
            if p in true_props:
                m |= 1 << i
        return m

    def step(self, state, true_props):
        om, nxt = self.transitions[(state, self.input_mask(true_props))]
        emitted = {p for i, p in enumerate(self.outputs) if om >> i & 1}
        return emitted, nxt


@dataclass
class MooreMachine:
    """Environment strategy: emits an input valuation, then reads the output."""
    inputs: tuple
    outputs: tuple
    n_states: int
    init: int
    move: dict               # state -> input_mask
    delta: dict              # (state, output_mask) -> next_state

    def emit(self, state):
        m = self.move[state]
        return {p for i, p in enumerate(self.inputs) if m >> i & 1}


@dataclass
class SynthesisResult:
    status: str              # "realizable" | "unrealizable" | "unknown"
    machine: MealyMachine = None
    witness: MooreMachine = None
    k: int = None
    reason: str = ""


# ---------------------------------------------------------------------------
# Arena construction
# ---------------------------------------------------------------------------

def _input_masks(spec):
    offsets = [spec.props.index(p) for p in spec.inputs]
    masks = []
    for bits in range(1 << len(spec.inputs)):
        m = 0
        for i, off in enumerate(offsets):
            if bits >> i & 1:
                m |= 1 << off
        masks.append(m)
    return masks


def _output_moves(spec):
    """Output valuations the system may play, in preference order."""
    prop_bit = {p: i for i, p in enumerate(spec.props)}
    if spec.groups is None:
        offsets = [prop_bit[p] for p in spec.outputs]
        moves = []
        for bits in range(1 << len(spec.outputs)):
            m = 0
            for i, off in enumerate(offsets):
                if bits >> i & 1:
                    m |= 1 << off
            moves.append(m)
        return moves
    candidates = []
    for group in spec.groups:
        ordered = (group[-1],) + group[:-1]      # self update preferred
        candidates.append([1 << prop_bit[p] for p in ordered])
    moves = []
    for combo in itertools.product(*candidates):
        m = 0
        for bit in combo:
            m |= bit
        moves.append(m)
    return moves


@dataclass
class Arena:
    spec: object
    k: int
    input_masks: list
    moves: list
    nodes: list              # counting-automaton states, index = node id
    table: list              # table[node][input_idx][move_idx] = node id or -1


def _build_arena(spec, aut, limits, deadline):
    input_masks = _input_masks(spec)
    moves = _output_moves(spec)

    init = aut.initial
    if init is SINK:
        return None
    index = {init: 0}
    nodes = [init]
    table = []
    i = 0
    while i < len(nodes):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("time limit during arena construction")
        g = nodes[i]
        rows = []
        for im in input_masks:
            row = []
            for om in moves:
                succ = aut.step(g, im | om)
                if succ is SINK:
                    row.append(-1)
                    continue
                j = index.get(succ)
                if j is None:
                    j = index[succ] = len(nodes)
                    nodes.append(succ)
                    if len(nodes) > limits.max_states:
                        raise BudgetExceeded("state limit during arena construction")
                row.append(j)
            rows.append(row)
        table.append(rows)
        i += 1
    return Arena(spec, aut.k, input_masks, moves, nodes, table)


# ---------------------------------------------------------------------------
# Game solving
# ---------------------------------------------------------------------------

def _solve_game(arena, system_moves_second=True):
    """Winning region of a safety game on the arena, as a set of node ids.

    With system_moves_second the protagonist resolves the inner choice
    (for all inputs, exists output); otherwise it resolves the outer one
    (exists input, for all outputs), i.e. the environment's dual game.
    """
    n = len(arena.nodes)
    alive = [True] * n
    changed = True
    while changed:
        changed = False
        for g in range(n):
            if not alive[g]:
                continue
            rows = arena.table[g]
            if system_moves_second:
                ok = all(any(s >= 0 and alive[s] for s in row) for row in rows)
            else:
                ok = any(all(s >= 0 and alive[s] for s in row) for row in rows)
            if not ok:
                alive[g] = False
                changed = True
    return {g for g in range(n) if alive[g]}


def _extract_mealy(arena, winning):
    """Positional system strategy restricted to its reachable states."""
    spec = arena.spec
    prop_bit = {p: i for i, p in enumerate(spec.props)}
    in_bits = [prop_bit[p] for p in spec.inputs]
    out_bits = [prop_bit[p] for p in spec.outputs]

    def compress(mask, bits):
        m = 0
        for i, b in enumerate(bits):
            if mask >> b & 1:
                m |= 1 << i
        return m

    index = {0: 0}
    order = [0]
    transitions = {}
    pos = 0
    while pos < len(order):
        g = order[pos]
        rows = arena.table[g]
        for ii, im in enumerate(arena.input_masks):
            choice = None
            for mi, om in enumerate(arena.moves):
                s = rows[ii][mi]
                if s >= 0 and s in winning:
                    choice = (om, s)
                    break
            if choice is None:
                raise InternalVerificationError("winning region not closed")
            om, s = choice
            if s not in index:
                index[s] = len(order)
                order.append(s)
            transitions[(index[g], compress(im, in_bits))] = (
                compress(om, out_bits), index[s])
        pos += 1
    return MealyMachine(inputs=tuple(spec.inputs), outputs=tuple(spec.outputs),
                        n_states=len(order), init=0, transitions=transitions)


def _extract_moore(arena, winning):
    spec = arena.spec
    prop_bit = {p: i for i, p in enumerate(spec.props)}
    in_bits = [prop_bit[p] for p in spec.inputs]
    out_bits = [prop_bit[p] for p in spec.outputs]

    def compress(mask, bits):
        m = 0
        for i, b in enumerate(bits):
            if mask >> b & 1:
                m |= 1 << i
        return m

    index = {0: 0}
    order = [0]
    move = {}
    delta = {}
    pos = 0
    while pos < len(order):
        g = order[pos]
        rows = arena.table[g]
        pick = None
        for ii in range(len(arena.input_masks)):
            if all(s >= 0 and s in winning for s in rows[ii]):
                pick = ii
                break
        if pick is None:
            raise InternalVerificationError("environment region not closed")
        move[index[g]] = compress(arena.input_masks[pick], in_bits)
        for mi, om in enumerate(arena.moves):
            s = rows[pick][mi]
            if s not in index:
                index[s] = len(order)
                order.append(s)
            delta[(index[g], compress(om, out_bits))] = index[s]
        pos += 1
    return MooreMachine(inputs=tuple(spec.inputs), outputs=tuple(spec.outputs),
                        n_states=len(order), init=0, move=move, delta=delta)


@dataclass(frozen=True)
class _GameSpec:
    inputs: tuple
    outputs: tuple
    props: tuple
    groups: object = None


def solve_safety_game(aut, inputs, outputs, limits=Limits()):
    """Solve a counting-automaton safety game under the Mealy convention.

    `inputs` and `outputs` must partition the automaton's propositions.
    Each round the environment fixes the input bits, the system answers with
    any output valuation, and the letter drives the automaton; the system
    must avoid the sink forever.  Returns a positional winning strategy as a
    Mealy machine, or None when the environment wins.
    """
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    props = aut.nba.props
    if set(inputs) & set(outputs) or sorted(inputs + outputs) != sorted(props):
        raise ValueError("inputs and outputs must partition the propositions")
    arena = _build_arena(_GameSpec(inputs, outputs, props), aut,
                         limits, limits.deadline())
    if arena is None:
        return None
    winning = _solve_game(arena, system_moves_second=True)
    if 0 not in winning:
        return None
    return _extract_mealy(arena, winning)


# ---------------------------------------------------------------------------
# Mealy machine operations
# ---------------------------------------------------------------------------

def minimize_mealy(machine):
    """Quotient by the classic partition refinement on observable behavior."""
    n_in = 1 << len(machine.inputs)
    block = [0] * machine.n_states
    sigs = {}
    for q in range(machine.n_states):
        sig = tuple(machine.transitions[(q, im)][0] for im in range(n_in))
        block[q] = sigs.setdefault(sig, len(sigs))
    while True:
        sigs = {}
        new_block = [0] * machine.n_states
        for q in range(machine.n_states):
            sig = (block[q],
                   tuple(block[machine.transitions[(q, im)][1]] for im in range(n_in)))
            new_block[q] = sigs.setdefault(sig, len(sigs))
        if new_block == block:
            break
        block = new_block

    # renumber blocks by breadth-first reachability from the initial block
    rep = {}
    for q in range(machine.n_states):
        rep.setdefault(block[q], q)
    remap = {}
    queue = [block[machine.init]]
    remap[block[machine.init]] = 0
    qi = 0
    while qi < len(queue):
        b = queue[qi]
        q = rep[b]
        for im in range(n_in):
            nb = block[machine.transitions[(q, im)][1]]
            if nb not in remap:
                remap[nb] = len(remap)
                queue.append(nb)
        qi += 1
    transitions = {}
    for b, new_id in remap.items():
        q = rep[b]
        for im in range(n_in):
            om, nxt = machine.transitions[(q, im)]
            transitions[(new_id, im)] = (om, remap[block[nxt]])
    return MealyMachine(inputs=machine.inputs, outputs=machine.outputs,
                        n_states=len(remap), init=0, transitions=transitions)


def _violation_reachable(machine, avoid_nba):
    """True when the product with the violation automaton has a fair cycle."""
    in_pos = [avoid_nba.props.index(p) for p in machine.inputs]
    out_pos = [avoid_nba.props.index(p) for p in machine.outputs]
    n_in = 1 << len(machine.inputs)

    letters = {}
    for (q, im), (om, _) in machine.transitions.items():
        m = 0
        for i, pos in enumerate(in_pos):
            if im >> i & 1:
                m |= 1 << pos
        for i, pos in enumerate(out_pos):
            if om >> i & 1:
                m |= 1 << pos
        letters[(q, im)] = m

    index = {}
    nodes = []
    succs = []

    def nid(node):
        i = index.get(node)
        if i is None:
            i = index[node] = len(nodes)
            nodes.append(node)
            succs.append([])
        return i

    for s in sorted(avoid_nba.initial):
        nid((machine.init, s))
    i = 0
    while i < len(nodes):
        q, s = nodes[i]
        for im in range(n_in):
            _, q2 = machine.transitions[(q, im)]
            for s2 in avoid_nba.successors(s, letters[(q, im)]):
                succs[i].append(nid((q2, s2)))
        i += 1

    for comp in _sccs(len(nodes), succs):
        if len(comp) == 1 and comp[0] not in succs[comp[0]]:
            continue
        if any(nodes[v][1] in avoid_nba.accepting for v in comp):
            return True
    return False


def _merge_states(machine, keep, drop):
    transitions = {}
    for (q, im), (om, nxt) in machine.transitions.items():
        transitions[(q, im)] = (om, keep if nxt == drop else nxt)
    init = keep if machine.init == drop else machine.init
    return MealyMachine(inputs=machine.inputs, outputs=machine.outputs,
                        n_states=machine.n_states, init=init,
                        transitions=transitions)


def reduce_mealy(machine, avoid_nba, deadline=None):
    """Shrink a machine by merging states the exact product check allows.

    Redirecting every edge into `drop` towards `keep` discards drop's own
    rows, so the candidate can behave differently; it is kept only when the
    product with the violation automaton stays free of fair cycles.  Greedy
    and order-dependent, but deterministic.
    """
    while True:
        merged = False
        for keep in range(machine.n_states):
            for drop in range(machine.n_states):
                if keep == drop:
                    continue
                if deadline is not None and time.monotonic() > deadline:
                    return machine
                candidate = _merge_states(machine, keep, drop)
                if not _violation_reachable(candidate, avoid_nba):
                    machine = minimize_mealy(candidate)
                    merged = True
                    break
            if merged:
                break
        if not merged:
            return machine


def export_mealy(machine):
    """JSON-ready dict; transition guards are compressed input cubes."""
    n_in = len(machine.inputs)
    rows = []
    for q in range(machine.n_states):
        by_target = {}
        for im in range(1 << n_in):
            om, nxt = machine.transitions[(q, im)]
            by_target.setdefault((om, nxt), []).append(im)
        for (om, nxt), masks in sorted(by_target.items(), key=lambda kv: min(kv[1])):
            for care, value in cube_cover(masks, n_in):
                given = {}
                for i, p in enumerate(machine.inputs):
                    if care >> i & 1:
                        given[p] = bool(value >> i & 1)
                rows.append({
                    "from": q,
                    "given": given,
                    "emit": [p for i, p in enumerate(machine.outputs) if om >> i & 1],
                    "to": nxt,
                })
    return {"inputs": list(machine.inputs), "outputs": list(machine.outputs),
            "states": machine.n_states, "init": machine.init,
            "transitions": rows}


def import_mealy(data, permissive=False):
    """Parse and validate the JSON form produced by export_mealy.

    Guards in each state must be pairwise disjoint and jointly cover every
    input valuation; emitted ids must be declared outputs.  When every
    output id decodes to an update term, each transition must emit exactly
    one update per target signal; permissive mode downgrades that check to
    a warning.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        inputs = tuple(data["inputs"])
        outputs = tuple(data["outputs"])
        n_states = int(data["states"])
        init = int(data["init"])
        rows = data["transitions"]
    except (KeyError, TypeError, ValueError) as e:
        raise MealyFormatError("missing or malformed field: %s" % e)
    if n_states < 1:
        raise MealyFormatError("machine needs at least one state")
    if not 0 <= init < n_states:
        raise MealyFormatError("initial state out of range")
    in_bit = {p: i for i, p in enumerate(inputs)}
    out_bit = {p: i for i, p in enumerate(outputs)}
    if len(in_bit) != len(inputs) or len(out_bit) != len(outputs):
        raise MealyFormatError("duplicate proposition id")
    n_in = len(inputs)

    transitions = {}
    for row in rows:
        try:
            q = int(row["from"])
            nxt = int(row["to"])
            given = row["given"]
            emit = row["emit"]
        except (KeyError, TypeError, ValueError) as e:
            raise MealyFormatError("malformed transition: %s" % e)
        if not (0 <= q < n_states and 0 <= nxt < n_states):
            raise MealyFormatError("transition state out of range")
        care = value = 0
        for p, b in given.items():
            if p not in in_bit:
                raise MealyFormatError("guard mentions unknown input %r" % p)
            if not isinstance(b, bool):
                raise MealyFormatError("guard value for %r must be a bool" % p)
            care |= 1 << in_bit[p]
            if b:
                value |= 1 << in_bit[p]
        om = 0
        for p in emit:
            if p not in out_bit:
                raise MealyFormatError("emit mentions unknown output %r" % p)
            om |= 1 << out_bit[p]
        free = [i for i in range(n_in) if not care >> i & 1]
        for bits in range(1 << len(free)):
            im = value
            for i, b in enumerate(free):
                if bits >> i & 1:
                    im |= 1 << b
            if (q, im) in transitions:
                raise MealyFormatError(
                    "state %d has overlapping guards at input %d" % (q, im))
            transitions[(q, im)] = (om, nxt)
    for q in range(n_states):
        for im in range(1 << n_in):
            if (q, im) not in transitions:
                raise TotalityError(
                    "state %d has no transition for input %d" % (q, im))

    signal_bits = {}
    for p in outputs:
        try:
            atom = unmangle(p)
        except ValueError:
            signal_bits = None
            break
        if not isinstance(atom, Update):
            signal_bits = None
            break
        signal_bits.setdefault(atom.target, []).append(out_bit[p])
    if signal_bits:
        for (q, im), (om, _) in sorted(transitions.items()):
            for s, bits in sorted(signal_bits.items()):
                chosen = sum(om >> b & 1 for b in bits)
                if chosen != 1:
                    msg = ("state %d, input %d: %d updates for signal %r"
                           % (q, im, chosen, s))
                    if not permissive:
                        raise ExactlyOneViolation(msg)
                    warnings.warn(msg)
    return MealyMachine(inputs=inputs, outputs=outputs, n_states=n_states,
                        init=init, transitions=transitions)


def machine_lasso_word(machine, in_prefix, in_loop):
    """Ultimately periodic word produced against an input lasso.

    Inputs are sequences of sets of true input ids; the result is a pair of
    letter lists (prefix, loop), each letter the set of all true ids.
    """
    if not in_loop:
        raise ValueError("input loop must be nonempty")
    masks_pre = [machine.input_mask(s) for s in in_prefix]
    masks_loop = [machine.input_mask(s) for s in in_loop]

    def letter(im, om):
        trues = {p for i, p in enumerate(machine.inputs) if im >> i & 1}
        trues |= {p for i, p in enumerate(machine.outputs) if om >> i & 1}
        return frozenset(trues)

    word = []
    state = machine.init
    for im in masks_pre:
        om, state = machine.transitions[(state, im)]
        word.append(letter(im, om))
    seen = {}
    pos = 0
    while (state, pos) not in seen:
        seen[(state, pos)] = len(word)
        im = masks_loop[pos]
        om, state = machine.transitions[(state, im)]
        word.append(letter(im, om))
        pos = (pos + 1) % len(masks_loop)
    start = seen[(state, pos)]
    return word[:start], word[start:]


# ---------------------------------------------------------------------------
# Top level
# ---------------------------------------------------------------------------

_VERIFY_SAMPLES = 100


def _self_check(machine, spec, rng):
    """Replay random input lassos and check the produced words."""
    n = len(spec.inputs)
    for _ in range(_VERIFY_SAMPLES):
        pre = [frozenset(p for p in spec.inputs if rng.random() < 0.5)
               for _ in range(rng.randrange(0, 4))]
        loop = [frozenset(p for p in spec.inputs if rng.random() < 0.5)
                for _ in range(rng.randrange(1, 5))]
        wp, wl = machine_lasso_word(machine, pre, loop)
        if not ltl_lasso_holds(spec.formula, wp, wl):
            raise InternalVerificationError(
                "machine violates objective on inputs %r %r" % (pre, loop))


def synthesize(spec, limits=Limits()):
    """Decide the encoded specification by increasing visit bounds.

    For each k the system game runs first, then the environment game; the
    first side to win settles the answer.  Exhausting max_k, the state
    budget, or the time budget yields status "unknown".
    """
    deadline = limits.deadline()
    neg_nba = ltl_to_nba(lnot(spec.core), spec.props)
    pos_nba = None
    rng = random.Random(0x7517)

    sys_open = env_open = True
    reasons = []
    for k in range(limits.max_k + 1):
        if not (sys_open or env_open):
            break
        if sys_open:
            try:
                arena = _build_arena(spec, bounded_determinize(neg_nba, k),
                                     limits, deadline)
                if arena is None:
                    sys_open = False
                else:
                    winning = _solve_game(arena, system_moves_second=True)
                    if 0 in winning:
                        machine = minimize_mealy(_extract_mealy(arena, winning))
                        machine = reduce_mealy(machine, neg_nba, deadline)
                        _self_check(machine, spec, rng)
                        return SynthesisResult(status="realizable",
                                               machine=machine, k=k)
            except BudgetExceeded as e:
                sys_open = False
                reasons.append("system side at k=%d: %s" % (k, e))
        if env_open:
            try:
                if pos_nba is None:
                    pos_nba = ltl_to_nba(spec.core, spec.props)
                arena = _build_arena(spec, bounded_determinize(pos_nba, k),
                                     limits, deadline)
                if arena is None:
                    env_open = False
                else:
                    winning = _solve_game(arena, system_moves_second=False)
                    if 0 in winning:
                        witness = _extract_moore(arena, winning)
                        return SynthesisResult(status="unrealizable",
                                               witness=witness, k=k)
            except BudgetExceeded as e:
                env_open = False
                reasons.append("environment side at k=%d: %s" % (k, e))
    if not reasons:
        reasons.append("no side won up to k=%d" % limits.max_k)
    return SynthesisResult(status="unknown", reason="; ".join(reasons))


def check_unrealizable(spec, limits=Limits()):
    """Environment side only; returns a SynthesisResult."""
    deadline = limits.deadline()
    pos_nba = ltl_to_nba(spec.core, spec.props)
    for k in range(limits.max_k + 1):
        try:
            arena = _build_arena(spec, bounded_determinize(pos_nba, k),
                                 limits, deadline)
        except BudgetExceeded as e:
            return SynthesisResult(status="unknown",
                                   reason="environment side at k=%d: %s" % (k, e))
        if arena is None:
            break
        winning = _solve_game(arena, system_moves_second=False)
        if 0 in winning:
            witness = _extract_moore(arena, winning)
            return SynthesisResult(status="unrealizable", witness=witness, k=k)
    return SynthesisResult(status="unknown",
                           reason="environment never wins up to k=%d" % limits.max_k)
