"""LTL to Buechi automata and the counting safety approximation.

The pipeline is the classic tableau route: negation normal form, on-the-fly
node expansion into a generalized Buechi automaton (one acceptance set per
until subformula), counter-based degeneralization, then a bisimulation
quotient and a trim to states that can still reach a live accepting cycle.

Transitions carry cubes over a fixed proposition order: a pair of bitmasks
(care, value) matches letter m iff m & care == value.  Missing transitions
mean the run dies, which for nondeterministic automata loses nothing.

`bounded_determinize` turns the Buechi automaton for a negated objective
into a deterministic safety automaton: a state maps every live automaton
state to the maximal number of accepting visits along any run reaching it,
and any count above the bound collapses the state to the sink.  Words kept
safe form an under-approximation of the complement language that grows with
the bound and is exact once the bound passes the product of machine size
and automaton size.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .ltl import Ltl, LTT, LFF, lnot, nnf, simplify, ltl_pretty


@dataclass(frozen=True)
class Nba:
    """Nondeterministic Buechi automaton over cube-labeled transitions."""
    props: tuple                 # proposition ids, index = bit position
    n_states: int
    initial: frozenset
    accepting: frozenset
    edges: tuple                 # edges[q] = tuple of (care, value, dst)

    def mask(self, true_props):
        m = 0
        for i, p in enumerate(self.props):
            if p in true_props:
                m |= 1 << i
        return m

    def successors(self, state, letter_mask):
        return [dst for care, val, dst in self.edges[state]
                if letter_mask & care == val]


# ---------------------------------------------------------------------------
# Tableau expansion (generalized Buechi)
# ---------------------------------------------------------------------------

def _key_fn():
    # Deterministic formulas (literals, and, X) are processed before any
    # branching or/U/R: the completed (old, next) set is order-independent,
    # but branching late keeps the intermediate tree small.
    cache = {}

    def key(f):
        k = cache.get(id(f))
        if k is None:
            rank = 1 if f.op in ("or", "U", "R") else 0
            k = cache[id(f)] = (rank, ltl_pretty(f))
        return k
    return key


def _expand(formula):
    """Tableau nodes for an NNF formula.

    Returns (nodes, untils) where nodes maps id -> (old, next, incoming) and
    id 0 is the virtual initial node.  `old` keeps every processed
    subformula so acceptance per until u is "u absent or u's right present".

    Each subformula's one-step branches (old additions, next obligations)
    are computed once and combined per node; branch choices commute with
    processing order, so the completed (old, next) set is the same one a
    sequential expansion would produce.
    """
    key = _key_fn()
    empty = frozenset()
    unit = frozenset({(empty, empty)})
    memo = {}
    neg_cache = {}

    def neg(lit):
        v = neg_cache.get(id(lit))
        if v is None:
            v = neg_cache[id(lit)] = lnot(lit)
        return v

    def combine(first, second):
        out = set()
        for oa, na in first:
            for ob, nb in second:
                small, big = (oa, ob) if len(oa) <= len(ob) else (ob, oa)
                for lit in small:
                    if lit.op in ("ap", "not") and neg(lit) in big:
                        break
                else:
                    out.add((oa | ob, na | nb))
        return frozenset(out)

    def tag(f, entries):
        return frozenset((o | {f}, n) for o, n in entries)

    def choices(f):
        r = memo.get(f)
        if r is not None:
            return r
        op = f.op
        if op == "ff":
            r = empty
        elif op == "tt":
            r = unit
        elif op in ("ap", "not"):
            r = frozenset({(frozenset({f}), empty)})
        elif op == "X":
            r = frozenset({(frozenset({f}), frozenset({f.kids[0]}))})
        elif op == "and":
            r = tag(f, combine(choices(f.kids[0]), choices(f.kids[1])))
        elif op == "or":
            r = tag(f, choices(f.kids[0]) | choices(f.kids[1]))
        elif op == "U":
            postponed = frozenset({(empty, frozenset({f}))})
            r = tag(f, choices(f.kids[1])
                    | combine(choices(f.kids[0]), postponed))
        elif op == "R":
            postponed = frozenset({(empty, frozenset({f}))})
            r = tag(f, combine(choices(f.kids[1]),
                               choices(f.kids[0]) | postponed))
        else:
            raise ValueError("unexpected op %r" % op)
        memo[f] = r
        return r

    seed_memo = {}

    def expand_seed(next_set):
        r = seed_memo.get(next_set)
        if r is None:
            r = unit
            for f in sorted(next_set, key=key):
                r = combine(r, choices(f))
                if not r:
                    break
            seed_memo[next_set] = r
        return r

    def sig_key(sig):
        return (sorted(key(f) for f in sig[0]),
                sorted(key(f) for f in sig[1]))

    done = {}            # (old, next) -> id
    store = {}           # id -> (old, next, incoming:set)
    pending = deque()

    def settle(combined, src):
        for sig in sorted(combined, key=sig_key):
            nid = done.get(sig)
            if nid is None:
                nid = done[sig] = len(done) + 1
                store[nid] = (sig[0], sig[1], {src})
                pending.append(nid)
            else:
                store[nid][2].add(src)

    settle(choices(formula), 0)
    while pending:
        nid = pending.popleft()
        settle(expand_seed(store[nid][1]), nid)

    untils = sorted({f for old, _, _ in store.values() for f in old if f.op == "U"},
                    key=key)
    return store, untils


def _old_to_cube(old, prop_index):
    care = val = 0
    for f in old:
        if f.op == "ap":
            b = 1 << prop_index[f.name]
            care |= b
            val |= b
        elif f.op == "not":
            care |= 1 << prop_index[f.kids[0].name]
    return care, val


def ltl_to_nba(formula, props, max_props=20):
    """Buechi automaton accepting exactly the formula's models.

    `props` fixes the proposition order for transition cubes; the formula
    may only mention propositions from it.  More than `max_props`
    propositions are rejected, since downstream consumers enumerate
    valuations; transitions themselves stay cube-compressed.
    """
    if len(props) > max_props:
        raise ValueError("%d propositions exceed the limit of %d"
                         % (len(props), max_props))
    f = simplify(nnf(formula))
    prop_index = {p: i for i, p in enumerate(props)}
    for name in _ltl_atoms(f):
        if name not in prop_index:
            raise ValueError("formula proposition %r not among %r" % (name, props))

    if f == LFF:
        return Nba(tuple(props), 1, frozenset({0}), frozenset(), ((),))
    store, untils = _expand(f)

    node_ids = [0] + sorted(store)
    # GBA: one acceptance set per until; the virtual initial node (visited
    # once) is kept out of every set so counting constructions start at zero.
    acc_sets = []
    for u in untils:
        acc_sets.append(frozenset(
            nid for nid in store
            if u not in store[nid][0] or u.kids[1] in store[nid][0]))

    edges_by_src = {nid: [] for nid in node_ids}
    for nid in sorted(store):
        old, _, incoming = store[nid]
        cube = _old_to_cube(old, prop_index)
        for src in sorted(incoming):
            edges_by_src[src].append((cube[0], cube[1], nid))

    nba = _degeneralize(node_ids, edges_by_src, acc_sets, tuple(props))
    nba = _quotient_bisim(nba)
    return _trim_live(nba)


def _ltl_atoms(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g.op == "ap":
            out.add(g.name)
        stack.extend(g.kids)
    return out


def _degeneralize(node_ids, edges_by_src, acc_sets, props):
    m = len(acc_sets)

    def advance(level, q):
        if level == m:
            level = 0
        while level < m and q in acc_sets[level]:
            level += 1
        return level

    if m == 0:
        # every state accepting except the once-visited initial node
        index = {nid: i for i, nid in enumerate(node_ids)}
        edges = tuple(tuple((c, v, index[d]) for c, v, d in edges_by_src[nid])
                      for nid in node_ids)
        return Nba(props, len(node_ids), frozenset({index[0]}),
                   frozenset(index[nid] for nid in node_ids if nid != 0), edges)

    start = (0, advance(0, 0))
    index = {start: 0}
    order = [start]
    out_edges = {start: []}
    i = 0
    while i < len(order):
        nid, level = order[i]
        for care, val, dst in edges_by_src[nid]:
            nlevel = advance(level, dst)
            key = (dst, nlevel)
            if key not in index:
                index[key] = len(order)
                order.append(key)
                out_edges[key] = []
            out_edges[(nid, level)].append((care, val, index[key]))
        i += 1
    accepting = frozenset(index[k] for k in order if k[1] == m and k[0] != 0)
    edges = tuple(tuple(out_edges[k]) for k in order)
    return Nba(props, len(order), frozenset({0}), accepting, edges)


# ---------------------------------------------------------------------------
# Reduction: bisimulation quotient, then trim to live states
# ---------------------------------------------------------------------------

def _quotient_bisim(nba):
    block = [1 if q in nba.accepting else 0 for q in range(nba.n_states)]
    while True:
        sigs = {}
        new_block = [0] * nba.n_states
        for q in range(nba.n_states):
            sig = (block[q],
                   frozenset((c, v, block[d]) for c, v, d in nba.edges[q]))
            if sig not in sigs:
                sigs[sig] = len(sigs)
            new_block[q] = sigs[sig]
        if new_block == block:
            break
        block = new_block

    n_blocks = max(block) + 1 if nba.n_states else 0
    rep_edges = [None] * n_blocks
    for q in range(nba.n_states):
        if rep_edges[block[q]] is None:
            rep_edges[block[q]] = sorted({(c, v, block[d]) for c, v, d in nba.edges[q]})
    initial = frozenset(block[q] for q in nba.initial)
    accepting = frozenset(block[q] for q in nba.accepting)
    return _renumber(Nba(nba.props, n_blocks, initial, accepting,
                         tuple(tuple(e) for e in rep_edges)))


def _sccs(n_states, succ):
    """Tarjan over explicit successor lists, iterative."""
    index = [0]
    idx = [-1] * n_states
    low = [0] * n_states
    on_stack = [False] * n_states
    stack = []
    comps = []
    for root in range(n_states):
        if idx[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                idx[v] = low[v] = index[0]
                index[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for j in range(pi, len(succ[v])):
                w = succ[v][j]
                if idx[w] == -1:
                    work[-1] = (v, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], idx[w])
            if advanced:
                continue
            work.pop()
            if low[v] == idx[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comps


def _trim_live(nba):
    succ = [sorted({d for _, _, d in nba.edges[q]}) for q in range(nba.n_states)]
    reach = set()
    frontier = list(nba.initial)
    while frontier:
        q = frontier.pop()
        if q in reach:
            continue
        reach.add(q)
        frontier.extend(succ[q])

    comps = _sccs(nba.n_states, succ)
    live = set()
    for comp in comps:
        cs = set(comp)
        has_edge = any(d in cs for q in comp for d in succ[q]) if len(comp) == 1 else True
        if has_edge and cs & nba.accepting:
            live |= cs
    # states that can reach a live component
    pred = [[] for _ in range(nba.n_states)]
    for q in range(nba.n_states):
        for d in succ[q]:
            pred[d].append(q)
    can = set(live)
    frontier = list(live)
    while frontier:
        q = frontier.pop()
        for p in pred[q]:
            if p not in can:
                can.add(p)
                frontier.append(p)

    keep = reach & can
    if not keep:
        return Nba(nba.props, 0, frozenset(), frozenset(), ())
    remap = {}
    for q in sorted(keep):
        remap[q] = len(remap)
    edges = tuple(tuple((c, v, remap[d]) for c, v, d in nba.edges[q] if d in keep)
                  for q in sorted(keep))
    return _renumber(Nba(nba.props, len(keep),
                         frozenset(remap[q] for q in nba.initial if q in keep),
                         frozenset(remap[q] for q in nba.accepting if q in keep),
                         edges))


def _renumber(nba):
    """Stable renumbering by breadth-first discovery from the initial set."""
    order = []
    seen = set()
    frontier = sorted(nba.initial)
    while frontier:
        nxt = []
        for q in frontier:
            if q in seen:
                continue
            seen.add(q)
            order.append(q)
            for _, _, d in nba.edges[q]:
                if d not in seen:
                    nxt.append(d)
        frontier = sorted(set(nxt) - seen)
    for q in range(nba.n_states):       # unreachable tail, keep stable
        if q not in seen:
            order.append(q)
            seen.add(q)
    remap = {q: i for i, q in enumerate(order)}
    edges = [None] * nba.n_states
    for q in range(nba.n_states):
        edges[remap[q]] = tuple(sorted((c, v, remap[d]) for c, v, d in nba.edges[q]))
    return Nba(nba.props, nba.n_states,
               frozenset(remap[q] for q in nba.initial),
               frozenset(remap[q] for q in nba.accepting),
               tuple(edges))


# ---------------------------------------------------------------------------
# Lasso membership
# ---------------------------------------------------------------------------

def nba_accepts_lasso(nba, prefix, loop):
    """Does the automaton accept the ultimately periodic word prefix(loop)^w?

    Letters are sets (or frozensets) of true proposition ids.  Exact: builds
    the product with the lasso positions and looks for a reachable cycle
    through an accepting state.
    """
    if not loop:
        raise ValueError("loop must be nonempty")
    letters = [nba.mask(l) for l in prefix] + [nba.mask(l) for l in loop]
    n = len(letters)
    start_loop = len(prefix)

    def succ_pos(i):
        return i + 1 if i + 1 < n else start_loop

    nodes = {}
    order = []

    def node_id(pos, q):
        key = (pos, q)
        if key not in nodes:
            nodes[key] = len(order)
            order.append(key)
        return nodes[key]

    roots = [node_id(0, q) for q in sorted(nba.initial)]
    succ = []
    i = 0
    while i < len(order):
        pos, q = order[i]
        row = [node_id(succ_pos(pos), d) for d in nba.successors(q, letters[pos])]
        succ.append(sorted(set(row)))
        i += 1

    if not roots:
        return False
    comps = _sccs(len(order), succ)
    good = set()
    for comp in comps:
        cs = set(comp)
        cyclic = len(comp) > 1 or any(d in cs for v in comp for d in succ[v])
        if cyclic and any(order[v][1] in nba.accepting for v in comp):
            good |= cs
    if not good:
        return False
    seen = set()
    frontier = list(roots)
    while frontier:
        v = frontier.pop()
        if v in seen:
            continue
        if v in good:
            return True
        seen.add(v)
        frontier.extend(succ[v])
    return False


# ---------------------------------------------------------------------------
# Counting determinization (bounded safety under-approximation)
# ---------------------------------------------------------------------------

SINK = None


@dataclass(frozen=True)
class CountingSafetyAutomaton:
    """Deterministic safety view of an Nba under a visit bound.

    States are frozensets of (nba_state, accepting_visits) pairs with one
    pair per live run class; exceeding the bound anywhere collapses to the
    sink (exposed as the module-level SINK, i.e. None).  The empty state is
    perfectly safe: no run of the underlying automaton survives.
    """
    nba: Nba
    k: int

    @property
    def initial(self):
        items = {}
        for q in self.nba.initial:
            c = 1 if q in self.nba.accepting else 0
            items[q] = max(items.get(q, 0), c)
        if any(c > self.k for c in items.values()):
            return SINK
        return frozenset(items.items())

    def step(self, state, letter_mask):
        if state is SINK:
            return SINK
        best = {}
        for q, c in state:
            for care, val, dst in self.nba.edges[q]:
                if letter_mask & care != val:
                    continue
                nc = c + (1 if dst in self.nba.accepting else 0)
                if nc > self.k:
                    return SINK
                if best.get(dst, -1) < nc:
                    best[dst] = nc
        return frozenset(best.items())


def bounded_determinize(nba, k):
    if k < 0:
        raise ValueError("bound must be nonnegative")
    return CountingSafetyAutomaton(nba, k)
