"""Benchmark corpus: registry, runner, and report table.

Each entry carries the expected interface and result sizes it ships with;
the report compares a fresh run against them column by column.  Synthesis
times are reported but never compared, they depend on the machine.  Entries
marked approximate reconstruct a scenario whose exact specification is not
available, so their expected sizes are targets rather than requirements.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .syntax import parse_spec, atoms_of, Pred, Apply, pretty_term
from .encoding import encode
from .synthesis import synthesize, Limits
from .cfm import mealy_to_cfm, verify_cfm
from .codegen import count_conditionals
from .transforms import counter_ltl

BENCH_DIR = os.path.join(os.path.dirname(__file__), "benchmarks")


@dataclass(frozen=True)
class BenchEntry:
    name: str
    filename: str = None           # corpus file; None for generated entries
    bits: int = None               # counter entries
    expected: dict = field(default_factory=dict)
    approx: bool = False
    seconds: float = 60.0
    max_k: int = 8
    max_states: int = 400_000


def _exp(si, so, np, nf, phi, states, conds, status="realizable"):
    return {"si": si, "so": so, "np": np, "nf": nf, "phi": phi,
            "states": states, "conds": conds, "status": status}


BENCHMARKS = (
    BenchEntry("button", "button.tsl",
               expected=_exp(1, 2, 1, 2, 27, 1, 2)),
    BenchEntry("music-simple", "music-simple.tsl",
               expected=_exp(3, 1, 1, 2, 90, 2, 8)),
    BenchEntry("music-feedback", "music-feedback.tsl",
               expected=_exp(3, 1, 1, 2, 102, 2, 11)),
    BenchEntry("music-motivating", "music-motivating.tsl",
               expected=_exp(4, 1, 2, 2, 105, 2, 11), seconds=300.0),
    BenchEntry("frpzoo0", "frpzoo0.tsl",
               expected=_exp(2, 3, 3, 5, 130, 1, 7)),
    BenchEntry("frpzoo5", "frpzoo5.tsl",
               expected=_exp(2, 3, 3, 5, 132, 1, 6)),
    BenchEntry("frpzoo10", "frpzoo10.tsl",
               expected=_exp(2, 3, 3, 4, 112, 1, 8)),
    BenchEntry("escalator-nonreactive", "escalator-nonreactive.tsl",
               expected=_exp(0, 1, 0, 1, 13, 1, 1)),
    BenchEntry("escalator-noncounting", "escalator-noncounting.tsl",
               expected=_exp(2, 1, 2, 2, 36, 1, 3)),
    BenchEntry("escalator-counting", "escalator-counting.tsl",
               expected=_exp(2, 2, 3, 4, 75, 2, 14), seconds=120.0),
    BenchEntry("escalator-counting-init", "escalator-counting-init.tsl",
               expected=_exp(2, 2, 3, 5, 92, 3, 19), seconds=300.0),
    BenchEntry("escalator-bidirectional", "escalator-bidirectional.tsl",
               expected=_exp(2, 2, 7, 5, 161, 3, 44), seconds=600.0,
               max_states=2_000_000),
    BenchEntry("escalator-bidirectional-init", "escalator-bidirectional-init.tsl",
               expected=_exp(2, 2, 7, 6, 180, 3, 92), seconds=600.0,
               max_states=2_000_000),
    BenchEntry("escalator-smart", "escalator-smart.tsl",
               expected=_exp(2, 1, 4, 2, 73, 5, 24), approx=True),
    BenchEntry("slider-default", "slider-default.tsl",
               expected=_exp(1, 1, 2, 2, 86, 2, 6), approx=True),
    BenchEntry("slider-scored", "slider-scored.tsl",
               expected=_exp(1, 3, 4, 4, 145, 2, 26), approx=True),
    BenchEntry("slider-delayed", "slider-delayed.tsl",
               expected=_exp(1, 3, 4, 4, 149, 4, 50), approx=True),
    BenchEntry("torcs-gearing", "torcs-gearing.tsl",
               expected=_exp(2, 1, 1, 3, 44, 2, 4), approx=True),
    BenchEntry("torcs-steering", "torcs-steering.tsl",
               expected=_exp(2, 1, 4, 2, 65, 1, 3), approx=True),
    BenchEntry("counter1", bits=1, expected={"states": 2, "status": "realizable"}),
    BenchEntry("counter2", bits=2, expected={"states": 4, "status": "realizable"}),
    BenchEntry("counter3", bits=3, expected={"states": 8, "status": "realizable"},
               seconds=600.0),
)

_COMPARED = ("si", "so", "np", "nf", "phi", "states", "conds", "status")
_LABELS = {"si": "|S_I|", "so": "|S_O|", "np": "|N_P|", "nf": "|N_F|",
           "phi": "|phi|", "states": "|M|", "conds": "conds",
           "status": "status"}


def corpus_path(filename):
    return os.path.join(BENCH_DIR, filename)


def _ltl_size(f):
    n = 1
    for k in f.kids:
        n += _ltl_size(k)
    return n


def measure(formula, symtab):
    """Interface sizes: streams and distinct predicate / update terms."""
    preds, funcs = set(), set()
    for a in atoms_of(formula):
        if isinstance(a, Pred):
            preds.add(pretty_term(Apply(a.name, a.args)))
        elif isinstance(a.term, Apply):
            funcs.add(pretty_term(a.term))
    return {"si": len(symtab.inputs), "so": len(symtab.outputs),
            "np": len(preds), "nf": len(funcs)}


def run_entry(entry, limits=None):
    """Run one benchmark; returns a result row dict."""
    if limits is None:
        limits = Limits(max_k=entry.max_k, max_states=entry.max_states,
                        seconds=entry.seconds)
    row = {"name": entry.name, "si": None, "so": None, "np": None,
           "nf": None, "phi": None, "states": None, "conds": None,
           "time": None, "status": None, "expected": dict(entry.expected),
           "approx": entry.approx}
    if entry.filename is not None:
        with open(corpus_path(entry.filename)) as fh:
            formula, symtab = parse_spec(fh.read())
        spec = encode(formula, symtab)
        row.update(measure(formula, symtab))
        row["phi"] = _ltl_size(spec.formula)
    else:
        spec = counter_ltl(entry.bits)
        formula = symtab = None
    t0 = time.perf_counter()
    result = synthesize(spec, limits)
    row["time"] = time.perf_counter() - t0
    row["status"] = result.status
    if result.status == "realizable":
        row["states"] = result.machine.n_states
        if symtab is not None:
            cfm = mealy_to_cfm(result.machine, symtab)
            row["conds"] = count_conditionals(cfm)
            row["verified"] = bool(verify_cfm(cfm, formula))
    diffs = []
    for key in _COMPARED:
        want = entry.expected.get(key)
        got = row.get(key)
        if want is not None and got is not None and got != want:
            diffs.append("%s %s != %s" % (_LABELS[key], got, want))
    row["diffs"] = diffs
    return row


def run_bench(name_filter=None, limits=None, entries=BENCHMARKS):
    """Run matching entries in registry order; substring name filter."""
    rows = []
    for entry in entries:
        if name_filter and name_filter not in entry.name:
            continue
        rows.append(run_entry(entry, limits))
    return rows


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return "%.3f" % v
    return str(v)


def bench_report(results):
    """Fixed-width table over the result rows of run_bench."""
    headers = ["benchmark", "|S_I|", "|S_O|", "|N_P|", "|N_F|", "|phi|",
               "|M|", "time(s)", "conds", "status", "vs expected"]
    lines = []
    for row in results:
        if row["diffs"]:
            note = "; ".join(row["diffs"])
        else:
            note = "ok"
        if row.get("approx"):
            note += " (approx)"
        if row.get("verified") is False:
            note += " VERIFY FAILED"
        lines.append([row["name"], _cell(row["si"]), _cell(row["so"]),
                      _cell(row["np"]), _cell(row["nf"]), _cell(row["phi"]),
                      _cell(row["states"]), _cell(row["time"]),
                      _cell(row["conds"]), row["status"] or "-", note])
    widths = [max(len(h), *(len(l[i]) for l in lines)) if lines else len(h)
              for i, h in enumerate(headers)]
    def fmt(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [fmt(headers), fmt(["-" * w for w in widths])]
    out.extend(fmt(l) for l in lines)
    return "\n".join(out) + "\n"
