"""Command-line driver: parse, encode, synthesize, verify, simulate.

Exit codes follow the sysexits convention where it matters: 0 realizable
(or success), 1 unrealizable (or verification failure), 2 unknown, 64
usage errors, 65 malformed input data, 66 unreadable files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .syntax import (ParseError, KindConflict, ArityConflict, parse_spec,
                     pretty, subformula_count)
from .ltl import ltl_pretty
from .encoding import encode, export_tlsf, NoOutputs
from .synthesis import (Limits, synthesize, import_mealy, MealyFormatError,
                        BudgetExceeded)
from .encoding import ExactlyOneViolation
from .cfm import (CfmFormatError, mealy_to_cfm, import_cfm, export_cfm,
                  verify_cfm, cfm_trace, cfm_stats)
from .semantics import builtin_interpretation
from .codegen import generate_frp, count_conditionals
from .transforms import to_tsl2, pcp_formula
from .bench import run_bench, bench_report, measure, _ltl_size

EX_OK = 0
EX_UNREALIZABLE = 1
EX_UNKNOWN = 2
EX_USAGE = 64
EX_DATA = 65
EX_NOINPUT = 66


class _Exit(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Exit(EX_USAGE, "%s: error: %s" % (self.prog, message))


def _read(path):
    try:
        with open(path, "r") as fh:
            return fh.read()
    except OSError as e:
        raise _Exit(EX_NOINPUT, "cannot read %s: %s" % (path, e.strerror or e))


def _write(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise _Exit(EX_NOINPUT, "cannot write %s: %s" % (path, e.strerror or e))


def _load_spec(path):
    text = _read(path)
    try:
        return parse_spec(text)
    except (ParseError, KindConflict, ArityConflict) as e:
        raise _Exit(EX_DATA, "%s: %s" % (path, e))


def _load_json(path):
    text = _read(path)
    try:
        return json.loads(text)
    except ValueError as e:
        raise _Exit(EX_DATA, "%s: invalid JSON: %s" % (path, e))


def _load_cfm(path):
    data = _load_json(path)
    try:
        return import_cfm(data)
    except CfmFormatError as e:
        raise _Exit(EX_DATA, "%s: %s" % (path, e))


def _parse_limits(text, base):
    kw = {"max_k": base.max_k, "max_states": base.max_states,
          "seconds": base.seconds}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key == "k":
                kw["max_k"] = int(val)
            elif key == "states":
                kw["max_states"] = int(val)
            elif key == "seconds":
                kw["seconds"] = None if val.lower() == "none" else float(val)
            else:
                raise _Exit(EX_USAGE, "unknown limit %r (have k, states, seconds)"
                            % key)
        except ValueError:
            raise _Exit(EX_USAGE, "bad limit value %r for %r" % (val, key))
    return Limits(**kw)


def _limits(args):
    limits = Limits(seconds=600.0)
    env = os.environ.get("TSLSYNTH_LIMITS")
    if env:
        limits = _parse_limits(env, limits)
    if getattr(args, "limits", None):
        limits = _parse_limits(args.limits, limits)
    return limits


def _dump(data):
    return json.dumps(data, indent=2, sort_keys=True, default=str)


def _letters(word):
    return [sorted(letter) for letter in word]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_check(args):
    _, symtab = _load_spec(args.spec)
    print("inputs:     %s" % (", ".join(symtab.inputs) or "(none)"))
    print("outputs:    %s" % (", ".join(symtab.outputs) or "(none)"))
    print("functions:  %s" % (", ".join("%s/%d" % (n, a) for n, a in
                                        sorted(symtab.functions.items())) or "(none)"))
    print("predicates: %s" % (", ".join("%s/%d" % (n, a) for n, a in
                                        sorted(symtab.predicates.items())) or "(none)"))
    return EX_OK


def _encode_spec(args):
    formula, symtab = _load_spec(args.spec)
    try:
        return formula, symtab, encode(formula, symtab)
    except NoOutputs as e:
        raise _Exit(EX_DATA, "%s: %s" % (args.spec, e))


def cmd_encode(args):
    _, _, spec = _encode_spec(args)
    if args.tlsf:
        print(export_tlsf(spec))
    elif args.json:
        print(_dump({"inputs": list(spec.inputs),
                     "outputs": list(spec.outputs),
                     "formula": ltl_pretty(spec.formula),
                     "core": ltl_pretty(spec.core),
                     "groups": [list(g) for g in spec.groups] if spec.groups else None}))
    else:
        print(ltl_pretty(spec.formula))
    return EX_OK


def cmd_synth(args):
    formula, symtab, spec = _encode_spec(args)

    if args.mealy_in:
        data = _load_json(args.mealy_in)
        try:
            machine = import_mealy(data)
        except (MealyFormatError, ExactlyOneViolation) as e:
            raise _Exit(EX_DATA, "%s: %s" % (args.mealy_in, e))
        cfm = mealy_to_cfm(machine, symtab)
        res = verify_cfm(cfm, formula)
        if not res.ok:
            print("the machine does not realize the specification", file=sys.stderr)
            print(_dump({"prefix": _letters(res.prefix),
                         "loop": _letters(res.loop)}), file=sys.stderr)
            return EX_UNREALIZABLE
        print("Realizable (|M| = %d, given machine)" % machine.n_states,
              file=sys.stderr)
        print(_dump(export_cfm(cfm)))
        return EX_OK

    result = synthesize(spec, _limits(args))
    if result.status == "realizable":
        cfm = mealy_to_cfm(result.machine, symtab)
        print("Realizable (|M| = %d, k = %d)" % (result.machine.n_states, result.k),
              file=sys.stderr)
        print(_dump(export_cfm(cfm)))
        return EX_OK
    if result.status == "unrealizable":
        print("Unrealizable (environment strategy with %d states, k = %d)"
              % (result.witness.n_states, result.k), file=sys.stderr)
        return EX_UNREALIZABLE
    print("Unknown: %s" % result.reason, file=sys.stderr)
    return EX_UNKNOWN


def cmd_verify(args):
    cfm = _load_cfm(args.cfm)
    formula, _ = _load_spec(args.spec)
    res = verify_cfm(cfm, formula)
    if res.ok:
        print("Pass")
        return EX_OK
    print("Fail: counterexample lasso")
    print(_dump({"prefix": _letters(res.prefix), "loop": _letters(res.loop)}))
    return EX_UNREALIZABLE


def cmd_sim(args):
    cfm = _load_cfm(args.cfm)
    data = _load_json(args.trace)
    if not isinstance(data, dict) or "inputs" not in data:
        raise _Exit(EX_DATA, '%s: expected {"inputs": {...}, "inits": {...}}'
                    % args.trace)
    interp = builtin_interpretation(input_streams=data["inputs"],
                                    inits=data.get("inits"))
    if args.steps < 1:
        raise _Exit(EX_USAGE, "--steps must be positive")
    _, trace = cfm_trace(cfm, interp, args.steps)
    for rec in trace:
        print(json.dumps(rec, sort_keys=True, default=str))
    return EX_OK


def cmd_codegen(args):
    cfm = _load_cfm(args.cfm)
    text = generate_frp(cfm)
    if args.output:
        _write(args.output, text)
    else:
        print(text, end="")
    return EX_OK


def cmd_norm2(args):
    formula, _ = _load_spec(args.spec)
    print(pretty(to_tsl2(formula)))
    return EX_OK


def cmd_stats(args):
    if args.path.endswith(".json"):
        cfm = _load_cfm(args.path)
        data = cfm_stats(cfm)
        data["conditionals"] = count_conditionals(cfm)
    else:
        formula, symtab = _load_spec(args.path)
        data = measure(formula, symtab)
        data = {"inputs": data["si"], "outputs": data["so"],
                "predicate_terms": data["np"], "function_terms": data["nf"],
                "tsl_size": subformula_count(formula)}
        try:
            data["ltl_size"] = _ltl_size(encode(formula, symtab).formula)
        except NoOutputs:
            data["ltl_size"] = None
    print(_dump(data))
    return EX_OK


def cmd_pcp(args):
    data = _load_json(args.instance)
    pairs = data.get("pairs") if isinstance(data, dict) else None
    if (not isinstance(pairs, list) or not pairs
            or not all(isinstance(p, list) and len(p) == 2
                       and all(isinstance(w, str) for w in p) for p in pairs)):
        raise _Exit(EX_DATA, '%s: expected {"pairs": [["w", "v"], ...]}'
                    % args.instance)
    try:
        formula = pcp_formula([tuple(p) for p in pairs])
    except ValueError as e:
        raise _Exit(EX_DATA, "%s: %s" % (args.instance, e))
    print(pretty(formula))
    return EX_OK


def cmd_bench(args):
    env = os.environ.get("TSLSYNTH_LIMITS")
    limits = _parse_limits(env, Limits()) if env else None
    results = run_bench(name_filter=args.filter, limits=limits)
    print(bench_report(results))
    return EX_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser():
    parser = _Parser(prog="tslsynth",
                     description="Temporal stream logic synthesis toolchain.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("check", help="parse a spec and print its symbol table")
    p.add_argument("spec")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("encode", help="print the LTL encoding of a spec")
    p.add_argument("spec")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--tlsf", action="store_true", help="TLSF output")
    g.add_argument("--json", action="store_true", help="JSON output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("synth", help="synthesize a control-flow model")
    p.add_argument("spec")
    p.add_argument("--limits", metavar="K=V,...",
                   help="budget overrides, e.g. k=8,states=200000,seconds=120")
    p.add_argument("--mealy-in", metavar="FILE",
                   help="verify a given Mealy machine instead of solving")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="model check a CFM against a spec")
    p.add_argument("cfm")
    p.add_argument("spec")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sim", help="run a CFM against recorded input streams")
    p.add_argument("cfm")
    p.add_argument("--trace", required=True, metavar="FILE",
                   help='JSON {"inputs": {name: [v, ...]}, "inits": {name: v}}')
    p.add_argument("--interp", choices=["builtin"], default="builtin")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("codegen", help="emit an arrowized-FRP program")
    p.add_argument("cfm")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("norm2", help="normalize every applied name to arity 2")
    p.add_argument("spec")
    p.set_defaults(func=cmd_norm2)

    p = sub.add_parser("stats", help="size figures for a spec or CFM")
    p.add_argument("path", metavar="spec.tsl|cfm.json")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("pcp", help="correspondence-instance formula generator")
    p.add_argument("instance", metavar="instance.json")
    p.set_defaults(func=cmd_pcp)

    p = sub.add_parser("bench", help="run the benchmark corpus")
    p.add_argument("--filter", metavar="NAME", help="substring filter")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return EX_USAGE
        return args.func(args)
    except _Exit as e:
        if e.message:
            print(e.message, file=sys.stderr)
        return e.code
    except BudgetExceeded as e:
        print("Unknown: %s" % e, file=sys.stderr)
        return EX_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
