"""Temporal stream logic synthesis.

Specifications talk about predicates and updates over opaque data streams;
the toolchain parses them, encodes them into propositional LTL, runs a
bounded safety-game search for a Mealy controller, lifts winners back to
control-flow models over the original terms, and prints those as arrowized
reactive programs.
"""

from .syntax import (
    ParseError, KindConflict, ArityConflict,
    Signal, Apply, Const, Pred, Update,
    Not, And, Or, Implies, Iff, Next, Until, Release,
    Finally_, Globally, WeakUntil, AsSoonAs,
    SymbolTable, parse_formula, parse_term, parse_spec,
    classify, desugar, atoms_of, subformula_count, pretty, pretty_term,
)
from .semantics import (
    MissingInterpretation, HorizonExceeded, Opaque,
    LassoComputation, FiniteComputation, Interpretation,
    eval_term, eval_value, builtin_interpretation, tsl_holds,
)
from .ltl import Ltl, nnf, simplify, ltl_pretty, ltl_lasso_holds
from .encoding import (
    NoOutputs, ExactlyOneViolation, LtlSpec,
    encode, term_prop, unmangle, purity_assumptions, export_tlsf,
)
from .automata import (
    Nba, ltl_to_nba, nba_accepts_lasso,
    CountingSafetyAutomaton, bounded_determinize, SINK,
)
from .synthesis import (
    BudgetExceeded, MealyFormatError, TotalityError,
    Limits, MealyMachine, MooreMachine, SynthesisResult,
    synthesize, check_unrealizable, solve_safety_game,
    minimize_mealy, reduce_mealy, export_mealy, import_mealy,
    machine_lasso_word,
)
from .cfm import (
    CfmFormatError, Row, Cfm, VerifyResult,
    mealy_to_cfm, cfm_step, cfm_trace, cfm_run, verify_cfm,
    cfm_stats, export_cfm, import_cfm,
)
from .codegen import CodegenOptions, generate_frp, count_conditionals, validate_frp
from .transforms import to_tsl2, pcp_formula, counter_ltl

__version__ = "0.1.0"

__all__ = [
    "ParseError", "KindConflict", "ArityConflict",
    "Signal", "Apply", "Const", "Pred", "Update",
    "Not", "And", "Or", "Implies", "Iff", "Next", "Until", "Release",
    "Finally_", "Globally", "WeakUntil", "AsSoonAs",
    "SymbolTable", "parse_formula", "parse_term", "parse_spec",
    "classify", "desugar", "atoms_of", "subformula_count",
    "pretty", "pretty_term",
    "MissingInterpretation", "HorizonExceeded", "Opaque",
    "LassoComputation", "FiniteComputation", "Interpretation",
    "eval_term", "eval_value", "builtin_interpretation", "tsl_holds",
    "Ltl", "nnf", "simplify", "ltl_pretty", "ltl_lasso_holds",
    "NoOutputs", "ExactlyOneViolation", "LtlSpec",
    "encode", "term_prop", "unmangle", "purity_assumptions", "export_tlsf",
    "Nba", "ltl_to_nba", "nba_accepts_lasso",
    "CountingSafetyAutomaton", "bounded_determinize", "SINK",
    "BudgetExceeded", "MealyFormatError", "TotalityError",
    "Limits", "MealyMachine", "MooreMachine", "SynthesisResult",
    "synthesize", "check_unrealizable", "solve_safety_game",
    "minimize_mealy", "reduce_mealy", "export_mealy", "import_mealy",
    "machine_lasso_word",
    "CfmFormatError", "Row", "Cfm", "VerifyResult",
    "mealy_to_cfm", "cfm_step", "cfm_trace", "cfm_run", "verify_cfm",
    "cfm_stats", "export_cfm", "import_cfm",
    "CodegenOptions", "generate_frp", "count_conditionals", "validate_frp",
    "to_tsl2", "pcp_formula", "counter_ltl",
    "__version__",
]
