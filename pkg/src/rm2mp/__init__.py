"""Translate register machines into positively controlled MP grammars,
run both, and check that they agree."""

from .engine import HaltMode, MpState, MpTrace, ema_step, evaluate_fluxes, mp_run
from .grammar import (
    Add,
    Const,
    GrammarError,
    MPGrammar,
    Multiset,
    NatSub,
    Rule,
    StoichMatrix,
    Var,
    build_stoich_matrix,
)
from .grammar_text import GrammarParseError, parse_grammar, serialize_grammar
from .harness import (
    ComparisonVerdict,
    Outcome,
    ProgramGenerator,
    SuiteConfig,
    compare,
    generate_program,
    run_property_suite,
)
from .register_machine import (
    HALTED,
    Dec,
    Halt,
    Inc,
    Jnz,
    ParseError,
    Program,
    RmState,
    RmTrace,
    parse_program,
    rm_run,
    rm_step,
)
from .translator import TranslationMap, subtraction_encoding, translate

__version__ = "0.1.0"
