"""Command-line interface.

Exit codes: 0 success / EQUIVALENT, 1 DIVERGENT or failed suite,
2 step bound exhausted / INCONCLUSIVE, 3 input error.
"""
from __future__ import annotations

import argparse
import re
import sys
from typing import Optional, Sequence

from .engine import HALT_METABOLITE, HaltMode, mp_run
from .grammar import GrammarError, MPGrammar
from .grammar_text import parse_grammar, serialize_grammar
from .harness import Outcome, SuiteConfig, compare, default_mp_bound, run_property_suite
from .register_machine import DEFAULT_MAX_STEPS, ProgramError, parse_program, rm_run
from .translator import translate

EXIT_OK = 0
EXIT_DIVERGENT = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3

_VERDICT_EXIT = {
    Outcome.EQUIVALENT: EXIT_OK,
    Outcome.DIVERGENT: EXIT_DIVERGENT,
    Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _registers(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        values = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated naturals, got {text!r}")
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("register values must be >= 0")
    return values


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}")


def _load_program(path: str):
    try:
        return parse_program(_read(path))
    except ProgramError as exc:
        raise InputError(f"{path}: {exc}")


def _vector(values: Sequence[int]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


class _Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.lines: list[str] = []

    def __call__(self, line: str = "") -> None:
        self.lines.append(line)

    def flush(self) -> None:
        text = "".join(f"{line}\n" for line in self.lines)
        if self.path and self.path != "-":
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def cmd_translate(args, out: _Output) -> int:
    program = _load_program(args.program)
    try:
        grammar, _ = translate(program, args.registers or ())
    except ProgramError as exc:
        raise InputError(str(exc))
    out(serialize_grammar(grammar).rstrip("\n"))
    return EXIT_OK


def cmd_run_rm(args, out: _Output) -> int:
    program = _load_program(args.program)
    try:
        trace = rm_run(program, args.registers or (), args.max_steps)
    except ProgramError as exc:
        raise InputError(str(exc))
    if args.trace:
        for state in trace.states:
            pc = "HALTED" if state.halted else str(state.pc)
            out(f"{state.step_count}: pc={pc} {_vector(state.registers)}")
    status = "halted" if trace.halted else "not halted"
    out(f"{status} step={trace.steps}")
    out(f"registers {_vector(trace.final.registers)}")
    return EXIT_OK if trace.halted else EXIT_INCONCLUSIVE


_REGISTER_NAME = re.compile(r"R([1-9][0-9]*)")


def _override_registers(grammar: MPGrammar, values: Sequence[int]) -> MPGrammar:
    numbered = sorted(
        (int(m.group(1)), name)
        for name in grammar.metabolites
        if (m := _REGISTER_NAME.fullmatch(name))
    )
    if len(values) > len(numbered):
        raise InputError(
            f"{len(values)} register values given, grammar has {len(numbered)} register metabolites"
        )
    padded = list(values) + [0] * (len(numbered) - len(values))
    return grammar.with_initial({name: v for (_, name), v in zip(numbered, padded)})


def cmd_run_mp(args, out: _Output) -> int:
    text = _read(args.grammar)
    try:
        grammar = parse_grammar(text)
    except GrammarError as exc:
        raise InputError(f"{args.grammar}: {exc}")
    if args.registers is not None:
        grammar = _override_registers(grammar, args.registers)
    mode = args.halt_mode
    if mode == "auto":
        mode = "halt" if HALT_METABOLITE in grammar.metabolites else "fixed-point"
    elif mode == "halt" and HALT_METABOLITE not in grammar.metabolites:
        raise InputError(f"{args.grammar}: halt mode needs a {HALT_METABOLITE} metabolite")
    trace = mp_run(grammar, args.max_steps, HaltMode(mode), record_fluxes=not args.no_flux_history)

    if args.trace:
        out("# " + " ".join(grammar.metabolites))
        for k, state in enumerate(trace.states):
            line = f"{state.step}: {_vector(state.values)}"
            if k < len(trace.flux_history):
                line += f" U={_vector(trace.flux_history[k])}"
            out(line)
    status = "halted" if trace.halted else "not halted"
    out(f"{status} step={trace.steps}")
    out("final " + " ".join(f"{m}={v}" for m, v in zip(grammar.metabolites, trace.final.values)))
    return EXIT_OK if trace.halted else EXIT_INCONCLUSIVE


def cmd_compare(args, out: _Output) -> int:
    program = _load_program(args.program)
    max_mp = args.max_mp_steps or default_mp_bound(args.max_steps)
    try:
        verdict = compare(program, args.registers or (), args.max_steps, max_mp)
    except ProgramError as exc:
        raise InputError(str(exc))

    def describe(final, steps, halted_word):
        vec = _vector(final) if final is not None else "-"
        return f"{halted_word} steps={steps} final={vec}"

    out("register machine: " + describe(
        verdict.rm_final, verdict.rm_steps, "halted" if verdict.rm_final is not None else "running"))
    out("mp grammar:       " + describe(
        verdict.mp_final, verdict.mp_steps, "halted" if verdict.mp_final is not None else "running"))
    out(f"verdict: {verdict.outcome.value}")
    if verdict.detail:
        out(f"detail: {verdict.detail}")
    return _VERDICT_EXIT[verdict.outcome]


def cmd_suite(args, out: _Output) -> int:
    config = SuiteConfig(
        count=args.count,
        seed=args.seed,
        max_length=args.max_length,
        max_registers=args.max_registers,
        max_initial_value=args.max_initial_value,
        max_rm_steps=args.max_steps,
        max_mp_steps=args.max_mp_steps or default_mp_bound(args.max_steps),
    )
    report = run_property_suite(config, workers=args.workers)
    out(report.render().rstrip("\n"))
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(report.summary_json())
    return EXIT_OK if report.ok else EXIT_DIVERGENT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rm2mp", description="Register machine to MPPC grammar toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, steps_default=DEFAULT_MAX_STEPS):
        p.add_argument("--registers", type=_registers, default=None,
                       help="initial register values, e.g. 5,3")
        if steps_default is not None:
            p.add_argument("--max-steps", type=_positive, default=steps_default)
        p.add_argument("-o", "--output", default=None, help="write output here instead of stdout")

    p = sub.add_parser("translate", help="translate a program into an MP grammar")
    p.add_argument("program", help="register machine file, or - for stdin")
    common(p, None)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("run-rm", help="run a register machine")
    p.add_argument("program")
    common(p)
    p.add_argument("--trace", action="store_true", help="print every state")
    p.set_defaults(func=cmd_run_rm)

    p = sub.add_parser("run-mp", help="run an MP grammar")
    p.add_argument("grammar", help="MP grammar file, or - for stdin")
    common(p, default_mp_bound(DEFAULT_MAX_STEPS))
    p.add_argument("--trace", action="store_true", help="print every state")
    p.add_argument("--halt-mode", choices=("auto", "halt", "fixed-point"), default="auto")
    p.add_argument("--no-flux-history", action="store_true", help="do not keep per-step fluxes")
    p.set_defaults(func=cmd_run_mp)

    p = sub.add_parser("compare", help="run a program and its translation and compare")
    p.add_argument("program")
    common(p)
    p.add_argument("--max-mp-steps", type=_positive, default=None,
                   help="MP step bound (default 2.5x --max-steps)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("suite", help="differential-test random programs")
    p.add_argument("--count", type=_positive, default=500)
    p.add_argument("--seed", type=_natural, default=0)
    p.add_argument("--max-length", type=_positive, default=12)
    p.add_argument("--max-registers", type=_positive, default=4)
    p.add_argument("--max-initial-value", type=_natural, default=8)
    p.add_argument("--max-steps", type=_positive, default=10_000)
    p.add_argument("--max-mp-steps", type=_positive, default=None)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--summary", default=None, help="write a JSON summary here")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Output(args.output)
    try:
        code = args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        out.flush()
    except OSError as exc:
        print(f"error: {args.output}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
