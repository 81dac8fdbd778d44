"""Differential testing of register machines against their translated grammars."""
from __future__ import annotations

import enum
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import invariants
from .engine import HaltMode, MpTrace, mp_run
from .grammar import MPGrammar
from .register_machine import (
    DEFAULT_MAX_STEPS,
    Dec,
    Halt,
    Inc,
    Instruction,
    Jnz,
    Program,
    RmTrace,
    rm_run,
)
from .translator import TranslationMap, translate

MP_BOUND_FACTOR = 2.5

Translator = Callable[[Program, Sequence[int]], "tuple[MPGrammar, TranslationMap]"]


def default_mp_bound(max_rm_steps: int) -> int:
    return int(max_rm_steps * MP_BOUND_FACTOR)


class Outcome(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    DIVERGENT = "DIVERGENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ComparisonVerdict:
    outcome: Outcome
    rm_final: Optional[tuple[int, ...]]
    mp_final: Optional[tuple[int, ...]]
    rm_steps: int
    mp_steps: int
    detail: str = ""

    def __post_init__(self) -> None:
        if self.outcome is Outcome.EQUIVALENT:
            assert self.rm_final is not None and self.rm_final == self.mp_final, self


@dataclass
class PairRun:
    """Both executions of one program, kept for invariant checking."""

    program: Program
    initial_registers: tuple[int, ...]
    rm: RmTrace
    grammar: MPGrammar
    tmap: TranslationMap
    mp: MpTrace
    max_rm_steps: int
    max_mp_steps: int

    def mp_registers(self) -> tuple[int, ...]:
        idx = self.grammar.index()
        values = self.mp.final.values
        return tuple(values[idx[name]] for name in self.tmap.registers())


def execute_pair(
    program: Program,
    initial_registers: Sequence[int] = (),
    max_rm_steps: int = DEFAULT_MAX_STEPS,
    max_mp_steps: Optional[int] = None,
    translator: Translator = translate,
    record_fluxes: bool = True,
) -> PairRun:
    if max_mp_steps is None:
        max_mp_steps = default_mp_bound(max_rm_steps)
    rm = rm_run(program, initial_registers, max_rm_steps)
    grammar, tmap = translator(program, initial_registers)
    mp = mp_run(grammar, max_mp_steps, HaltMode.METABOLITE, record_fluxes=record_fluxes)
    return PairRun(
        program, tuple(initial_registers), rm, grammar, tmap, mp, max_rm_steps, max_mp_steps
    )


def judge(run: PairRun) -> ComparisonVerdict:
    rm, mp = run.rm, run.mp
    rm_final = rm.final.registers if rm.halted else None
    mp_final = run.mp_registers() if mp.halted else None
    common = dict(rm_final=rm_final, mp_final=mp_final, rm_steps=rm.steps, mp_steps=mp.steps)

    if rm.halted and mp.halted:
        if rm_final == mp_final:
            return ComparisonVerdict(Outcome.EQUIVALENT, **common)
        diffs = [
            f"R{i}: machine {a} vs grammar {b}"
            for i, (a, b) in enumerate(zip(rm_final, mp_final), start=1)
            if a != b
        ]
        return ComparisonVerdict(Outcome.DIVERGENT, detail="; ".join(diffs), **common)

    if rm.halted:
        # An equivalent grammar spends at most two steps per instruction.
        if mp.steps >= 2 * rm.steps:
            return ComparisonVerdict(
                Outcome.DIVERGENT,
                detail=f"machine halted after {rm.steps} steps, grammar still running at {mp.steps}",
                **common,
            )
        return ComparisonVerdict(
            Outcome.INCONCLUSIVE, detail=f"grammar hit its bound of {run.max_mp_steps} steps", **common
        )
    if mp.halted:
        # Each instruction costs the grammar at least one step.
        if rm.steps >= mp.halt_step:
            return ComparisonVerdict(
                Outcome.DIVERGENT,
                detail=f"grammar halted at step {mp.halt_step}, machine still running at {rm.steps}",
                **common,
            )
        return ComparisonVerdict(
            Outcome.INCONCLUSIVE, detail=f"machine hit its bound of {run.max_rm_steps} steps", **common
        )
    return ComparisonVerdict(Outcome.INCONCLUSIVE, detail="neither halted within its bound", **common)


def compare(
    program: Program,
    initial_registers: Sequence[int] = (),
    max_rm_steps: int = DEFAULT_MAX_STEPS,
    max_mp_steps: Optional[int] = None,
) -> ComparisonVerdict:
    run = execute_pair(program, initial_registers, max_rm_steps, max_mp_steps, record_fluxes=False)
    return judge(run)


@dataclass(frozen=True)
class ProgramGenerator:
    seed: int = 0
    max_length: int = 12
    max_registers: int = 4
    max_initial_value: int = 8

    def __post_init__(self) -> None:
        if self.max_length < 1 or self.max_registers < 1 or self.max_initial_value < 0:
            raise ValueError(f"invalid generator parameters {self}")


def generate_program(gen: ProgramGenerator) -> tuple[Program, tuple[int, ...]]:
    rng = random.Random(gen.seed)
    n = rng.randint(1, gen.max_length)
    registers = rng.randint(1, gen.max_registers)
    body: list[Instruction] = []
    for _ in range(n - 1):
        op = rng.choice(("INC", "DEC", "JNZ", "HALT"))
        if op == "HALT":
            body.append(Halt())
            continue
        reg = rng.randint(1, registers)
        if op == "INC":
            body.append(Inc(reg))
        elif op == "DEC":
            body.append(Dec(reg))
        else:
            body.append(Jnz(reg, rng.randint(1, n)))
    body.append(Halt())
    program = Program(tuple(body))
    initial = tuple(rng.randint(0, gen.max_initial_value) for _ in range(program.register_count))
    return program, initial


@dataclass
class CaseResult:
    seed: int
    program: Program
    initial_registers: tuple[int, ...]
    verdict: ComparisonVerdict
    violations: dict[str, list[str]] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.verdict.outcome is Outcome.DIVERGENT or bool(self.violations)


def check_run(run: PairRun, fixed_point_steps: int = 100) -> dict[str, list[str]]:
    """All translator invariants on one pair of traces, keyed by check name."""
    checks = {
        "token": invariants.token_violations(run.grammar, run.tmap, run.mp),
        "positive_control": invariants.positive_control_violations(run.grammar, run.mp),
        "register_agreement": invariants.register_agreement_violations(
            run.program, run.rm, run.grammar, run.tmap, run.mp
        ),
        "step_cost": invariants.step_cost_violations(run.program, run.rm, run.mp),
        "fixed_point": invariants.fixed_point_violations(run.grammar, run.mp, fixed_point_steps),
    }
    return {name: found for name, found in checks.items() if found}


@dataclass(frozen=True)
class SuiteConfig:
    count: int = 500
    seed: int = 0
    max_length: int = 12
    max_registers: int = 4
    max_initial_value: int = 8
    max_rm_steps: int = 10_000
    max_mp_steps: int = 25_000

    def generator(self, case: int) -> ProgramGenerator:
        return ProgramGenerator(
            self.seed + case, self.max_length, self.max_registers, self.max_initial_value
        )


def run_case(config: SuiteConfig, case: int, translator: Translator = translate) -> CaseResult:
    gen = config.generator(case)
    program, initial = generate_program(gen)
    run = execute_pair(program, initial, config.max_rm_steps, config.max_mp_steps, translator)
    return CaseResult(gen.seed, program, initial, judge(run), check_run(run))


def _run_case_star(args):
    return run_case(*args)


@dataclass
class SuiteReport:
    config: SuiteConfig
    results: list[CaseResult]

    def count(self, outcome: Outcome) -> int:
        return sum(1 for r in self.results if r.verdict.outcome is outcome)

    @property
    def failures(self) -> list[CaseResult]:
        return [r for r in self.results if r.failed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {
            "cases": len(self.results),
            "equivalent": self.count(Outcome.EQUIVALENT),
            "inconclusive": self.count(Outcome.INCONCLUSIVE),
            "divergent": self.count(Outcome.DIVERGENT),
            "failing_seeds": [r.seed for r in self.failures],
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"

    def render(self) -> str:
        s = self.summary()
        lines = [
            f"cases {s['cases']}",
            f"equivalent {s['equivalent']}",
            f"inconclusive {s['inconclusive']}",
            f"divergent {s['divergent']}",
        ]
        for r in self.failures:
            lines.append(f"FAIL seed={r.seed} verdict={r.verdict.outcome.value}")
            if r.verdict.detail and r.verdict.outcome is Outcome.DIVERGENT:
                lines.append(f"  {r.verdict.detail}")
            for check, found in r.violations.items():
                for msg in found:
                    lines.append(f"  {check}: {msg}")
            lines.append(f"  registers {r.initial_registers}")
            lines += [f"  {ins}" for ins in r.program.instructions]
        lines.append("PASS" if self.ok else f"FAILED seeds {s['failing_seeds']}")
        return "\n".join(lines) + "\n"


def run_property_suite(
    config: SuiteConfig = SuiteConfig(),
    translator: Translator = translate,
    workers: int = 1,
    fail_fast: bool = False,
) -> SuiteReport:
    """Generate ``config.count`` programs and differential-test each one.

    Case ``k`` uses generator seed ``config.seed + k``. With ``fail_fast`` the
    suite stops at the first failing case (sequential runs only).
    """
    if config.count < 1:
        raise ValueError("count must be >= 1")
    results: list[CaseResult] = []
    if workers > 1 and not fail_fast:
        with ProcessPoolExecutor(workers) as pool:
            jobs = [(config, k, translator) for k in range(config.count)]
            results = list(pool.map(_run_case_star, jobs, chunksize=8))
    else:
        for k in range(config.count):
            result = run_case(config, k, translator)
            results.append(result)
            if fail_fast and result.failed:
                break
    results.sort(key=lambda r: r.seed)
    return SuiteReport(config, results)
