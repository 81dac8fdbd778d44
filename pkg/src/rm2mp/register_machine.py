"""Register machine: instruction set, program text parser and interpreter.

Registers and instruction indices are 1-based. Register values are Python
ints, so they never overflow. Execution that moves past the last
instruction halts, exactly as an explicit HALT would.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

HALTED = 0  # pc of a halted machine; never a valid instruction index

DEFAULT_MAX_STEPS = 100_000


class ProgramError(ValueError):
    """A program that violates the structural invariants."""


class ParseError(ProgramError):
    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class Inc:
    reg: int

    def __str__(self) -> str:
        return f"INC({self.reg})"


@dataclass(frozen=True)
class Dec:
    reg: int

    def __str__(self) -> str:
        return f"DEC({self.reg})"


@dataclass(frozen=True)
class Jnz:
    reg: int
    target: int

    def __str__(self) -> str:
        return f"JNZ({self.reg}, {self.target})"


@dataclass(frozen=True)
class Halt:
    def __str__(self) -> str:
        return "HALT"


Instruction = Union[Inc, Dec, Jnz, Halt]


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    register_count: int = field(default=-1)

    def __post_init__(self) -> None:
        instructions = tuple(self.instructions)
        object.__setattr__(self, "instructions", instructions)
        if not instructions:
            raise ProgramError("empty program")
        used = max((ins.reg for ins in instructions if not isinstance(ins, Halt)), default=0)
        if self.register_count < 0:
            object.__setattr__(self, "register_count", used)
        n = len(instructions)
        for pos, ins in enumerate(instructions, start=1):
            if not isinstance(ins, (Inc, Dec, Jnz, Halt)):
                raise ProgramError(f"instruction {pos}: unknown instruction {ins!r}")
            if isinstance(ins, Halt):
                continue
            if ins.reg < 1:
                raise ProgramError(f"instruction {pos}: register index must be >= 1")
            if ins.reg > self.register_count:
                raise ProgramError(
                    f"instruction {pos}: register {ins.reg} exceeds register count {self.register_count}"
                )
            if isinstance(ins, Jnz) and not 1 <= ins.target <= n:
                raise ProgramError(
                    f"instruction {pos}: jump target {ins.target} outside 1..{n}"
                )

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, index: int) -> Instruction:
        """1-based access."""
        return self.instructions[index - 1]

    def to_text(self) -> str:
        return "".join(f"{ins}\n" for ins in self.instructions)


_LINE = re.compile(r"^([A-Za-z]+)\s*(?:\((.*)\))?$")
_ARITY = {"INC": 1, "DEC": 1, "JNZ": 2, "HALT": 0}


def _parse_index(token: str, line: int, what: str) -> int:
    token = token.strip()
    if not re.fullmatch(r"[+-]?\d+", token):
        raise ParseError(line, f"malformed {what} {token!r}")
    value = int(token)
    if value < 1:
        raise ParseError(line, f"{what} must be >= 1, got {value}")
    return value


def parse_program(text: str) -> Program:
    """Parse register-machine source, one instruction per line.

    Mnemonics are case-insensitive, ``#`` starts a comment and blank lines
    are skipped. Every error carries the offending line number.
    """
    instructions: list[Instruction] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        m = _LINE.match(body)
        if m is None:
            raise ParseError(lineno, f"cannot parse {body!r}")
        mnemonic = m.group(1).upper()
        if mnemonic not in _ARITY:
            raise ParseError(lineno, f"unknown mnemonic {m.group(1)!r}")
        arg_text = m.group(2)
        args = [] if arg_text is None or not arg_text.strip() else arg_text.split(",")
        if len(args) != _ARITY[mnemonic]:
            expected = _ARITY[mnemonic]
            noun = "argument" if expected == 1 else "arguments"
            raise ParseError(lineno, f"{mnemonic} requires {expected} {noun}")
        if mnemonic == "HALT":
            ins: Instruction = Halt()
        else:
            reg = _parse_index(args[0], lineno, "register index")
            if mnemonic == "INC":
                ins = Inc(reg)
            elif mnemonic == "DEC":
                ins = Dec(reg)
            else:
                ins = Jnz(reg, _parse_index(args[1], lineno, "jump target"))
        instructions.append(ins)
        lines.append(lineno)

    if not instructions:
        raise ParseError(max(len(text.splitlines()), 1), "empty program")
    n = len(instructions)
    for ins, lineno in zip(instructions, lines):
        if isinstance(ins, Jnz) and ins.target > n:
            raise ParseError(lineno, f"jump target {ins.target} exceeds program length {n}")
    return Program(tuple(instructions))


@dataclass(frozen=True)
class RmState:
    registers: tuple[int, ...]
    pc: int = 1
    step_count: int = 0

    @property
    def halted(self) -> bool:
        return self.pc == HALTED


class Executed(NamedTuple):
    index: int
    jumped: bool


@dataclass
class RmTrace:
    states: list[RmState]
    executed: list[Executed]
    halted: bool

    @property
    def final(self) -> RmState:
        return self.states[-1]

    @property
    def steps(self) -> int:
        return self.final.step_count


def initial_state(program: Program, initial_registers: Sequence[int] = ()) -> RmState:
    values = [int(v) for v in initial_registers]
    if len(values) > program.register_count:
        raise ProgramError(
            f"{len(values)} initial values given for {program.register_count} registers"
        )
    if any(v < 0 for v in values):
        raise ProgramError("initial register values must be natural numbers")
    values += [0] * (program.register_count - len(values))
    return RmState(tuple(values))


def _execute(program: Program, state: RmState) -> tuple[RmState, bool]:
    if state.halted:
        raise ProgramError("machine has already halted")
    ins = program[state.pc]
    regs = state.registers
    jumped = False
    if isinstance(ins, Inc):
        i = ins.reg - 1
        regs = regs[:i] + (regs[i] + 1,) + regs[i + 1:]
        pc = state.pc + 1
    elif isinstance(ins, Dec):
        i = ins.reg - 1
        if regs[i] > 0:
            regs = regs[:i] + (regs[i] - 1,) + regs[i + 1:]
        pc = state.pc + 1
    elif isinstance(ins, Jnz):
        jumped = regs[ins.reg - 1] > 0
        pc = ins.target if jumped else state.pc + 1
    else:
        pc = HALTED
    if pc > len(program):
        pc = HALTED  # running past the last instruction halts
    return RmState(regs, pc, state.step_count + 1), jumped


def rm_step(program: Program, state: RmState) -> RmState:
    return _execute(program, state)[0]


def step_cost(program: Program, executed: Executed) -> int:
    """Number of MP steps the translated grammar spends on one instruction."""
    return 2 if isinstance(program[executed.index], Jnz) and executed.jumped else 1


def rm_run(
    program: Program,
    initial_registers: Sequence[int] = (),
    max_steps: int = DEFAULT_MAX_STEPS,
) -> RmTrace:
    state = initial_state(program, initial_registers)
    states = [state]
    executed: list[Executed] = []
    while not state.halted and state.step_count < max_steps:
        index = state.pc
        state, jumped = _execute(program, state)
        states.append(state)
        executed.append(Executed(index, jumped))
    return RmTrace(states, executed, state.halted)
