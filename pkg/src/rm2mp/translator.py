"""Compile register-machine programs into positively controlled MP grammars.

Each instruction ``j`` owns a pointer metabolite ``Ij`` holding the single
execution token. Sequential instructions pass the token with ``Ij -> Ij+1``;
``JNZ`` parks it in a comparison metabolite ``Lj`` for one step and then
routes it to the jump target or to ``Ij+1`` depending on the register.
The successor of the last instruction is ``HALT``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .grammar import EMPTY, MPGrammar, Multiset, NatSub, RegulatorExpr, Rule, Var
from .register_machine import Dec, Halt, Inc, Jnz, Program, initial_state

HALT = "HALT"

# Labels of the four rules emitted per JNZ, in emission order.
JNZ_ROLES = ("token", "jump", "cleanup", "fallthrough")


def register_name(i: int) -> str:
    return f"R{i}"


def pointer_name(j: int) -> str:
    return f"I{j}"


def comparison_name(j: int) -> str:
    return f"L{j}"


@dataclass(frozen=True)
class TranslationMap:
    register_to_metabolite: dict[int, str]
    instruction_to_metabolite: dict[int, str]
    comparison_metabolites: dict[int, str]
    halt_metabolite: str = HALT
    # Pointer receiving the token when instruction j does not jump.
    successors: dict[int, str] = field(default_factory=dict)

    def registers(self) -> list[str]:
        return [self.register_to_metabolite[i] for i in sorted(self.register_to_metabolite)]

    def pointers(self) -> list[str]:
        return [self.instruction_to_metabolite[j] for j in sorted(self.instruction_to_metabolite)]

    def comparisons(self) -> list[str]:
        return [self.comparison_metabolites[j] for j in sorted(self.comparison_metabolites)]


def subtraction_encoding(minuend: str, subtrahend: str) -> RegulatorExpr:
    """The natural-number difference ``max(minuend - subtrahend, 0)``."""
    return NatSub(Var(minuend), Var(subtrahend))


def _rule(lhs: str | None, rhs: str | None, label: str) -> Rule:
    return Rule(
        Multiset.of(lhs) if lhs else EMPTY,
        Multiset.of(rhs) if rhs else EMPTY,
        label,
    )


def translate(
    program: Program, initial_registers: Sequence[int] = ()
) -> tuple[MPGrammar, TranslationMap]:
    start = initial_state(program, initial_registers)
    n = len(program)
    tmap = TranslationMap(
        {i: register_name(i) for i in range(1, program.register_count + 1)},
        {j: pointer_name(j) for j in range(1, n + 1)},
        {j: comparison_name(j) for j in range(1, n + 1) if isinstance(program[j], Jnz)},
        HALT,
        {j: pointer_name(j + 1) if j < n else HALT for j in range(1, n + 1)},
    )
    metabolites = tmap.registers() + tmap.pointers() + tmap.comparisons() + [HALT]

    pairs: list[tuple[Rule, RegulatorExpr]] = []
    for j, ins in enumerate(program.instructions, start=1):
        here = pointer_name(j)
        if isinstance(ins, Halt):
            pairs.append((_rule(here, HALT, f"{here}:halt"), Var(here)))
            continue
        reg = register_name(ins.reg)
        after = tmap.successors[j]
        if isinstance(ins, Inc):
            pairs.append((_rule(here, after, f"{here}:next"), Var(here)))
            pairs.append((_rule(None, reg, f"{here}:inc"), Var(here)))
        elif isinstance(ins, Dec):
            pairs.append((_rule(here, after, f"{here}:next"), Var(here)))
            pairs.append((_rule(reg, None, f"{here}:dec"), Var(here)))
        else:
            cmp_ = comparison_name(j)
            target = pointer_name(ins.target)
            pairs += [
                (_rule(here, cmp_, f"{here}:token"), Var(here)),
                (_rule(cmp_, target, f"{here}:jump"), subtraction_encoding(cmp_, after)),
                (_rule(cmp_, None, f"{here}:cleanup"), Var(after)),
                (_rule(None, after, f"{here}:fallthrough"), subtraction_encoding(here, reg)),
            ]

    initial = dict(zip(tmap.registers(), start.registers))
    initial[pointer_name(1)] = 1
    grammar = MPGrammar(
        tuple(metabolites),
        tuple(r for r, _ in pairs),
        tuple(initial.get(m, 0) for m in metabolites),
        tuple(f for _, f in pairs),
    )
    return grammar, tmap
