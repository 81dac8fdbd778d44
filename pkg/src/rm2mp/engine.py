"""Positively controlled EMA execution of MP grammars."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .grammar import MPGrammar, StoichMatrix, build_stoich_matrix, compile_regulator

DEFAULT_MAX_MP_STEPS = 250_000
HALT_METABOLITE = "HALT"


class PositiveControlError(RuntimeError):
    """A metabolite went negative; the flux evaluation is broken."""


class HaltMode(enum.Enum):
    METABOLITE = "halt"
    FIXED_POINT = "fixed-point"


@dataclass(frozen=True)
class MpState:
    values: tuple[int, ...]
    step: int = 0


@dataclass
class MpTrace:
    states: list[MpState]
    flux_history: list[tuple[int, ...]]
    halted: bool
    halt_step: Optional[int] = None

    @property
    def final(self) -> MpState:
        return self.states[-1]

    @property
    def steps(self) -> int:
        return self.final.step


class Stepper:
    """Precomputed per-grammar structures for repeated stepping."""

    def __init__(self, grammar: MPGrammar, matrix: StoichMatrix | None = None):
        self.grammar = grammar
        self.matrix = matrix if matrix is not None else build_stoich_matrix(grammar)
        if self.matrix.shape != (len(grammar.metabolites), len(grammar.rules)):
            raise ValueError("stoichiometric matrix does not match grammar")
        index = grammar.index()
        self._regulators = [compile_regulator(f, index) for f in grammar.regulators]
        self._lhs = [tuple((index[n], m) for n, m in rule.lhs) for rule in grammar.rules]
        self._consumers: dict[int, list[int]] = {}
        for k, lhs in enumerate(self._lhs):
            for i, _ in lhs:
                self._consumers.setdefault(i, []).append(k)
        self._columns = [self.matrix.column(k) for k in range(len(grammar.rules))]

    def raw_fluxes(self, values: Sequence[int]) -> list[int]:
        """Regulator values clamped at zero (MPPC condition 1)."""
        u = [f(values) for f in self._regulators]
        if u and min(u) < 0:
            u = [v if v > 0 else 0 for v in u]
        return u

    def control(self, values: Sequence[int], u: Sequence[int]) -> list[int]:
        """MPPC condition 2 as one simultaneous pass.

        Demands are computed from ``u`` as given; every rule consuming an
        over-demanded metabolite is switched off.
        """
        u = list(u)
        demand: dict[int, int] = {}
        for k, v in enumerate(u):
            if v:
                for i, m in self._lhs[k]:
                    demand[i] = demand.get(i, 0) + v * m
        for i, d in demand.items():
            if d > values[i]:
                for k in self._consumers[i]:
                    u[k] = 0
        return u

    def fluxes(self, values: Sequence[int]) -> list[int]:
        return self.control(values, self.raw_fluxes(values))

    def delta(self, u: Sequence[int]) -> list[int]:
        d = [0] * len(self.grammar.metabolites)
        for k, v in enumerate(u):
            if v:
                for i, a in self._columns[k]:
                    d[i] += a * v
        return d

    def advance(self, values: Sequence[int]) -> tuple[tuple[int, ...], list[int]]:
        u = self.fluxes(values)
        nxt = list(values)
        for k, v in enumerate(u):
            if v:
                for i, a in self._columns[k]:
                    nxt[i] += a * v
        if nxt and min(nxt) < 0:
            i = min(range(len(nxt)), key=nxt.__getitem__)
            raise PositiveControlError(
                f"metabolite {self.grammar.metabolites[i]} became {nxt[i]}"
            )
        return tuple(nxt), u


def evaluate_fluxes(grammar: MPGrammar, state: MpState | Sequence[int]) -> list[int]:
    values = state.values if isinstance(state, MpState) else tuple(state)
    _check_aligned(grammar, values)
    return Stepper(grammar).fluxes(values)


def ema_step(grammar: MPGrammar, matrix: StoichMatrix, state: MpState) -> MpState:
    _check_aligned(grammar, state.values)
    values, _ = Stepper(grammar, matrix).advance(state.values)
    return MpState(values, state.step + 1)


def _check_aligned(grammar: MPGrammar, values: Sequence[int]) -> None:
    if len(values) != len(grammar.metabolites):
        raise ValueError(
            f"state has {len(values)} values, grammar has {len(grammar.metabolites)} metabolites"
        )


def mp_run(
    grammar: MPGrammar,
    max_steps: int = DEFAULT_MAX_MP_STEPS,
    halt_mode: HaltMode | str = HaltMode.METABOLITE,
    record_fluxes: bool = True,
) -> MpTrace:
    """Iterate the EMA from ``grammar.initial`` until halting or ``max_steps``.

    In metabolite mode the run halts at the first state with HALT >= 1; in
    fixed-point mode it halts at the first step that reproduces its
    predecessor.
    """
    halt_mode = HaltMode(halt_mode)
    halt_index = None
    if halt_mode is HaltMode.METABOLITE:
        if HALT_METABOLITE not in grammar.metabolites:
            raise ValueError(f"grammar has no {HALT_METABOLITE} metabolite")
        halt_index = grammar.metabolites.index(HALT_METABOLITE)

    stepper = Stepper(grammar)
    values = grammar.initial
    states = [MpState(values, 0)]
    fluxes: list[tuple[int, ...]] = []
    if halt_index is not None and values[halt_index] >= 1:
        return MpTrace(states, fluxes, True, 0)
    for step in range(1, max_steps + 1):
        nxt, u = stepper.advance(values)
        states.append(MpState(nxt, step))
        if record_fluxes:
            fluxes.append(tuple(u))
        if halt_index is not None:
            if nxt[halt_index] >= 1:
                return MpTrace(states, fluxes, True, step)
        elif nxt == values:
            return MpTrace(states, fluxes, True, step)
        values = nxt
    return MpTrace(states, fluxes, False, None)


def continue_run(grammar: MPGrammar, state: MpState, steps: int) -> list[MpState]:
    """Force ``steps`` further EMA steps from ``state`` regardless of halting."""
    stepper = Stepper(grammar)
    out = []
    values = state.values
    for k in range(1, steps + 1):
        values, _ = stepper.advance(values)
        out.append(MpState(values, state.step + k))
    return out
