"""Checks that a translated grammar's trace behaves like its register machine.

Each checker returns a list of human-readable violations; empty means pass.
"""
from __future__ import annotations

from operator import itemgetter
from typing import Iterable

from .engine import MpTrace, continue_run
from .grammar import MPGrammar
from .register_machine import HALTED, Program, RmTrace, step_cost
from .translator import TranslationMap

MAX_REPORTED = 10


def _capped(found: Iterable[str]) -> list[str]:
    out = []
    for msg in found:
        out.append(msg)
        if len(out) >= MAX_REPORTED:
            break
    return out


class _Layout:
    def __init__(self, grammar: MPGrammar, tmap: TranslationMap):
        idx = grammar.index()
        self.halt = idx[tmap.halt_metabolite]
        self.pointers = {j: idx[name] for j, name in tmap.instruction_to_metabolite.items()}
        self.comparisons = {j: idx[name] for j, name in tmap.comparison_metabolites.items()}
        self.registers = [idx[name] for name in tmap.registers()]
        self.successors = {j: idx[name] for j, name in tmap.successors.items()}


def _getter(indices: list[int]):
    """Tuple-returning item getter, also for zero or one index."""
    if not indices:
        return lambda x: ()
    if len(indices) == 1:
        i = indices[0]
        return lambda x: (x[i],)
    return itemgetter(*indices)


def token_violations(grammar: MPGrammar, tmap: TranslationMap, trace: MpTrace) -> list[str]:
    lay = _Layout(grammar, tmap)
    active_of = _getter([lay.halt] + list(lay.pointers.values()))
    parked_of = _getter(list(lay.comparisons.values()))
    names = ["HALT"] + [f"I{j}" for j in lay.pointers] + [f"L{j}" for j in lay.comparisons]
    comparison_items = list(lay.comparisons.items())

    def gen():
        states = trace.states
        for n, state in enumerate(states):
            x = state.values
            s = state.step
            act = active_of(x)
            park = parked_of(x)
            if max(act + park) > 1 or min(act + park) < 0:
                for name, v in zip(names, act + park):
                    if v not in (0, 1):
                        yield f"step {s}: pointer {name}={v} is not binary"
            active = sum(act)
            parked = sum(park)
            total = active + parked
            if active > 1:
                yield f"step {s}: HALT + sum(I) = {active} > 1"
            if parked > 1:
                yield f"step {s}: sum(L) = {parked} > 1"
            if not 1 <= total <= 2:
                yield f"step {s}: token total {total} outside 1..2"
            if parked == 0 and active != 1:
                yield f"step {s}: no comparison active but HALT + sum(I) = {active}"
            if total == 2:
                cleanup = [
                    j for j, i in comparison_items
                    if x[i] == 1 and x[lay.successors[j]] == 1
                ]
                if not cleanup:
                    yield f"step {s}: two tokens outside a JNZ fall-through"
                elif n + 1 < len(states):
                    nxt = states[n + 1].values
                    for j in cleanup:
                        if nxt[lay.comparisons[j]] != 0:
                            yield f"step {s}: L{j} not consumed on the following step"

    return _capped(gen())


def aligned_steps(program: Program, rm_trace: RmTrace) -> list[int]:
    """MP step at which each RM state is reached under the step-cost model."""
    times = [0]
    for ex in rm_trace.executed:
        times.append(times[-1] + step_cost(program, ex))
    return times


def register_agreement_violations(
    program: Program,
    rm_trace: RmTrace,
    grammar: MPGrammar,
    tmap: TranslationMap,
    mp_trace: MpTrace,
) -> list[str]:
    lay = _Layout(grammar, tmap)
    times = aligned_steps(program, rm_trace)
    last_mp = len(mp_trace.states) - 1

    def gen():
        for t, rm_state in zip(times, rm_trace.states):
            if t > last_mp:
                break
            x = mp_trace.states[t].values
            regs = tuple(x[i] for i in lay.registers)
            if regs != rm_state.registers:
                yield f"step {t}: registers {regs} != machine {rm_state.registers}"
            if rm_state.pc == HALTED:
                if x[lay.halt] != 1:
                    yield f"step {t}: machine halted but HALT={x[lay.halt]}"
            elif x[lay.pointers[rm_state.pc]] != 1:
                yield f"step {t}: machine at instruction {rm_state.pc} but I{rm_state.pc}=0"
        # Every quiescent MP state sits on an instruction boundary.
        boundary = set(times)
        horizon = min(times[-1], last_mp)
        parked_of = _getter(list(lay.comparisons.values()))
        active_of = _getter([lay.halt] + list(lay.pointers.values()))
        for state in mp_trace.states[: horizon + 1]:
            x = state.values
            if any(parked_of(x)):
                continue
            if sum(active_of(x)) == 1 and state.step not in boundary:
                yield f"step {state.step}: quiescent state off an instruction boundary"

    return _capped(gen())


def step_cost_violations(program: Program, rm_trace: RmTrace, mp_trace: MpTrace) -> list[str]:
    if not rm_trace.halted:
        return []
    predicted = aligned_steps(program, rm_trace)[-1]
    if mp_trace.halted:
        if mp_trace.halt_step != predicted:
            return [f"MP halted at step {mp_trace.halt_step}, cost model predicts {predicted}"]
        return []
    if mp_trace.steps >= predicted:
        return [f"MP not halted after {mp_trace.steps} steps, cost model predicts {predicted}"]
    return []


def positive_control_violations(grammar: MPGrammar, trace: MpTrace) -> list[str]:
    idx = grammar.index()
    lhs = [[(idx[n], m) for n, m in rule.lhs] for rule in grammar.rules]

    def gen():
        for state in trace.states:
            if state.values and min(state.values) < 0:
                for name, v in zip(grammar.metabolites, state.values):
                    if v < 0:
                        yield f"step {state.step}: {name}={v} is negative"
        for state, u in zip(trace.states, trace.flux_history):
            demand: dict[int, int] = {}
            for k, f in enumerate(u):
                if not f:
                    continue
                if f < 0:
                    yield f"step {state.step}: rule {k + 1} has negative flux {f}"
                for i, m in lhs[k]:
                    demand[i] = demand.get(i, 0) + f * m
            for i, d in demand.items():
                if d > state.values[i]:
                    yield (
                        f"step {state.step}: demand {d} on {grammar.metabolites[i]}"
                        f" exceeds {state.values[i]}"
                    )

    return _capped(gen())


def fixed_point_violations(grammar: MPGrammar, trace: MpTrace, extra: int = 100) -> list[str]:
    if not trace.halted:
        return []
    final = trace.final
    for state in continue_run(grammar, final, extra):
        if state.values != final.values:
            return [f"state changed {state.step - final.step} steps after halting"]
    return []
