import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rm2mp import HALTED, Dec, Halt, Inc, Jnz, ParseError, Program, RmState, parse_program, rm_run, rm_step
from rm2mp.harness import ProgramGenerator, generate_program
from rm2mp.register_machine import ProgramError, initial_state


def max_oracle(a, b):
    """Closed form of the max program, read off its loop structure."""
    m = min(a, b)
    final = (a - m, b - m, int(a > b), int(a <= b), m)
    steps = 6 * m + (4 if a > b else 3)
    return final, steps


def test_parse_max_program(max_program):
    assert len(max_program) == 10
    assert max_program.register_count == 5
    assert max_program[1] == Jnz(1, 4)
    assert max_program[10] == Jnz(5, 1)
    assert max_program.instructions[1:3] == (Inc(4), Halt())


def test_parse_minimal():
    p = parse_program("HALT")
    assert p.instructions == (Halt(),)
    assert p.register_count == 0


def test_parse_is_case_insensitive_and_skips_comments():
    p = parse_program("# header\n\n  inc( 2 )  # bump\nJnz(2,1)\nhalt\n")
    assert p.instructions == (Inc(2), Jnz(2, 1), Halt())
    assert p.register_count == 2


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("JNZ(1, 99)\nHALT", 1, "jump target 99 exceeds program length 2"),
        ("JNZ(1)", 1, "JNZ requires 2 arguments"),
        ("HALT\nFOO(1)", 2, "unknown mnemonic"),
        ("INC(0)\nHALT", 1, "must be >= 1"),
        ("INC(-2)\nHALT", 1, "must be >= 1"),
        ("DEC(x)\nHALT", 1, "malformed register index"),
        ("INC 1\nHALT", 1, "cannot parse"),
        ("HALT(3)", 1, "HALT requires 0 arguments"),
        ("\n# nothing\n", 2, "empty program"),
        ("", 1, "empty program"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_program(text)
    assert err.value.line == line
    assert fragment in str(err.value)
    assert str(err.value).startswith(f"line {line}:")


def test_program_validation():
    with pytest.raises(ProgramError):
        Program(())
    with pytest.raises(ProgramError):
        Program((Jnz(1, 5), Halt()))
    with pytest.raises(ProgramError):
        Program((Inc(3), Halt()), register_count=2)


def test_step_jump_taken(max_program):
    state = RmState((5, 3, 0, 0, 0), pc=1)
    nxt = rm_step(max_program, state)
    assert nxt.pc == 4
    assert nxt.registers == (5, 3, 0, 0, 0)
    assert nxt.step_count == 1


def test_step_dec_on_zero_clamps():
    p = parse_program("DEC(1)\nHALT")
    nxt = rm_step(p, RmState((0,), pc=1))
    assert nxt.registers == (0,)
    assert nxt.pc == 2


def test_step_halt(max_program):
    nxt = rm_step(max_program, RmState((1, 2, 3, 4, 5), pc=3, step_count=7))
    assert nxt.pc == HALTED
    assert nxt.registers == (1, 2, 3, 4, 5)
    assert nxt.step_count == 8


def test_step_past_end_halts():
    p = Program((Halt(), Inc(1)))
    nxt = rm_step(p, RmState((0,), pc=2))
    assert nxt.halted and nxt.registers == (1,)
    p = Program((Halt(), Jnz(1, 1)))
    assert rm_step(p, RmState((0,), pc=2)).halted


def test_run_max_program(max_program):
    trace = rm_run(max_program, (5, 3, 0, 0, 0))
    assert trace.halted
    assert trace.final.registers == (2, 0, 1, 0, 3)
    assert trace.steps == max_oracle(5, 3)[1] == 22
    assert trace.states[0].pc == 1


def test_run_halt_only():
    trace = rm_run(parse_program("HALT"), ())
    assert trace.halted and trace.steps == 1
    assert trace.final.registers == ()


def test_run_self_loop_exhausts_bound():
    trace = rm_run(parse_program("INC(1)\nJNZ(1, 1)\nHALT"), (), max_steps=100)
    assert not trace.halted
    assert len(trace.executed) == 100
    assert len(trace.states) == 101
    assert trace.final.pc != HALTED


def test_run_records_jumps(max_program):
    trace = rm_run(max_program, (1, 0))
    assert [tuple(e) for e in trace.executed] == [(1, True), (4, False), (5, False), (6, False)]


def test_initial_registers_padding():
    p = parse_program("INC(3)\nHALT")
    assert initial_state(p, (4,)).registers == (4, 0, 0)
    with pytest.raises(ProgramError):
        initial_state(p, (1, 2, 3, 4))
    with pytest.raises(ProgramError):
        initial_state(p, (-1,))


def test_huge_registers_do_not_wrap():
    p = parse_program("INC(1)\nHALT")
    big = 2**80
    assert rm_run(p, (big,)).final.registers == (big + 1,)


def test_to_text_roundtrip(max_program):
    assert parse_program(max_program.to_text()) == max_program


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 20), st.integers(0, 20))
def test_max_program_functional(max_program, a, b):
    trace = rm_run(max_program, (a, b))
    final, steps = max_oracle(a, b)
    assert trace.halted
    assert trace.final.registers == final
    assert trace.steps == steps
    r3, r4 = trace.final.registers[2:4]
    assert r3 + r4 == 1


programs = st.builds(
    lambda seed, n: generate_program(ProgramGenerator(seed, n, 4, 8)),
    st.integers(0, 10**9),
    st.integers(1, 12),
)


@settings(max_examples=150, deadline=None)
@given(programs)
def test_run_invariants(case):
    program, regs = case
    trace = rm_run(program, regs, max_steps=300)
    assert trace.halted == trace.final.halted
    for before, after in zip(trace.states, trace.states[1:]):
        assert all(v >= 0 for v in after.registers)
        changed = [i for i, (x, y) in enumerate(zip(before.registers, after.registers)) if x != y]
        assert len(changed) <= 1
        for i in changed:
            assert abs(after.registers[i] - before.registers[i]) == 1
        ins = program[before.pc]
        if isinstance(ins, Dec) and before.registers[ins.reg - 1] == 0:
            assert after.registers == before.registers
        assert after.pc == HALTED or 1 <= after.pc <= len(program)
    assert rm_run(program, regs, max_steps=300) == trace
