import json

import pytest

from rm2mp import Outcome, ProgramGenerator, compare, generate_program, parse_program, translate
from rm2mp.harness import SuiteConfig, check_run, execute_pair, judge, run_property_suite
from rm2mp.register_machine import Halt
from rm2mp.translator import JNZ_ROLES


def drop_role(role):
    """Translator with one JNZ rule removed from the first JNZ, if any."""

    def mutated(program, registers):
        grammar, tmap = translate(program, registers)
        for k, rule in enumerate(grammar.rules):
            if rule.label.endswith(f":{role}"):
                return grammar.without_rule(k), tmap
        return grammar, tmap

    return mutated


def test_compare_max(max_program):
    v = compare(max_program, (5, 3, 0, 0, 0))
    assert v.outcome is Outcome.EQUIVALENT
    assert v.rm_final == v.mp_final == (2, 0, 1, 0, 3)
    assert v.rm_steps == 22
    assert v.mp_steps == 32


def test_compare_halt_only():
    v = compare(parse_program("HALT"))
    assert v.outcome is Outcome.EQUIVALENT
    assert v.rm_final == v.mp_final == ()


def test_compare_self_loop_inconclusive():
    v = compare(parse_program("INC(1)\nJNZ(1,1)\nHALT"), (), 1000, 2500)
    assert v.outcome is Outcome.INCONCLUSIVE
    assert v.rm_final is None and v.mp_final is None


def test_one_sided_halting():
    program = parse_program("INC(1)\nINC(1)\nINC(1)\nHALT")
    # the grammar needs 4 steps; a bound of 3 cannot tell
    assert compare(program, (), 100, 3).outcome is Outcome.INCONCLUSIVE
    assert compare(program, (), 100, 4).outcome is Outcome.EQUIVALENT
    # the machine needs 4 steps; cut at 3 it may still catch up
    run = execute_pair(program, (), 3, 100)
    assert judge(run).outcome is Outcome.INCONCLUSIVE


def test_grammar_halting_before_looping_machine_is_divergent():
    loop = parse_program("INC(1)\nJNZ(1,1)\nHALT")

    def wrong(program, registers):
        return translate(parse_program("HALT"))

    run = execute_pair(loop, (), 50, 125, translator=wrong)
    v = judge(run)
    assert v.outcome is Outcome.DIVERGENT
    assert "grammar halted at step 1" in v.detail


def test_stuck_grammar_is_divergent(max_program):
    run = execute_pair(max_program, (5, 3), 1000, 2500, translator=drop_role("jump"))
    v = judge(run)
    assert v.outcome is Outcome.DIVERGENT
    assert "still running" in v.detail


def test_raising_mp_bound_keeps_equivalence(max_program):
    for bound in (32, 33, 100, 10_000):
        assert compare(max_program, (5, 3), 1000, bound).outcome is Outcome.EQUIVALENT


def test_generator_minimal():
    program, regs = generate_program(ProgramGenerator(seed=0, max_length=1))
    assert program.instructions == (Halt(),)
    assert regs == ()


@pytest.mark.parametrize("seed", range(40))
def test_generator_closure_and_determinism(seed):
    gen = ProgramGenerator(seed, 12, 4, 8)
    program, regs = generate_program(gen)
    assert parse_program(program.to_text()) == program
    assert generate_program(gen) == (program, regs)
    assert isinstance(program.instructions[-1], Halt)
    assert len(regs) == program.register_count
    assert all(0 <= v <= 8 for v in regs)
    assert 1 <= len(program) <= 12


def test_generator_rejects_bad_parameters():
    with pytest.raises(ValueError):
        ProgramGenerator(0, 0)


def test_suite_small_passes():
    report = run_property_suite(SuiteConfig(count=40, seed=1000))
    assert report.ok
    s = report.summary()
    assert set(s) == {"cases", "equivalent", "inconclusive", "divergent", "failing_seeds"}
    assert s["cases"] == 40
    assert s["equivalent"] + s["inconclusive"] == 40
    assert json.loads(report.summary_json()) == s
    assert report.render().endswith("PASS\n")


def test_suite_single_halt_case():
    # seed 0 with max_length 1 can only produce HALT
    report = run_property_suite(SuiteConfig(count=1, max_length=1))
    assert report.ok and report.count(Outcome.EQUIVALENT) == 1


def test_suite_parallel_matches_serial():
    config = SuiteConfig(count=24, seed=77)
    serial = run_property_suite(config)
    parallel = run_property_suite(config, workers=3)
    assert serial.summary() == parallel.summary()
    assert [r.seed for r in parallel.results] == list(range(77, 101))


def test_suite_reports_corrupted_translation():
    report = run_property_suite(SuiteConfig(count=60), translator=drop_role("fallthrough"))
    assert not report.ok
    text = report.render()
    assert "FAIL seed=" in text
    assert f"FAILED seeds {report.summary()['failing_seeds']}" in text


@pytest.mark.parametrize("role", JNZ_ROLES)
def test_every_jnz_rule_matters(max_program, role):
    # between them these inputs take and skip the first jump
    detected = []
    for regs in [(5, 3), (0, 3), (3, 5)]:
        run = execute_pair(max_program, regs, 1000, translator=drop_role(role))
        detected.append(judge(run).outcome is not Outcome.EQUIVALENT or bool(check_run(run)))
    assert any(detected)
