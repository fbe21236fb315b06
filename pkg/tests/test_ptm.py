"""Machine semantics, the exact acceptance oracle, and sampled runs.

The key cross-check here is dual-route: every fixture machine is run both
through the dataclass-level step semantics (run_exact_steps over explicit
bit strings) and through the flat-table enumeration kernel, and the exact
outcome distributions must coincide.  Sampled runs are then held to the
exact values statistically (3 sigma).
"""

import itertools
import json
from fractions import Fraction

import pytest

from gapinfer import machines
from gapinfer.errors import (
    EnumerationTooLarge,
    MissingTransition,
    PTMValidationError,
)
from gapinfer.machines import build_machine, fixture_runs
from gapinfer.numerics import RandomStream
from gapinfer.ptm import (
    ACCEPTED,
    REJECTED,
    STAY,
    UNHALTED,
    PTM,
    Configuration,
    acceptance_probability,
    check_ptm,
    clockify,
    decide_error_ptm_acceptance,
    initial_configuration,
    lint_ptm,
    load_machine,
    machine_from_json,
    machine_to_json,
    outcome_probabilities,
    run_exact_steps,
    run_sampled,
    save_machine,
    step,
    validate_ptm,
)

FIXTURES = fixture_runs()


def brute_force_outcomes(machine, input_string, steps):
    """Independent oracle: run the step semantics under every bit string."""
    counts = {ACCEPTED: 0, REJECTED: 0, UNHALTED: 0}
    total_bits = machine.bits_per_step * steps
    for pattern in itertools.product("01", repeat=total_bits):
        config = initial_configuration(machine, input_string, steps)
        final = run_exact_steps(machine, config, "".join(pattern))
        if final.state == machine.accept_state:
            counts[ACCEPTED] += 1
        elif final.state == machine.reject_state:
            counts[REJECTED] += 1
        else:
            counts[UNHALTED] += 1
    denominator = 1 << total_bits
    return {k: Fraction(v, denominator) for k, v in counts.items()}


def test_step_writes_and_moves():
    m = machines.blank_flipper()
    config = initial_configuration(m, "", 3)
    after = step(m, config, "0")
    assert after.tape[0] == "1"
    assert after.head == 1
    assert after.step == 1
    assert after.state == "go"


def test_step_clamps_left_edge():
    m = machines.edge_clamper()
    config = initial_configuration(m, "0", 4)
    once = step(m, config, "1")
    assert once.head == 0
    twice = step(m, once, "0")
    assert twice.head == 0
    assert twice.state == "yes"


def test_step_clamps_right_edge():
    m = machines.random_walker()
    config = Configuration(tape=("0",), head=0, state="go", step=0)
    after = step(m, config, "1")
    assert after.head == 0


def test_step_requires_live_state_and_exact_bits():
    m = machines.always_accept()
    config = initial_configuration(m, "", 2)
    halted = step(m, config, "0")
    with pytest.raises(ValueError):
        step(m, halted, "0")
    with pytest.raises(ValueError):
        step(m, config, "00")


def test_run_exact_steps_absorbs():
    m = machines.always_accept()
    config = initial_configuration(m, "", 3)
    final = run_exact_steps(m, config, "010")
    assert final.state == "yes"
    assert final.step == 1  # halted early; remaining bits ignored
    assert run_exact_steps(m, final, "111") == final


def test_missing_transition_is_lazy():
    # a partial machine steps fine until the hole is actually hit
    partial = PTM(
        states=("go", "yes", "no"),
        start_state="go",
        accept_state="yes",
        reject_state="no",
        tape_alphabet=("0", "_"),
        blank="_",
        input_alphabet=("0",),
        bits_per_step=1,
        transitions={("go", "_", "0"): ("_", STAY, "yes")},
    )
    config = initial_configuration(partial, "", 1)
    assert step(partial, config, "0").state == "yes"
    with pytest.raises(MissingTransition):
        step(partial, config, "1")
    with pytest.raises(MissingTransition):
        outcome_probabilities(partial, "", 1)


def test_initial_configuration_validates_input():
    m = machines.first_bit_decider()
    with pytest.raises(ValueError):
        initial_configuration(m, "0000", 3)
    with pytest.raises(ValueError):
        initial_configuration(m, "x", 3)
    config = initial_configuration(m, "01", 2)
    assert config.tape == ("0", "1", "_")


def test_validate_ptm_reports_violations():
    m = machines.first_bit_decider()
    broken = PTM(
        states=m.states,
        start_state="missing",
        accept_state="yes",
        reject_state="yes",
        tape_alphabet=m.tape_alphabet,
        blank="?",
        input_alphabet=("?",),
        bits_per_step=1,
        transitions={("go", "0", "expected-two-bits"): ("0", "X", "nowhere")},
    )
    violations = validate_ptm(broken)
    text = "\n".join(violations)
    assert "start_state" in text
    assert "must differ" in text
    assert "blank" in text
    assert "move" in text
    assert "missing transition" in text
    with pytest.raises(PTMValidationError):
        check_ptm(broken)
    assert validate_ptm(m) == []


def test_lint_flags_greedy_bit_draws():
    skeleton = PTM(
        states=("go", "yes", "no"),
        start_state="go",
        accept_state="yes",
        reject_state="no",
        tape_alphabet=("_",),
        blank="_",
        input_alphabet=(),
        bits_per_step=9,
        transitions={},
    )
    assert any("log2" in w for w in lint_ptm(skeleton))
    assert lint_ptm(machines.two_bit_dice()) == []


def test_acceptance_probability_direct_cases():
    assert acceptance_probability(machines.always_accept(), "", 2) == 1
    assert acceptance_probability(machines.always_reject(), "", 2) == 0
    assert acceptance_probability(machines.first_bit_decider(), "", 3) == Fraction(1, 2)
    assert acceptance_probability(machines.two_bit_dice(), "", 2) == Fraction(3, 4)
    looper = outcome_probabilities(machines.forever_looper(), "", 4)
    assert looper[ACCEPTED] == 0
    assert looper[UNHALTED] == 1


def test_coin_cascade_quarter_by_brute_force():
    m = machines.coin_cascade()
    oracle = brute_force_outcomes(m, "", 3)
    assert oracle[ACCEPTED] == Fraction(1, 4)
    assert acceptance_probability(m, "", 3) == Fraction(1, 4)


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_enumeration_matches_step_semantics(label, machine, input_string, steps):
    oracle = brute_force_outcomes(machine, input_string, steps)
    fast = outcome_probabilities(machine, input_string, steps)
    assert fast == oracle
    assert sum(fast.values()) == 1


def test_run_sampled_always_accept_any_seed():
    m = machines.always_accept()
    for seed in range(25):
        assert run_sampled(m, "", 2, RandomStream(seed, 0)) == ACCEPTED


def test_run_sampled_tracks_first_stream_bit():
    m = machines.first_bit_decider()
    for seed in range(50):
        first = RandomStream(seed, 0).draw_bits(3)[0]
        expected = ACCEPTED if first == "1" else REJECTED
        assert run_sampled(m, "", 3, RandomStream(seed, 0)) == expected


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_sampled_frequency_matches_exact(label, machine, input_string, steps):
    exact = outcome_probabilities(machine, input_string, steps)
    trials = 1500
    hits = {ACCEPTED: 0, REJECTED: 0, UNHALTED: 0}
    for i in range(trials):
        hits[run_sampled(machine, input_string, steps,
                         RandomStream(977, i))] += 1
    for outcome, p in exact.items():
        sigma = (float(p) * (1 - float(p)) / trials) ** 0.5
        assert abs(hits[outcome] / trials - float(p)) <= 3 * sigma


def test_decide_frequency_three_quarters():
    m = machines.three_quarters_coin()
    assert acceptance_probability(m, "", 2) == Fraction(3, 4)
    trials = 10_000
    yes = sum(
        decide_error_ptm_acceptance(m, "", 2, RandomStream(31337, i))
        for i in range(trials)
    )
    assert 0.737 <= yes / trials <= 0.763


def test_decide_deterministic_machines():
    for i in range(20):
        assert decide_error_ptm_acceptance(
            machines.always_accept(), "", 2, RandomStream(5, i)) is True
        assert decide_error_ptm_acceptance(
            machines.always_reject(), "", 2, RandomStream(5, i)) is False


def test_decide_folds_unhalted_to_no():
    m = machines.forever_looper()
    assert all(
        decide_error_ptm_acceptance(m, "", 4, RandomStream(9, i)) is False
        for i in range(20)
    )


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        acceptance_probability(machines.two_bit_dice(), "", 13)


def test_clockify_runs_exactly_to_deadline():
    m = machines.three_quarters_coin()  # halts within 2 steps
    clocked = clockify(m, 5)
    for pattern in itertools.product("01", repeat=5):
        bits = "".join(pattern)
        original = run_exact_steps(m, initial_configuration(m, "", 5), bits)
        padded = run_exact_steps(
            clocked, initial_configuration(clocked, "", 5), bits)
        assert padded.step == 5
        assert clocked.is_halting(padded.state)
        assert (padded.state == "accept") == (original.state == "yes")


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_clockify_preserves_acceptance_exactly(label, machine, input_string, steps):
    clocked = clockify(machine, steps)
    assert validate_ptm(clocked) == []
    before = outcome_probabilities(machine, input_string, steps)
    after = outcome_probabilities(clocked, input_string, steps)
    assert after[ACCEPTED] == before[ACCEPTED]
    # unhalted mass folds into rejection, so the padded machine always halts
    assert after[REJECTED] == before[REJECTED] + before[UNHALTED]
    assert after[UNHALTED] == 0


def test_clockify_rejects_bad_deadline():
    with pytest.raises(ValueError):
        clockify(machines.always_accept(), 0)


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_machine_json_round_trip(label, machine, input_string, steps):
    assert machine_from_json(machine_to_json(machine)) == machine


def test_load_drops_halting_state_rows():
    payload = machine_to_json(machines.always_accept())
    payload["transitions"].append(
        {"state": "yes", "read": "_", "bits": "0",
         "write": "_", "move": "S", "next": "no"})
    loaded = machine_from_json(payload)
    assert ("yes", "_", "0") not in loaded.transitions


def test_machine_file_io_is_byte_stable(tmp_path):
    m = machines.mark_sweeper()
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    save_machine(m, first)
    save_machine(load_machine(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_malformed_machine_document():
    with pytest.raises(PTMValidationError):
        machine_from_json({"states": ["a"]})
    with pytest.raises(PTMValidationError):
        machine_from_json(json.loads('{"transitions": "nope"}'))


def test_build_machine_rejects_incomplete_rule():
    with pytest.raises(PTMValidationError):
        build_machine(("go", "yes", "no"), "go", "yes", "no",
                      ("_",), "_", (), 1,
                      lambda s, a, b: (a, "not-a-move", "yes"))
