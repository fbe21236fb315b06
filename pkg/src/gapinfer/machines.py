"""A small zoo of concrete machines used in tests, demos and benchmarks.

Each factory returns a validated machine with at most four states.  The
collection is deliberately varied: deterministic accepters/rejecters,
purely bit-driven coins and dice, tape-dependent walkers, a machine that
leans on head clamping, and one that never halts.  ``fixture_runs``
pairs each machine with a representative (input, steps) so suites can
sweep the whole zoo.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .ptm import PTM, LEFT, RIGHT, STAY, bit_patterns, check_ptm

Rule = Callable[[str, str, str], tuple[str, str, str]]


def build_machine(states: Sequence[str], start: str, accept: str, reject: str,
                  tape_alphabet: Sequence[str], blank: str,
                  input_alphabet: Sequence[str], bits_per_step: int,
                  rule: Rule) -> PTM:
    """Assemble a total machine from a rule over non-halting states."""
    transitions = {}
    for state in states:
        if state in (accept, reject):
            continue
        for read in tape_alphabet:
            for bits in bit_patterns(bits_per_step):
                transitions[(state, read, bits)] = rule(state, read, bits)
    return check_ptm(PTM(
        states=tuple(states),
        start_state=start,
        accept_state=accept,
        reject_state=reject,
        tape_alphabet=tuple(tape_alphabet),
        blank=blank,
        input_alphabet=tuple(input_alphabet),
        bits_per_step=bits_per_step,
        transitions=transitions,
    ))


def _binary(rule: Rule, bits_per_step: int = 1,
            states: Sequence[str] = ("go", "yes", "no")) -> PTM:
    return build_machine(states, states[0], "yes", "no",
                         ("0", "1", "_"), "_", ("0", "1"),
                         bits_per_step, rule)


def always_accept() -> PTM:
    """Halts accepting on the first step, whatever the bits say."""
    return _binary(lambda s, a, b: (a, STAY, "yes"))


def always_reject() -> PTM:
    """Halts rejecting on the first step."""
    return _binary(lambda s, a, b: (a, STAY, "no"))


def first_bit_decider() -> PTM:
    """Accepts iff the first random bit is 1; acceptance probability 1/2."""
    return _binary(lambda s, a, b: (a, STAY, "yes" if b == "1" else "no"))


def coin_cascade() -> PTM:
    """Accepts iff the bits at steps 1 and 2 are both 1 (probability 1/4)."""
    def rule(state, read, bits):
        if bits == "0":
            return read, STAY, "no"
        return read, STAY, "yes" if state == "again" else "again"
    return _binary(rule, states=("go", "again", "yes", "no"))


def three_quarters_coin() -> PTM:
    """Accepts unless the first two bits are both 0 (probability 3/4)."""
    def rule(state, read, bits):
        if bits == "1":
            return read, STAY, "yes"
        return read, STAY, "no" if state == "last" else "last"
    return _binary(rule, states=("go", "last", "yes", "no"))


def two_bit_dice() -> PTM:
    """Draws two bits in one step; accepts on anything but 00 (probability 3/4)."""
    return _binary(lambda s, a, b: (a, STAY, "no" if b == "00" else "yes"),
                   bits_per_step=2)


def parity_pair() -> PTM:
    """Draws two bits per step; accepts iff they disagree (probability 1/2)."""
    return _binary(lambda s, a, b: (a, STAY, "yes" if b in ("01", "10") else "no"),
                   bits_per_step=2)


def random_walker() -> PTM:
    """Walks right on bit 1 and left on 0 (clamped); accepts upon reading a 1.

    Started next to a 1 cell, acceptance depends on the walk reaching it
    within the step budget, so some probability mass stays unhalted.
    """
    def rule(state, read, bits):
        if read == "1":
            return read, STAY, "yes"
        return read, RIGHT if bits == "1" else LEFT, "go"
    return _binary(rule)


def mark_sweeper() -> PTM:
    """Stamps marks rightward while drawing 1s, then sweeps back erasing them.

    Accepting requires the sweep to pass the left edge within the budget;
    long stamping streaks leave the run unhalted.
    """
    def rule(state, read, bits):
        if state == "stamp":
            if bits == "1":
                return "x", RIGHT, "stamp"
            return read, LEFT, "sweep"
        if read == "x":
            return "_", LEFT, "sweep"
        return read, STAY, "yes"
    return build_machine(("stamp", "sweep", "yes", "no"), "stamp", "yes", "no",
                         ("0", "1", "x", "_"), "_", ("0", "1"), 1, rule)


def edge_clamper() -> PTM:
    """Deterministically pushes left twice (clamped at cell 0), then accepts."""
    def rule(state, read, bits):
        return read, LEFT, "yes" if state == "push2" else "push2"
    return _binary(rule, states=("push1", "push2", "yes", "no"))


def forever_looper() -> PTM:
    """Spins in place forever; every run ends unhalted."""
    return _binary(lambda s, a, b: (a, STAY, "go"))


def blank_flipper() -> PTM:
    """Deterministic writer: turns blanks into 1s moving right, accepts on
    reading a 1, rejects on reading a 0."""
    def rule(state, read, bits):
        if read == "_":
            return "1", RIGHT, "go"
        return read, STAY, "yes" if read == "1" else "no"
    return _binary(rule)


def fixture_runs() -> list[tuple[str, PTM, str, int]]:
    """(label, machine, input, steps) for every zoo member, each within the
    exhaustive oracle's budget."""
    return [
        ("always_accept", always_accept(), "", 2),
        ("always_reject", always_reject(), "", 2),
        ("first_bit", first_bit_decider(), "", 3),
        ("coin_cascade", coin_cascade(), "", 3),
        ("three_quarters", three_quarters_coin(), "", 4),
        ("two_bit_dice", two_bit_dice(), "", 2),
        ("parity_pair", parity_pair(), "", 3),
        ("random_walker", random_walker(), "01", 5),
        ("mark_sweeper", mark_sweeper(), "", 6),
        ("edge_clamper", edge_clamper(), "0", 4),
        ("forever_looper", forever_looper(), "", 5),
        ("blank_flipper", blank_flipper(), "10", 3),
    ]
