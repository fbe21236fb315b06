"""Probabilistic Turing machines on a bounded tape window.

A machine reads a fixed number of fresh random bits on every step and its
transition may depend on them.  Runs live on the window [0, steps]: a
machine started at cell 0 cannot usefully reach further within the step
budget, and moves off either edge clamp the head in place so every machine
stays total.  Halting states are absorbing.

Two execution routes are kept deliberately separate: the dataclass-level
``step`` / ``run_exact_steps`` semantics here, and the flat integer
kernels (``kernels.run_outcome`` / ``kernels.count_outcomes``) that the
probability oracle and bulk sampling go through.  The test suite holds
them to bit-for-bit agreement.
"""

from __future__ import annotations

import itertools
import json
import math
from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from . import kernels
from .errors import EnumerationTooLarge, MissingTransition, PTMValidationError
from .numerics import RandomStream

LEFT = "L"
RIGHT = "R"
STAY = "S"
MOVES = (LEFT, RIGHT, STAY)

ACCEPTED = "accepted"
REJECTED = "rejected"
UNHALTED = "unhalted"
OUTCOMES = (ACCEPTED, REJECTED, UNHALTED)

# Exhaustive enumeration visits 2**(bits_per_step * steps) runs; this cap
# keeps the oracle under ~17M of them.
ENUMERATION_GUARD_BITS = 24


def bit_patterns(length: int) -> tuple[str, ...]:
    """All bit strings of the given length, in numeric order."""
    return tuple("".join(p) for p in itertools.product("01", repeat=length))


@dataclass(frozen=True)
class PTM:
    """A probabilistic Turing machine drawing ``bits_per_step`` bits per step.

    ``transitions`` maps (state, read symbol, bit string) to
    (write symbol, move, next state) and must be total over non-halting
    states; halting states are absorbing and need no entries (any present
    are ignored by the file loader and by execution).
    """

    states: tuple[str, ...]
    start_state: str
    accept_state: str
    reject_state: str
    tape_alphabet: tuple[str, ...]
    blank: str
    input_alphabet: tuple[str, ...]
    bits_per_step: int
    transitions: Mapping[tuple[str, str, str], tuple[str, str, str]]

    def is_halting(self, state: str) -> bool:
        return state == self.accept_state or state == self.reject_state


@dataclass(frozen=True)
class Configuration:
    """One machine configuration on the window [0, len(tape) - 1]."""

    tape: tuple[str, ...]
    head: int
    state: str
    step: int


def validate_ptm(machine: PTM) -> list[str]:
    """Structural violations as human-readable strings; empty means valid."""
    violations: list[str] = []
    states = machine.states
    if len(set(states)) != len(states):
        violations.append("duplicate state names")
    if len(set(machine.tape_alphabet)) != len(machine.tape_alphabet):
        violations.append("duplicate tape symbols")
    for label, value in (("start_state", machine.start_state),
                         ("accept_state", machine.accept_state),
                         ("reject_state", machine.reject_state)):
        if value not in states:
            violations.append(f"{label} {value!r} not among states")
    if machine.accept_state == machine.reject_state:
        violations.append("accept_state and reject_state must differ")
    if machine.blank not in machine.tape_alphabet:
        violations.append(f"blank {machine.blank!r} not in tape alphabet")
    for symbol in machine.input_alphabet:
        if symbol not in machine.tape_alphabet or symbol == machine.blank:
            violations.append(
                f"input symbol {symbol!r} must be a non-blank tape symbol"
            )
    if machine.bits_per_step < 1:
        violations.append("bits_per_step must be at least 1")
        return violations  # totality below needs a sane pattern width

    for (state, read, bits), (write, move, target) in machine.transitions.items():
        where = f"transition ({state!r}, {read!r}, {bits!r})"
        if state not in states:
            violations.append(f"{where}: unknown source state")
        if read not in machine.tape_alphabet:
            violations.append(f"{where}: unknown read symbol")
        if len(bits) != machine.bits_per_step or set(bits) - {"0", "1"}:
            violations.append(f"{where}: bit pattern must be "
                              f"{machine.bits_per_step} chars of 0/1")
        if write not in machine.tape_alphabet:
            violations.append(f"{where}: unknown write symbol {write!r}")
        if move not in MOVES:
            violations.append(f"{where}: move must be one of L/R/S, got {move!r}")
        if target not in states:
            violations.append(f"{where}: unknown next state {target!r}")

    patterns = bit_patterns(machine.bits_per_step)
    for state in states:
        if machine.is_halting(state):
            continue
        for read in machine.tape_alphabet:
            for bits in patterns:
                if (state, read, bits) not in machine.transitions:
                    violations.append(
                        f"missing transition ({state!r}, {read!r}, {bits!r})"
                    )
    return violations


def lint_ptm(machine: PTM) -> list[str]:
    """Non-fatal style warnings (a machine should not draw more bits per
    step than the log of its own description length)."""
    warnings = []
    description_size = len(json.dumps(machine_to_json(machine)))
    budget = math.log2(description_size)
    if machine.bits_per_step > budget:
        warnings.append(
            f"bits_per_step {machine.bits_per_step} exceeds log2 of the "
            f"description size ({budget:.1f})"
        )
    return warnings


def check_ptm(machine: PTM) -> PTM:
    """Raise PTMValidationError on any violation; returns the machine."""
    violations = validate_ptm(machine)
    if violations:
        raise PTMValidationError(violations)
    return machine


def initial_configuration(machine: PTM, input_string: Sequence[str],
                          steps: int) -> Configuration:
    """Start configuration on the window [0, steps] with the input laid out
    from cell 0 and blanks beyond."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if len(input_string) > steps:
        raise ValueError(
            f"input of length {len(input_string)} does not fit a "
            f"{steps}-step run"
        )
    for symbol in input_string:
        if symbol not in machine.input_alphabet:
            raise ValueError(f"input symbol {symbol!r} not in input alphabet")
    tape = tuple(input_string) + (machine.blank,) * (steps + 1 - len(input_string))
    return Configuration(tape=tape, head=0, state=machine.start_state, step=0)


def step(machine: PTM, config: Configuration, bits: str) -> Configuration:
    """Apply one transition under the given random bits.

    The configuration must not already be halted; ``run_exact_steps`` is
    the absorbing wrapper for whole runs.
    """
    if machine.is_halting(config.state):
        raise ValueError("cannot step a halted configuration")
    if len(bits) != machine.bits_per_step:
        raise ValueError(
            f"expected {machine.bits_per_step} bits, got {len(bits)}"
        )
    key = (config.state, config.tape[config.head], bits)
    try:
        write, move, target = machine.transitions[key]
    except KeyError:
        raise MissingTransition(f"no transition for {key!r}") from None
    tape = list(config.tape)
    tape[config.head] = write
    head = config.head + {LEFT: -1, RIGHT: 1, STAY: 0}[move]
    head = min(max(head, 0), len(tape) - 1)
    return Configuration(tape=tuple(tape), head=head, state=target,
                         step=config.step + 1)


def run_exact_steps(machine: PTM, config: Configuration,
                    bits: str) -> Configuration:
    """Run ``len(bits) / bits_per_step`` steps; halting states absorb, so a
    halted configuration comes back unchanged."""
    r = machine.bits_per_step
    if len(bits) % r != 0:
        raise ValueError(f"bit string length must be a multiple of {r}")
    for i in range(0, len(bits), r):
        if machine.is_halting(config.state):
            break
        config = step(machine, config, bits[i:i + r])
    return config


def classify_state(machine: PTM, state: str) -> str:
    if state == machine.accept_state:
        return ACCEPTED
    if state == machine.reject_state:
        return REJECTED
    return UNHALTED


@dataclass(frozen=True)
class MachineTables:
    """Flat integer encoding of a machine for the stepping kernels.

    Tables are indexed by ``(state * num_symbols + symbol) * 2**r + bits``
    with the first-drawn bit as the most significant; -1 in ``next_state``
    marks a missing transition, surfaced lazily only if a run hits it.
    """

    num_states: int
    num_symbols: int
    bits_per_step: int
    start: int
    accept: int
    reject: int
    next_state: array
    write_sym: array
    move: array
    symbol_index: Mapping[str, int]
    blank: str
    input_alphabet: tuple[str, ...]

    @classmethod
    def from_machine(cls, machine: PTM) -> "MachineTables":
        state_index = {s: i for i, s in enumerate(machine.states)}
        symbol_index = {a: i for i, a in enumerate(machine.tape_alphabet)}
        width = 1 << machine.bits_per_step
        size = len(machine.states) * len(machine.tape_alphabet) * width
        next_state = array("i", [-1]) * size
        write_sym = array("i", [0]) * size
        move = array("i", [0]) * size
        move_delta = {LEFT: -1, RIGHT: 1, STAY: 0}
        for (state, read, bits), (write, mv, target) in machine.transitions.items():
            if machine.is_halting(state):
                continue
            index = ((state_index[state] * len(symbol_index)
                      + symbol_index[read]) * width + int(bits, 2))
            next_state[index] = state_index[target]
            write_sym[index] = symbol_index[write]
            move[index] = move_delta[mv]
        return cls(
            num_states=len(machine.states),
            num_symbols=len(machine.tape_alphabet),
            bits_per_step=machine.bits_per_step,
            start=state_index[machine.start_state],
            accept=state_index[machine.accept_state],
            reject=state_index[machine.reject_state],
            next_state=next_state,
            write_sym=write_sym,
            move=move,
            symbol_index=symbol_index,
            blank=machine.blank,
            input_alphabet=machine.input_alphabet,
        )

    def encode_tape(self, input_string: Sequence[str], steps: int) -> array:
        if len(input_string) > steps:
            raise ValueError(
                f"input of length {len(input_string)} does not fit a "
                f"{steps}-step run"
            )
        for symbol in input_string:
            if symbol not in self.input_alphabet:
                raise ValueError(
                    f"input symbol {symbol!r} not in input alphabet"
                )
        cells = [self.symbol_index[s] for s in input_string]
        cells += [self.symbol_index[self.blank]] * (steps + 1 - len(cells))
        return array("i", cells)

    def kernel_args(self) -> tuple:
        return (self.next_state, self.write_sym, self.move,
                self.num_symbols, self.bits_per_step,
                self.start, self.accept, self.reject)


def run_sampled(machine: PTM, input_string: Sequence[str], steps: int,
                stream: RandomStream) -> str:
    """One sampled run of exactly ``steps`` steps; all random bits are drawn
    up front so the bits consumed never depend on when the machine halts.
    Returns "accepted", "rejected" or "unhalted".
    """
    tables = MachineTables.from_machine(machine)
    tape = tables.encode_tape(input_string, steps)
    total = machine.bits_per_step * steps
    bits = stream.draw_bits(total).encode("ascii") if total else b""
    code = kernels.run_outcome(*tables.kernel_args(), tape, steps, bits)
    return OUTCOMES[code]


def outcome_probabilities(machine: PTM, input_string: Sequence[str],
                          steps: int) -> dict[str, Fraction]:
    """Exact accepted/rejected/unhalted probabilities after ``steps`` steps,
    by enumerating every bit string (one pass computes all three)."""
    total_bits = machine.bits_per_step * steps
    if total_bits > ENUMERATION_GUARD_BITS:
        raise EnumerationTooLarge(
            f"{total_bits} random bits means 2^{total_bits} runs; "
            f"the guard is {ENUMERATION_GUARD_BITS}"
        )
    tables = MachineTables.from_machine(machine)
    tape = tables.encode_tape(input_string, steps)
    accepted, rejected, unhalted = kernels.count_outcomes(
        *tables.kernel_args(), tape, steps)
    denominator = 1 << total_bits
    return {
        ACCEPTED: Fraction(accepted, denominator),
        REJECTED: Fraction(rejected, denominator),
        UNHALTED: Fraction(unhalted, denominator),
    }


def acceptance_probability(machine: PTM, input_string: Sequence[str],
                           steps: int) -> Fraction:
    """Exact probability that the machine halts accepting within ``steps``."""
    return outcome_probabilities(machine, input_string, steps)[ACCEPTED]


def decide_error_ptm_acceptance(machine: PTM, input_string: Sequence[str],
                                steps: int, stream: RandomStream) -> bool:
    """Single-run decision: Yes iff the sampled run halts accepting.

    Runs still unhalted at the deadline count as No; the question being
    decided compares accepting runs against everything else.
    """
    return run_sampled(machine, input_string, steps, stream) == ACCEPTED


def clockify(machine: PTM, deadline: int) -> PTM:
    """Pad a machine so every run lasts exactly ``deadline`` steps.

    The returned machine tracks the step count in its state, idles in a
    holding state once the original halts early, and enters accept/reject
    only at the deadline, according to the original's outcome at that
    point (runs still unhalted map to reject).  Acceptance probability at
    ``deadline`` is preserved exactly.
    """
    if deadline < 1:
        raise ValueError("deadline must be at least 1")

    def name(level: int, state: str) -> str:
        if level == deadline:
            return "accept" if state == machine.accept_state else "reject"
        if state == machine.accept_state:
            return f"hold_accept_{level}"
        if state == machine.reject_state:
            return f"hold_reject_{level}"
        return f"run_{level}_{state}"

    patterns = bit_patterns(machine.bits_per_step)
    states: list[str] = []
    transitions: dict[tuple[str, str, str], tuple[str, str, str]] = {}
    for level in range(deadline):
        for state in machine.states:
            here = name(level, state)
            states.append(here)
            for read in machine.tape_alphabet:
                if machine.is_halting(state):
                    for bits in patterns:
                        transitions[(here, read, bits)] = (
                            read, STAY, name(level + 1, state))
                    continue
                for bits in patterns:
                    rule = machine.transitions.get((state, read, bits))
                    if rule is None:
                        raise MissingTransition(
                            f"no transition for {(state, read, bits)!r}")
                    write, move, target = rule
                    transitions[(here, read, bits)] = (
                        write, move, name(level + 1, target))
    states.extend(["accept", "reject"])
    return PTM(
        states=tuple(states),
        start_state=name(0, machine.start_state),
        accept_state="accept",
        reject_state="reject",
        tape_alphabet=machine.tape_alphabet,
        blank=machine.blank,
        input_alphabet=machine.input_alphabet,
        bits_per_step=machine.bits_per_step,
        transitions=transitions,
    )


def machine_to_json(machine: PTM) -> dict:
    """JSON-ready dict; transitions sorted for byte-stable files."""
    rows = [
        {"state": state, "read": read, "bits": bits,
         "write": write, "move": move, "next": target}
        for (state, read, bits), (write, move, target)
        in sorted(machine.transitions.items())
    ]
    return {
        "states": list(machine.states),
        "start_state": machine.start_state,
        "accept_state": machine.accept_state,
        "reject_state": machine.reject_state,
        "tape_alphabet": list(machine.tape_alphabet),
        "blank": machine.blank,
        "input_alphabet": list(machine.input_alphabet),
        "bits_per_step": machine.bits_per_step,
        "transitions": rows,
    }


def machine_from_json(payload: dict) -> PTM:
    """Build and validate a machine; rows leaving a halting state are
    dropped (halting states are absorbing by construction)."""
    try:
        accept = payload["accept_state"]
        reject = payload["reject_state"]
        transitions = {}
        for row in payload["transitions"]:
            if row["state"] in (accept, reject):
                continue
            transitions[(row["state"], row["read"], row["bits"])] = (
                row["write"], row["move"], row["next"])
        machine = PTM(
            states=tuple(payload["states"]),
            start_state=payload["start_state"],
            accept_state=accept,
            reject_state=reject,
            tape_alphabet=tuple(payload["tape_alphabet"]),
            blank=payload["blank"],
            input_alphabet=tuple(payload["input_alphabet"]),
            bits_per_step=payload["bits_per_step"],
            transitions=transitions,
        )
    except (KeyError, TypeError) as exc:
        raise PTMValidationError([f"malformed machine document: {exc}"]) from exc
    return check_ptm(machine)


def save_machine(machine: PTM, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(machine_to_json(machine), handle, indent=2)
        handle.write("\n")


def load_machine(path) -> PTM:
    with open(path, encoding="utf-8") as handle:
        return machine_from_json(json.load(handle))
