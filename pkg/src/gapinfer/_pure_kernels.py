"""Pure-Python machine-stepping kernels.

This is the fallback twin of the compiled extension ``_ptm_kernels``; the
two must agree bit for bit (see tests/test_kernels.py).  Both operate on
the flat integer encoding produced by ``ptm.MachineTables``: transition
tables are arrays indexed by ``(state * num_symbols + symbol) *
2**bits_per_step + bit_pattern``, with -1 in ``next_state`` marking a
missing transition.  Keeping the interface primitive (ints, arrays,
bytes) is what lets the compiled version drop straight to C loops.
"""

from __future__ import annotations

from .errors import MissingTransition

OUTCOME_ACCEPTED = 0
OUTCOME_REJECTED = 1
OUTCOME_UNHALTED = 2


def run_outcome(next_state, write_sym, move, num_symbols, bits_per_step,
                start, accept, reject, tape, steps, bits):
    """Run one simulation of ``steps`` steps driven by ``bits`` (ASCII '0'/'1').

    ``tape`` is an array of symbol indices covering the whole window; it is
    mutated in place.  Returns one of the OUTCOME_* codes for the final state.
    """
    width = 1 << bits_per_step
    last_cell = len(tape) - 1
    state = start
    head = 0
    for i in range(steps):
        if state == accept or state == reject:
            break
        pattern = 0
        base = i * bits_per_step
        for j in range(bits_per_step):
            pattern = (pattern << 1) | (bits[base + j] - 48)
        index = (state * num_symbols + tape[head]) * width + pattern
        target = next_state[index]
        if target < 0:
            raise MissingTransition(
                f"no transition for state {state}, symbol {tape[head]}, "
                f"bits {pattern:0{bits_per_step}b}"
            )
        tape[head] = write_sym[index]
        head += move[index]
        if head < 0:
            head = 0
        elif head > last_cell:
            head = last_cell
        state = target
    if state == accept:
        return OUTCOME_ACCEPTED
    if state == reject:
        return OUTCOME_REJECTED
    return OUTCOME_UNHALTED


def count_outcomes(next_state, write_sym, move, num_symbols, bits_per_step,
                   start, accept, reject, tape, steps):
    """Exact counts of (accepted, rejected, unhalted) runs over all bit strings.

    Walks the tree of bit patterns depth-first, mutating ``tape`` and undoing
    on backtrack; a run that halts after d steps covers a whole cylinder of
    2**(bits_per_step * (steps - d)) bit strings, counted without descending.
    """
    width = 1 << bits_per_step
    last_cell = len(tape) - 1

    def descend(state, head, depth):
        remaining = width ** (steps - depth)
        if state == accept:
            return remaining, 0, 0
        if state == reject:
            return 0, remaining, 0
        if depth == steps:
            return 0, 0, 1
        accepted = rejected = unhalted = 0
        symbol = tape[head]
        row = (state * num_symbols + symbol) * width
        for pattern in range(width):
            index = row + pattern
            target = next_state[index]
            if target < 0:
                raise MissingTransition(
                    f"no transition for state {state}, symbol {symbol}, "
                    f"bits {pattern:0{bits_per_step}b}"
                )
            tape[head] = write_sym[index]
            new_head = head + move[index]
            if new_head < 0:
                new_head = 0
            elif new_head > last_cell:
                new_head = last_cell
            a, r, u = descend(target, new_head, depth + 1)
            accepted += a
            rejected += r
            unhalted += u
            tape[head] = symbol
        return accepted, rejected, unhalted

    return descend(start, 0, 0)
