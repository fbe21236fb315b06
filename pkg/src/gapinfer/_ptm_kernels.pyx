# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled machine-stepping kernels.

Twin of ``_pure_kernels`` with the identical contract; see that module for
the table layout.  tests/test_kernels.py holds the two to byte-for-byte
agreement on outcomes and exact counts.
"""

from gapinfer.errors import MissingTransition

OUTCOME_ACCEPTED = 0
OUTCOME_REJECTED = 1
OUTCOME_UNHALTED = 2


def run_outcome(int[:] next_state, int[:] write_sym, int[:] move,
                int num_symbols, int bits_per_step,
                int start, int accept, int reject,
                int[:] tape, int steps, const unsigned char[:] bits):
    """Run one simulation of ``steps`` steps driven by ``bits`` (ASCII '0'/'1')."""
    cdef int width = 1 << bits_per_step
    cdef int last_cell = tape.shape[0] - 1
    cdef int state = start
    cdef int head = 0
    cdef int i, j, base, pattern, index, target
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
                f"bit pattern {pattern}"
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


cdef void _descend(int[:] next_state, int[:] write_sym, int[:] move,
                   int num_symbols, int bits_per_step, int width,
                   int accept, int reject, int[:] tape, int last_cell,
                   int steps, int state, int head, int depth,
                   long long* counts) except *:
    cdef long long remaining
    cdef int symbol, row, pattern, index, target, new_head
    if state == accept:
        counts[0] += 1LL << (bits_per_step * (steps - depth))
        return
    if state == reject:
        counts[1] += 1LL << (bits_per_step * (steps - depth))
        return
    if depth == steps:
        counts[2] += 1
        return
    symbol = tape[head]
    row = (state * num_symbols + symbol) * width
    for pattern in range(width):
        index = row + pattern
        target = next_state[index]
        if target < 0:
            raise MissingTransition(
                f"no transition for state {state}, symbol {symbol}, "
                f"bit pattern {pattern}"
            )
        tape[head] = write_sym[index]
        new_head = head + move[index]
        if new_head < 0:
            new_head = 0
        elif new_head > last_cell:
            new_head = last_cell
        _descend(next_state, write_sym, move, num_symbols, bits_per_step,
                 width, accept, reject, tape, last_cell, steps,
                 target, new_head, depth + 1, counts)
        tape[head] = symbol


def count_outcomes(int[:] next_state, int[:] write_sym, int[:] move,
                   int num_symbols, int bits_per_step,
                   int start, int accept, int reject,
                   int[:] tape, int steps):
    """Exact (accepted, rejected, unhalted) counts over all bit strings."""
    cdef long long counts[3]
    counts[0] = counts[1] = counts[2] = 0
    _descend(next_state, write_sym, move, num_symbols, bits_per_step,
             1 << bits_per_step, accept, reject, tape,
             tape.shape[0] - 1, steps, start, 0, 0, counts)
    return counts[0], counts[1], counts[2]
