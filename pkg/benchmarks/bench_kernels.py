"""Benchmark the machine-stepping kernels: compiled extension vs the
pure-Python fallback.

Two hot paths are measured: single sampled runs (run_outcome) and full
outcome enumeration over every bit string (count_outcomes).  Both
backends are checked to agree on every workload before timing.

Usage: python benchmarks/bench_kernels.py [--reps N]
"""

import argparse
import sys
import time
from array import array

from gapinfer import _pure_kernels
from gapinfer.machines import forever_looper, mark_sweeper, random_walker
from gapinfer.numerics import RandomStream
from gapinfer.ptm import MachineTables

try:
    from gapinfer import _ptm_kernels
except ImportError:
    _ptm_kernels = None


def best_of(runs, fn):
    timings = []
    for _ in range(runs):
        started = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - started)
    return min(timings)


def bench_run_outcome(backend, machine, text, steps, reps):
    tables = MachineTables.from_machine(machine)
    base_tape = tables.encode_tape(text, steps)
    static = tables.kernel_args()
    total = machine.bits_per_step * steps
    bit_strings = [RandomStream(0, i).draw_bits(total).encode("ascii")
                   for i in range(reps)]

    def run():
        for bits in bit_strings:
            backend.run_outcome(*static, array("i", base_tape), steps, bits)

    return run


def bench_count_outcomes(backend, machine, text, steps):
    tables = MachineTables.from_machine(machine)
    tape = tables.encode_tape(text, steps)
    static = tables.kernel_args()

    def run():
        backend.count_outcomes(*static, tape, steps)

    return run


def check_agreement(machine, text, steps):
    tables = MachineTables.from_machine(machine)
    static = tables.kernel_args()
    total = machine.bits_per_step * steps
    for i in range(25):
        bits = RandomStream(1, i).draw_bits(total).encode("ascii")
        pure = _pure_kernels.run_outcome(
            *static, tables.encode_tape(text, steps), steps, bits)
        fast = _ptm_kernels.run_outcome(
            *static, tables.encode_tape(text, steps), steps, bits)
        if pure != fast:
            raise SystemExit(f"backends disagree on run_outcome: {pure} != {fast}")
    count_steps = min(steps, 18 // machine.bits_per_step)
    pure = _pure_kernels.count_outcomes(
        *static, tables.encode_tape(text, count_steps), count_steps)
    fast = _ptm_kernels.count_outcomes(
        *static, tables.encode_tape(text, count_steps), count_steps)
    if tuple(pure) != tuple(fast):
        raise SystemExit(f"backends disagree on count_outcomes: {pure} != {fast}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=2000,
                        help="sampled runs per stepping workload")
    args = parser.parse_args(argv)

    if _ptm_kernels is None:
        print("compiled extension is not built; nothing to compare")
        return 1

    # Machines that actually keep stepping: the looper never halts, and the
    # walker on a sparse tape rarely reaches its accept symbol early.
    stepping = [
        ("forever_looper steps=2000", forever_looper(), "", 2000),
        ("random_walker steps=1000", random_walker(), "0001000", 1000),
        ("mark_sweeper steps=500", mark_sweeper(), "111", 500),
    ]
    counting = [
        ("forever_looper 2^18 paths", forever_looper(), "", 18),
        ("random_walker 2^16 paths", random_walker(), "0001", 16),
        ("mark_sweeper 2^14 paths", mark_sweeper(), "11", 14),
    ]

    for _, machine, text, steps in stepping + counting:
        check_agreement(machine, text, steps)
    print("backends agree on all workloads\n")

    header = f"{'workload':36} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, machine, text, steps in stepping:
        pure_t = best_of(3, bench_run_outcome(
            _pure_kernels, machine, text, steps, args.reps))
        fast_t = best_of(3, bench_run_outcome(
            _ptm_kernels, machine, text, steps, args.reps))
        print(f"{label:36} {pure_t:10.4f} {fast_t:13.4f} "
              f"{pure_t / fast_t:7.1f}x")
    for label, machine, text, steps in counting:
        pure_t = best_of(3, bench_count_outcomes(
            _pure_kernels, machine, text, steps))
        fast_t = best_of(3, bench_count_outcomes(
            _ptm_kernels, machine, text, steps))
        print(f"{label:36} {pure_t:10.4f} {fast_t:13.4f} "
              f"{pure_t / fast_t:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
