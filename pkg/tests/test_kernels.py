"""Backend parity: the compiled kernels must match the pure twin exactly.

Every check here runs the same inputs through both implementations and
requires identical results: outcome codes for single runs, and exact
integer counts for exhaustive enumeration.  When the extension is not
built, the parity checks skip (the rest of the suite then exercises the
pure path alone).
"""

import pytest

from gapinfer import _pure_kernels, kernels
from gapinfer.errors import MissingTransition
from gapinfer.machines import fixture_runs, two_bit_dice
from gapinfer.numerics import RandomStream
from gapinfer.ptm import PTM, STAY, MachineTables

compiled = pytest.importorskip(
    "gapinfer._ptm_kernels", reason="compiled kernels not built")

FIXTURES = fixture_runs()


def test_selected_backend_is_reported():
    assert kernels.KERNEL_BACKEND in ("pure", "compiled")
    assert kernels.run_outcome is getattr(
        _pure_kernels if kernels.KERNEL_BACKEND == "pure" else compiled,
        "run_outcome")


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_run_outcome_parity(label, machine, input_string, steps):
    tables = MachineTables.from_machine(machine)
    for seed in range(40):
        bits = RandomStream(seed, 0).draw_bits(
            machine.bits_per_step * steps).encode("ascii")
        pure = _pure_kernels.run_outcome(
            *tables.kernel_args(), tables.encode_tape(input_string, steps),
            steps, bits)
        fast = compiled.run_outcome(
            *tables.kernel_args(), tables.encode_tape(input_string, steps),
            steps, bits)
        assert pure == fast


@pytest.mark.parametrize("label,machine,input_string,steps",
                         FIXTURES, ids=[f[0] for f in FIXTURES])
def test_count_outcomes_parity(label, machine, input_string, steps):
    tables = MachineTables.from_machine(machine)
    pure = _pure_kernels.count_outcomes(
        *tables.kernel_args(), tables.encode_tape(input_string, steps), steps)
    fast = compiled.count_outcomes(
        *tables.kernel_args(), tables.encode_tape(input_string, steps), steps)
    assert pure == fast
    assert sum(pure) == 1 << (machine.bits_per_step * steps)


def test_count_outcomes_parity_near_guard():
    # the largest enumeration either backend is asked to do: 2^18 runs here
    machine = two_bit_dice()
    tables = MachineTables.from_machine(machine)
    steps = 9
    pure = _pure_kernels.count_outcomes(
        *tables.kernel_args(), tables.encode_tape("", steps), steps)
    fast = compiled.count_outcomes(
        *tables.kernel_args(), tables.encode_tape("", steps), steps)
    assert pure == fast
    assert sum(pure) == 1 << 18


def test_missing_transition_parity():
    partial = PTM(
        states=("go", "yes", "no"),
        start_state="go",
        accept_state="yes",
        reject_state="no",
        tape_alphabet=("_",),
        blank="_",
        input_alphabet=(),
        bits_per_step=1,
        transitions={("go", "_", "0"): ("_", STAY, "yes")},
    )
    tables = MachineTables.from_machine(partial)
    for impl in (_pure_kernels, compiled):
        with pytest.raises(MissingTransition):
            impl.run_outcome(*tables.kernel_args(),
                             tables.encode_tape("", 1), 1, b"1")
        with pytest.raises(MissingTransition):
            impl.count_outcomes(*tables.kernel_args(),
                                tables.encode_tape("", 1), 1)
