"""Command-line front end.

Six subcommands: compile-ptm, verify-compile, validate, infer, reduce,
decide.  Every command prints human-readable lines followed by one
machine-parseable JSON line; given the same arguments and seed the full
output is byte-identical between runs.  All randomness flows from --seed
through numbered streams (trial i reads RandomStream(seed, i)).

Exit codes: 0 success (or a Yes decision), 1 a No decision or UNEQUAL
verification, 2 usage, 3 validation or format problems, 4 runtime guards
(enumeration too large, every sample rejected, and kin).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from .bayesnet import (
    check_promise,
    conditional,
    load_network,
    marginal,
    promise_interval,
    query_probability,
    validate,
)
from .deciders import (
    STATUS_ALL_SAMPLES_REJECTED,
    amplify,
    make_forward_trial,
    rejection_sampling_decider,
    report_to_json,
)
from .errors import (
    AllSamplesRejected,
    EnumerationTooLarge,
    InstanceFormatError,
    MissingTransition,
    NetworkValidationError,
    PTMValidationError,
    ReductionError,
    TooManyVariables,
    UnknownOutcome,
    ZeroEvidence,
)
from .instances import load_instance, save_promise_instance
from .numerics import RandomStream, format_rational
from .ptm import acceptance_probability, load_machine, run_sampled
from .reductions import (
    cond_gadget,
    compile_ptm_to_bn,
    formula_to_bn,
    load_compiled_instance,
    load_formula,
    or_compose,
    save_compiled_instance,
    save_formula,
    validate_formula,
    variables,
)


class UsageError(Exception):
    """Bad flag combination caught after argparse."""


def _say(line: str) -> None:
    print(line)


def _finish(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _guard_overwrite(out_path: str, input_paths) -> None:
    out = os.path.abspath(out_path)
    for path in input_paths:
        if out == os.path.abspath(path):
            raise UsageError(f"--out would overwrite input file {path}")


def _event_text(event) -> str:
    return ", ".join(f"{name} = {event[name]}" for name in sorted(event))


def _parse_assignments(pairs, flag: str) -> dict[str, str]:
    event: dict[str, str] = {}
    for pair in pairs or ():
        name, sep, outcome = pair.partition("=")
        if not sep or not name or not outcome:
            raise UsageError(f"{flag} expects NODE=OUTCOME, got {pair!r}")
        if name in event:
            raise UsageError(f"{flag} assigns {name!r} twice")
        event[name] = outcome
    return event


# ---------------------------------------------------------------------------
# compile-ptm
# ---------------------------------------------------------------------------

def cmd_compile_ptm(args) -> int:
    _guard_overwrite(args.out, [args.machine])
    machine = load_machine(args.machine)
    compiled = compile_ptm_to_bn(machine, args.input, args.steps, args.k)
    save_compiled_instance(compiled, args.out)
    epsilon = compiled.epsilon()
    _say(f"nodes: {len(compiled.network.nodes)}")
    _say(f"query: {compiled.query_node} = {compiled.accept_outcome}")
    _say(f"threshold: {format_rational(compiled.q)}")
    _say(f"epsilon: {format_rational(epsilon)} (k = {compiled.k})")
    _say(f"wrote: {args.out}")
    _finish({
        "command": "compile-ptm",
        "nodes": len(compiled.network.nodes),
        "query_node": compiled.query_node,
        "accept_outcome": compiled.accept_outcome,
        "q": format_rational(compiled.q),
        "epsilon": format_rational(epsilon),
        "k": compiled.k,
        "out": args.out,
    })
    return 0


# ---------------------------------------------------------------------------
# verify-compile
# ---------------------------------------------------------------------------

def cmd_verify_compile(args) -> int:
    machine = load_machine(args.machine)
    oracle = acceptance_probability(machine, args.input, args.steps)
    if args.against:
        compiled = load_compiled_instance(args.against)
    else:
        compiled = compile_ptm_to_bn(machine, args.input, args.steps, k=1)
    computed = marginal(compiled.network,
                        {compiled.query_node: compiled.accept_outcome})
    equal = computed == oracle
    oracle_text = format_rational(oracle)
    computed_text = format_rational(computed)
    if equal:
        _say(f"{oracle_text} == {computed_text} EQUAL")
    else:
        _say(f"{oracle_text} != {computed_text} UNEQUAL")
    _finish({
        "command": "verify-compile",
        "oracle": oracle_text,
        "compiled": computed_text,
        "equal": equal,
    })
    return 0 if equal else 1


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _sniff_kind(payload) -> str:
    if isinstance(payload, list):
        return "formula"
    if isinstance(payload, dict):
        if "transitions" in payload:
            return "machine"
        if "query_node" in payload or "h" in payload:
            return "instance"
        if "nodes" in payload:
            return "network"
    raise InstanceFormatError("file matches no known document shape")


def cmd_validate(args) -> int:
    with open(args.file, encoding="utf-8") as handle:
        payload = json.load(handle)
    kind = _sniff_kind(payload)
    _say(f"kind: {kind}")
    violations: list[str] = []
    if kind == "machine":
        from .ptm import machine_from_json
        try:
            machine_from_json(payload)
        except PTMValidationError as exc:
            violations = exc.violations
    elif kind == "network":
        from .bayesnet import network_from_json
        try:
            validate(network_from_json(payload))
        except NetworkValidationError as exc:
            violations = exc.violations
    elif kind == "formula":
        from .reductions import formula_from_json
        try:
            violations = validate_formula(formula_from_json(payload))
        except ReductionError as exc:
            violations = [str(exc)]
    else:
        from .instances import instance_from_json
        try:
            instance_from_json(payload)
        except (InstanceFormatError, ReductionError,
                NetworkValidationError) as exc:
            violations = [str(exc)]
    for violation in violations:
        _say(f"violation: {violation}")
    if not violations:
        _say("OK")
    _finish({
        "command": "validate",
        "kind": kind,
        "violations": violations,
    })
    return 0 if not violations else 3


# ---------------------------------------------------------------------------
# infer
# ---------------------------------------------------------------------------

def _half_width(hits: int, kept: int) -> float:
    p = hits / kept
    if 0 < p < 1:
        return 3 * math.sqrt(p * (1 - p) / kept)
    return 3 / kept


def cmd_infer(args) -> int:
    network = load_network(args.network)
    h = _parse_assignments(args.query, "--query")
    e = _parse_assignments(args.evidence, "--evidence")
    if not h:
        raise UsageError("infer needs at least one --query NODE=OUTCOME")
    overlap = sorted(set(h) & set(e))
    if overlap:
        raise UsageError(f"query and evidence overlap on {overlap}")
    query_text = "Pr(" + _event_text(h) \
        + (f" | {_event_text(e)}" if e else "") + ")"
    if not args.sample:
        value = conditional(network, h, e) if e else marginal(network, h)
        _say(f"{query_text} = {format_rational(value)}")
        _finish({
            "command": "infer",
            "mode": "exact",
            "query": query_text,
            "value": format_rational(value),
        })
        return 0

    if args.trials < 1:
        raise UsageError("--trials must be positive")
    from .bayesnet import ForwardSampler
    sampler = ForwardSampler(network)
    kept = 0
    hits = 0
    for i in range(args.trials):
        sample = sampler.sample(RandomStream(args.seed, i))
        if any(sample[name] != outcome for name, outcome in e.items()):
            continue
        kept += 1
        if all(sample[name] == outcome for name, outcome in h.items()):
            hits += 1
    if kept == 0:
        raise AllSamplesRejected(
            f"none of {args.trials} samples matched the evidence")
    estimate = Fraction(hits, kept)
    width = _half_width(hits, kept)
    _say(f"trials: {args.trials}")
    _say(f"retained: {kept}")
    _say(f"{query_text} ~ {float(estimate):.6f} +- {width:.6f}")
    _finish({
        "command": "infer",
        "mode": "sample",
        "query": query_text,
        "trials": args.trials,
        "retained": kept,
        "estimate": format_rational(estimate),
        "half_width": f"{width:.6f}",
        "seed": args.seed,
    })
    return 0


# ---------------------------------------------------------------------------
# reduce
# ---------------------------------------------------------------------------

def cmd_reduce(args) -> int:
    if args.or_compose:
        _guard_overwrite(args.out, args.or_compose)
        formulas = [load_formula(path) for path in args.or_compose]
        composed, k = or_compose(formulas)
        save_formula(composed, args.out)
        shared = len(variables(composed)) - 1
        _say("op: or-compose")
        _say(f"inputs: {len(formulas)}")
        _say(f"k: {k} (shared variables: {shared})")
        _say(f"wrote: {args.out}")
        _finish({
            "command": "reduce",
            "op": "or-compose",
            "inputs": len(formulas),
            "k": k,
            "out": args.out,
        })
        return 0

    if args.formula_to_bn:
        if args.k is None:
            raise UsageError("--formula-to-bn needs -k")
        _guard_overwrite(args.out, [args.formula_to_bn])
        formula = load_formula(args.formula_to_bn)
        compiled = formula_to_bn(formula, args.k)
        save_compiled_instance(compiled, args.out)
        _say("op: formula-to-bn")
        _say(f"variables: {len(variables(formula))}")
        _say(f"nodes: {len(compiled.network.nodes)}")
        _say(f"query: {compiled.query_node} = {compiled.accept_outcome}")
        _say(f"threshold: {format_rational(compiled.q)}")
        _say(f"epsilon: {format_rational(compiled.epsilon())} (k = {compiled.k})")
        _say(f"wrote: {args.out}")
        _finish({
            "command": "reduce",
            "op": "formula-to-bn",
            "nodes": len(compiled.network.nodes),
            "query_node": compiled.query_node,
            "q": format_rational(compiled.q),
            "k": compiled.k,
            "out": args.out,
        })
        return 0

    _guard_overwrite(args.out, [args.gadgetize])
    inst = load_instance(args.gadgetize)
    gadget = cond_gadget(inst)
    save_promise_instance(gadget, args.out)
    _say("op: gadgetize")
    _say(f"nodes: {len(gadget.network.nodes)}")
    _say(f"query: Pr({_event_text(gadget.h)} | {_event_text(gadget.e)})")
    _say(f"threshold: {format_rational(gadget.q)}")
    _say(f"epsilon: {format_rational(gadget.epsilon)}")
    _say(f"wrote: {args.out}")
    _finish({
        "command": "reduce",
        "op": "gadgetize",
        "nodes": len(gadget.network.nodes),
        "q": format_rational(gadget.q),
        "epsilon": format_rational(gadget.epsilon),
        "out": args.out,
    })
    return 0


# ---------------------------------------------------------------------------
# decide
# ---------------------------------------------------------------------------

def _report_promise(inst) -> None:
    p = query_probability(inst)
    low, high = promise_interval(inst)
    interval = f"({format_rational(low)}, {format_rational(high)})"
    if check_promise(inst):
        _say(f"promise holds: Pr = {format_rational(p)} outside {interval}")
    else:
        _say(f"WARNING: promise violated: Pr = {format_rational(p)} "
             f"inside {interval}")


def cmd_decide(args) -> int:
    if args.method == "ptm":
        if args.input is None or args.steps is None:
            raise UsageError("--method ptm needs --input and --steps")
        if args.check_promise:
            raise UsageError("--check-promise applies to instance files only")
        machine = load_machine(args.file)
        outcome = run_sampled(machine, args.input, args.steps,
                              RandomStream(args.seed, 0))
        decision = outcome == "accepted"
        _say("method: ptm")
        _say(f"steps: {args.steps}")
        _say(f"outcome: {outcome}")
        _say(f"decision: {'Yes' if decision else 'No'}")
        _finish({
            "command": "decide",
            "method": "ptm",
            "outcome": outcome,
            "decision": "yes" if decision else "no",
            "seed": args.seed,
        })
        return 0 if decision else 1

    inst = load_instance(args.file)
    if args.check_promise:
        _report_promise(inst)

    if args.method == "forward":
        if args.trials % 2 == 0 or args.trials < 1:
            raise UsageError("--method forward needs an odd --trials count")
        report = amplify(make_forward_trial(inst), args.trials, args.seed,
                         advantage=inst.epsilon / 2)
        decision = report.decision
        _say("method: forward")
        _say(f"trials: {report.trials}")
        _say(f"accepts: {report.accept_count}")
    else:
        report = rejection_sampling_decider(inst, args.trials, args.seed)
        _say("method: rejection")
        _say(f"trials: {report.trials}")
        _say(f"retained: {report.retained}")
        if report.status == STATUS_ALL_SAMPLES_REJECTED:
            _say("all samples rejected; no estimate")
            _finish({
                "command": "decide",
                "method": "rejection",
                "decision": "none",
                "report": report_to_json(report),
                "seed": args.seed,
            })
            raise AllSamplesRejected(
                f"none of {args.trials} samples matched the evidence")
        _say(f"estimate: {float(report.estimate):.6f} "
             f"({format_rational(report.estimate)})")
        _say(f"threshold: {format_rational(inst.q)}")
        decision = report.decision

    _say(f"decision: {'Yes' if decision else 'No'}")
    _finish({
        "command": "decide",
        "method": args.method,
        "decision": "yes" if decision else "no",
        "report": report_to_json(report),
        "seed": args.seed,
    })
    return 0 if decision else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapinfer",
        description="Exact and sampled inference over gap promise instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile-ptm",
                       help="unroll a machine run into a layered network")
    p.add_argument("machine", help="machine JSON file")
    p.add_argument("--input", default="", help="input string (default empty)")
    p.add_argument("--steps", type=int, required=True, help="steps to unroll")
    p.add_argument("-k", type=int, default=1, help="gap parameter (default 1)")
    p.add_argument("--out", required=True, help="instance file to write")
    p.set_defaults(func=cmd_compile_ptm)

    p = sub.add_parser("verify-compile",
                       help="check compiled marginal against enumeration")
    p.add_argument("machine", help="machine JSON file")
    p.add_argument("--input", default="")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--against", default=None,
                   help="verify this instance file instead of recompiling")
    p.set_defaults(func=cmd_verify_compile)

    p = sub.add_parser("validate",
                       help="validate a machine/network/instance/formula file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("infer", help="query a network exactly or by sampling")
    p.add_argument("network", help="network JSON file")
    p.add_argument("--query", action="append", metavar="NODE=OUTCOME")
    p.add_argument("--evidence", action="append", metavar="NODE=OUTCOME")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=False,
                      help="exact rational answer (the default mode)")
    mode.add_argument("--sample", action="store_true", default=False,
                      help="seeded forward/rejection sampling estimate")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("reduce", help="apply a reduction, writing a new file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--or-compose", nargs="+", metavar="FORMULA",
                       help="disjoin formulas over a fresh selector variable")
    group.add_argument("--formula-to-bn", metavar="FORMULA",
                       help="compile a formula into a counting network")
    group.add_argument("--gadgetize", metavar="INSTANCE",
                       help="wrap an unconditional instance in the "
                            "conditional coin gadget")
    p.add_argument("-k", type=int, default=None,
                   help="gap parameter for --formula-to-bn")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("decide", help="decide an instance or run a machine")
    p.add_argument("file", help="instance file (or machine file for ptm)")
    p.add_argument("--method", choices=("forward", "rejection", "ptm"),
                   required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=101)
    p.add_argument("--check-promise", action="store_true", default=False)
    p.add_argument("--input", default=None, help="machine input (ptm method)")
    p.add_argument("--steps", type=int, default=None,
                   help="machine steps (ptm method)")
    p.set_defaults(func=cmd_decide)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: not valid JSON: {exc}", file=sys.stderr)
        return 3
    except (NetworkValidationError, PTMValidationError) as exc:
        for violation in exc.violations:
            print(f"error: {violation}", file=sys.stderr)
        return 3
    except (InstanceFormatError, ReductionError, UnknownOutcome,
            ZeroEvidence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (AllSamplesRejected, EnumerationTooLarge, MissingTransition,
            TooManyVariables) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
