"""The four constructive reductions.

* ``compile_ptm_to_bn``: unrolls a probabilistic machine run into a layered
  Bayesian network whose only stochastic nodes are the per-step random
  bits; the marginal of the final machine-state node equals the machine's
  exact acceptance probability.
* ``cond_gadget``: turns an unconditional gap query into a conditional one
  over a two-node coin gadget fed by an indicator tree.
* ``or_compose``: the disjunction-with-fresh-variable composition that
  turns a batch of formulas into one majority-gap instance.
* ``formula_to_bn``: circuit-style encoding of a formula, one network node
  per gate, whose output marginal counts satisfying assignments.

Everything here is a pure function from immutable inputs to fresh
structures, and every emitted network passes ``bayesnet.validate``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .bayesnet import (
    ABSOLUTE,
    BayesianNetwork,
    Node,
    PromiseInstance,
    check_network,
    network_from_json,
    network_to_json,
)
from .errors import ReductionError, TooManyVariables, UnknownOutcome
from .numerics import HALF, ONE, format_rational, parse_rational
from .ptm import LEFT, PTM, RIGHT, bit_patterns, check_ptm

MAX_FORMULA_VARIABLES = 20


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[Var, Not, And, Or]


def conj(*children: Formula) -> And:
    return And(children=tuple(children))


def disj(*children: Formula) -> Or:
    return Or(children=tuple(children))


def validate_formula(formula: Formula) -> list[str]:
    violations: list[str] = []

    def walk(node: Formula) -> None:
        if isinstance(node, Var):
            if not node.name:
                violations.append("variable with empty name")
        elif isinstance(node, Not):
            walk(node.child)
        elif isinstance(node, (And, Or)):
            if not node.children:
                violations.append(
                    f"{type(node).__name__.lower()} gate with no children")
            for child in node.children:
                walk(child)
        else:
            violations.append(f"not a formula node: {node!r}")

    walk(formula)
    return violations


def variables(formula: Formula) -> tuple[str, ...]:
    """All variable names, sorted."""
    seen: set[str] = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            seen.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.child)
        else:
            stack.extend(node.children)
    return tuple(sorted(seen))


def eval_formula(formula: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(formula, Var):
        return bool(assignment[formula.name])
    if isinstance(formula, Not):
        return not eval_formula(formula.child, assignment)
    if isinstance(formula, And):
        return all(eval_formula(c, assignment) for c in formula.children)
    if isinstance(formula, Or):
        return any(eval_formula(c, assignment) for c in formula.children)
    raise ReductionError(f"not a formula node: {formula!r}")


def count_satisfying(formula: Formula) -> tuple[int, int]:
    """Brute-force (satisfying count, total assignments) over the formula's
    own variable set."""
    names = variables(formula)
    if len(names) > MAX_FORMULA_VARIABLES:
        raise TooManyVariables(
            f"{len(names)} variables exceeds the enumeration cap of "
            f"{MAX_FORMULA_VARIABLES}")
    count = 0
    for values in itertools.product((False, True), repeat=len(names)):
        if eval_formula(formula, dict(zip(names, values))):
            count += 1
    return count, 1 << len(names)


def is_majority_satisfied(formula: Formula) -> bool:
    count, total = count_satisfying(formula)
    return 2 * count > total


def majority_gap_holds(count: int, total: int, k: int) -> bool:
    """The one-sided majority-gap promise: the satisfying ratio is either
    at most 1/2 or at least 1/2 + 2^-k.  (Read one-sided deliberately: the
    composition below produces ratio exactly 1/2 in its No case.)"""
    ratio = Fraction(count, total)
    return ratio <= HALF or ratio >= HALF + Fraction(1, 2 ** k)


def formula_to_json(formula: Formula) -> list:
    if isinstance(formula, Var):
        return ["var", formula.name]
    if isinstance(formula, Not):
        return ["not", formula_to_json(formula.child)]
    if isinstance(formula, And):
        return ["and", *(formula_to_json(c) for c in formula.children)]
    if isinstance(formula, Or):
        return ["or", *(formula_to_json(c) for c in formula.children)]
    raise ReductionError(f"not a formula node: {formula!r}")


def formula_from_json(payload) -> Formula:
    if not isinstance(payload, (list, tuple)) or not payload:
        raise ReductionError(f"malformed formula document: {payload!r}")
    tag, *rest = payload
    if tag == "var":
        if len(rest) != 1 or not isinstance(rest[0], str) or not rest[0]:
            raise ReductionError(f"malformed var node: {payload!r}")
        return Var(name=rest[0])
    if tag == "not":
        if len(rest) != 1:
            raise ReductionError("not gate takes exactly one child")
        return Not(child=formula_from_json(rest[0]))
    if tag in ("and", "or"):
        if not rest:
            raise ReductionError(f"{tag} gate needs at least one child")
        children = tuple(formula_from_json(c) for c in rest)
        return And(children=children) if tag == "and" else Or(children=children)
    raise ReductionError(f"unknown formula tag {tag!r}")


def save_formula(formula: Formula, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(formula_to_json(formula), handle)
        handle.write("\n")


def load_formula(path) -> Formula:
    with open(path, encoding="utf-8") as handle:
        return formula_from_json(json.load(handle))


def or_compose(formulas: Sequence[Formula]) -> tuple[Formula, int]:
    """Disjoin a batch of formulas (already over shared variables) with one
    fresh variable.

    The result psi satisfies: majority of assignments satisfy psi iff some
    input formula is satisfiable.  All assignments setting the fresh
    variable make psi true (exactly half of them), so the satisfying ratio
    is exactly 1/2 when every input is unsatisfiable and at least
    1/2 + 2^-(n+1) otherwise, n being the shared variable count.  Returns
    (psi, n + 1).
    """
    if not formulas:
        raise ReductionError("or_compose needs at least one formula")
    shared: set[str] = set()
    for formula in formulas:
        bad = validate_formula(formula)
        if bad:
            raise ReductionError("; ".join(bad))
        shared.update(variables(formula))
    fresh = "x0"
    while fresh in shared:
        fresh += "_"
    psi = Or(children=tuple(formulas) + (Var(name=fresh),))
    return psi, len(shared) + 1


@dataclass(frozen=True)
class CompiledInstance:
    """A network plus the single-node threshold query it was built for.

    The gap width is determined by the parameter alone: epsilon = 2^-k.
    """

    network: BayesianNetwork
    query_node: str
    accept_outcome: str
    q: Fraction
    k: int

    def epsilon(self) -> Fraction:
        return Fraction(1, 2 ** self.k)


def as_promise_instance(compiled: CompiledInstance) -> PromiseInstance:
    return PromiseInstance(
        network=compiled.network,
        h={compiled.query_node: compiled.accept_outcome},
        e={},
        q=compiled.q,
        epsilon=compiled.epsilon(),
        gap_kind=ABSOLUTE,
    )


def compiled_instance_to_json(compiled: CompiledInstance) -> dict:
    return {
        "network": network_to_json(compiled.network),
        "query_node": compiled.query_node,
        "accept_outcome": compiled.accept_outcome,
        "q": format_rational(compiled.q),
        "k": compiled.k,
    }


def compiled_instance_from_json(payload: dict) -> CompiledInstance:
    try:
        compiled = CompiledInstance(
            network=network_from_json(payload["network"]),
            query_node=payload["query_node"],
            accept_outcome=payload["accept_outcome"],
            q=parse_rational(payload["q"]),
            k=int(payload["k"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReductionError(f"malformed instance document: {exc}") from exc
    try:
        node = compiled.network.node(compiled.query_node)
    except UnknownOutcome as exc:
        raise ReductionError(str(exc)) from exc
    if compiled.accept_outcome not in node.outcomes:
        raise ReductionError(
            f"query node {compiled.query_node!r} has no outcome "
            f"{compiled.accept_outcome!r}")
    if compiled.k < 1:
        raise ReductionError("parameter k must be positive")
    return compiled


def save_compiled_instance(compiled: CompiledInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(compiled_instance_to_json(compiled), handle, indent=2)
        handle.write("\n")


def load_compiled_instance(path) -> CompiledInstance:
    with open(path, encoding="utf-8") as handle:
        return compiled_instance_from_json(json.load(handle))


def formula_to_bn(formula: Formula, k: int) -> CompiledInstance:
    """Circuit encoding: a uniform binary root per variable, one
    deterministic node per gate, and an OUT node copying the top gate.

    Pr(OUT = true) is exactly (satisfying count) / 2^(variable count).
    Gates of arity m get 2^m CPT rows, so keep arities modest.
    """
    if k < 1:
        raise ReductionError("parameter k must be positive")
    bad = validate_formula(formula)
    if bad:
        raise ReductionError("; ".join(bad))
    names = variables(formula)
    reserved = {f"gate_{i}" for i in range(1, _gate_count(formula) + 1)}
    reserved.add("OUT")
    clash = reserved & set(names)
    if clash:
        raise ReductionError(
            f"variable names collide with generated node names: {sorted(clash)}")

    bools = ("false", "true")
    nodes = [Node(name=v, outcomes=bools, parents=(),
                  cpt={(): {"false": HALF, "true": HALF}}) for v in names]
    counter = itertools.count(1)

    def emit(sub: Formula) -> str:
        if isinstance(sub, Var):
            return sub.name
        if isinstance(sub, Not):
            child = emit(sub.child)
            name = f"gate_{next(counter)}"
            nodes.append(Node(name=name, outcomes=bools, parents=(child,),
                              cpt={("false",): {"true": ONE},
                                   ("true",): {"false": ONE}}))
            return name
        inputs = tuple(emit(c) for c in sub.children)
        name = f"gate_{next(counter)}"
        fold = all if isinstance(sub, And) else any
        cpt = {}
        for row in itertools.product(bools, repeat=len(inputs)):
            value = fold(v == "true" for v in row)
            cpt[row] = {bools[value]: ONE}
        nodes.append(Node(name=name, outcomes=bools, parents=inputs, cpt=cpt))
        return name

    top = emit(formula)
    nodes.append(Node(name="OUT", outcomes=bools, parents=(top,),
                      cpt={("false",): {"false": ONE},
                           ("true",): {"true": ONE}}))
    network = check_network(BayesianNetwork(nodes=tuple(nodes)))
    return CompiledInstance(network=network, query_node="OUT",
                            accept_outcome="true", q=HALF, k=k)


def _gate_count(formula: Formula) -> int:
    if isinstance(formula, Var):
        return 0
    if isinstance(formula, Not):
        return 1 + _gate_count(formula.child)
    return 1 + sum(_gate_count(c) for c in formula.children)


def compile_ptm_to_bn(machine: PTM, input_string: Sequence[str], steps: int,
                      k: int) -> CompiledInstance:
    """Unroll ``steps`` machine steps into a layered network.

    Layer i carries one node per tape cell (X_i_j), the head position
    (TH_i) and the machine state (MS_i).  Between consecutive layers sit
    the step's random bits (B_i_1..B_i_r, the only stochastic nodes, first
    bit most significant) and a chain Y_i_0..Y_i_n that threads the head
    position across the cells to read the scanned symbol: each link
    resolves to the cell's symbol when the incoming position matches its
    index and passes the incoming value through otherwise, so the last
    link always holds the scanned symbol.  Successor CPTs apply the
    transition function, clamp head moves at the window edges, and copy
    everything unchanged once the state is halting.

    The marginal Pr(MS_n = accept state) equals the machine's exact
    acceptance probability after ``steps`` steps; the returned instance
    queries it against q = 1/2 with parameter k unchanged.
    """
    check_ptm(machine)
    if k < 1:
        raise ReductionError("parameter k must be positive")
    if steps < 1:
        raise ReductionError("steps must be at least 1")
    if len(input_string) > steps + 1:
        raise ReductionError(
            f"input of length {len(input_string)} does not fit the "
            f"{steps + 1}-cell window")
    for symbol in input_string:
        if symbol not in machine.input_alphabet:
            raise ReductionError(f"input symbol {symbol!r} not in input alphabet")

    n = steps
    r = machine.bits_per_step
    alphabet = machine.tape_alphabet
    states = machine.states
    positions = tuple(str(t) for t in range(n + 1))
    y_outcomes = tuple(f"pos:{t}" for t in positions) \
        + tuple(f"sym:{a}" for a in alphabet)
    move_delta = {LEFT: -1, RIGHT: 1}
    bits_domain = [("0", "1")] * r
    nodes: list[Node] = []

    tape0 = list(input_string) + [machine.blank] * (n + 1 - len(input_string))
    for j in range(n + 1):
        nodes.append(Node(name=f"X_0_{j}", outcomes=alphabet, parents=(),
                          cpt={(): {tape0[j]: ONE}}))
    nodes.append(Node(name="TH_0", outcomes=positions, parents=(),
                      cpt={(): {"0": ONE}}))
    nodes.append(Node(name="MS_0", outcomes=states, parents=(),
                      cpt={(): {machine.start_state: ONE}}))

    def resolve(state: str, y: str, bits: tuple[str, ...]):
        """The transition applied in context, or None when the row is a
        pass-through (halted state, or an unreachable position-tagged y)."""
        if machine.is_halting(state) or y.startswith("pos:"):
            return None
        return machine.transitions[(state, y[len("sym:"):], "".join(bits))]

    for i in range(n):
        bit_names = tuple(f"B_{i}_{b}" for b in range(1, r + 1))
        for bit_name in bit_names:
            nodes.append(Node(name=bit_name, outcomes=("0", "1"), parents=(),
                              cpt={(): {"0": HALF, "1": HALF}}))
        for j in range(n + 1):
            if j == 0:
                parents = (f"TH_{i}", f"X_{i}_0")
                cpt = {
                    (th, a): {f"sym:{a}" if th == "0" else f"pos:{th}": ONE}
                    for th in positions for a in alphabet
                }
            else:
                parents = (f"Y_{i}_{j - 1}", f"X_{i}_{j}")
                cpt = {
                    (y, a): {f"sym:{a}" if y == f"pos:{j}" else y: ONE}
                    for y in y_outcomes for a in alphabet
                }
            nodes.append(Node(name=f"Y_{i}_{j}", outcomes=y_outcomes,
                              parents=parents, cpt=cpt))

        scan = f"Y_{i}_{n}"
        for j in range(n + 1):
            cpt = {}
            for a, s, th, y, *bits in itertools.product(
                    alphabet, states, positions, y_outcomes, *bits_domain):
                rule = resolve(s, y, tuple(bits))
                if rule is None or th != str(j):
                    out = a
                else:
                    out = rule[0]
                cpt[(a, s, th, y, *bits)] = {out: ONE}
            nodes.append(Node(
                name=f"X_{i + 1}_{j}", outcomes=alphabet,
                parents=(f"X_{i}_{j}", f"MS_{i}", f"TH_{i}", scan) + bit_names,
                cpt=cpt))

        cpt = {}
        for s, th, y, *bits in itertools.product(
                states, positions, y_outcomes, *bits_domain):
            rule = resolve(s, y, tuple(bits))
            if rule is None:
                out = th
            else:
                shifted = int(th) + move_delta.get(rule[1], 0)
                out = str(min(max(shifted, 0), n))
            cpt[(s, th, y, *bits)] = {out: ONE}
        nodes.append(Node(
            name=f"TH_{i + 1}", outcomes=positions,
            parents=(f"MS_{i}", f"TH_{i}", scan) + bit_names, cpt=cpt))

        cpt = {}
        for s, y, *bits in itertools.product(states, y_outcomes, *bits_domain):
            rule = resolve(s, y, tuple(bits))
            cpt[(s, y, *bits)] = {s if rule is None else rule[2]: ONE}
        nodes.append(Node(
            name=f"MS_{i + 1}", outcomes=states,
            parents=(f"MS_{i}", scan) + bit_names, cpt=cpt))

    network = BayesianNetwork(nodes=tuple(nodes))
    return CompiledInstance(network=network, query_node=f"MS_{n}",
                            accept_outcome=machine.accept_state, q=HALF, k=k)


def cond_gadget(inst: PromiseInstance) -> PromiseInstance:
    """Convert an unconditional absolute-gap instance into a conditional one.

    An indicator tree collapses the queried joint assignment into a single
    binary terminal, a fresh uniform coin R is added, and an observation
    node S is wired so that Pr(S=s) = 1/2 always and
    Pr(R=r | S=s) = 1/2 + Pr(h)/2.  The output queries that conditional
    against threshold 1/2 + q/2 with gap epsilon/2; the new parameters
    depend only on the old ones.
    """
    if inst.gap_kind != ABSOLUTE:
        raise ReductionError("gadget applies to absolute-gap instances")
    if inst.e:
        raise ReductionError("gadget applies to unconditional instances only")
    if not inst.h:
        raise ReductionError("instance queries an empty assignment")

    base = inst.network
    taken = set(base.names())
    indicator = ("not_h", "h")

    def claim(name: str) -> str:
        if name in taken:
            raise ReductionError(
                f"gadget node name {name!r} collides with the base network")
        taken.add(name)
        return name

    nodes = list(base.nodes)
    queried = [node.name for node in base.nodes if node.name in inst.h]
    if len(queried) != len(inst.h):
        missing = sorted(set(inst.h) - set(queried))
        raise ReductionError(f"query names unknown nodes: {missing}")
    layer = []
    for name in queried:
        target = inst.h[name]
        eq = claim(f"eq_{name}")
        outcomes = base.node(name).outcomes
        nodes.append(Node(
            name=eq, outcomes=indicator, parents=(name,),
            cpt={(o,): {"h" if o == target else "not_h": ONE}
                 for o in outcomes}))
        layer.append(eq)
    level = 0
    while len(layer) > 1:
        level += 1
        merged = []
        for pair_index in range(0, len(layer) - 1, 2):
            left, right = layer[pair_index], layer[pair_index + 1]
            name = claim(f"both_{level}_{pair_index // 2}")
            nodes.append(Node(
                name=name, outcomes=indicator, parents=(left, right),
                cpt={(a, b): {"h" if a == b == "h" else "not_h": ONE}
                     for a in indicator for b in indicator}))
            merged.append(name)
        if len(layer) % 2:
            merged.append(layer[-1])
        layer = merged
    terminal = layer[0]

    coin = claim("R")
    sense = claim("S")
    nodes.append(Node(name=coin, outcomes=("not_r", "r"), parents=(),
                      cpt={(): {"not_r": HALF, "r": HALF}}))
    nodes.append(Node(name=sense, outcomes=("not_s", "s"),
                      parents=(coin, terminal),
                      cpt={
                          ("r", "h"): {"s": ONE},
                          ("not_r", "h"): {"not_s": ONE},
                          ("r", "not_h"): {"not_s": HALF, "s": HALF},
                          ("not_r", "not_h"): {"not_s": HALF, "s": HALF},
                      }))
    return PromiseInstance(
        network=BayesianNetwork(nodes=tuple(nodes)),
        h={coin: "r"},
        e={sense: "s"},
        q=HALF + inst.q / 2,
        epsilon=inst.epsilon / 2,
        gap_kind=ABSOLUTE,
    )
