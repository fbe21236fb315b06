"""Bayesian networks with exact enumeration inference and forward sampling.

Networks are immutable: a tuple of nodes stored in topological order, each
carrying a CPT keyed by the tuple of parent outcomes (in parent-list
order).  All probabilities are exact rationals.

Inference is deliberately plain enumeration: the marginal of an event is
the sum of joint probabilities over every consistent full assignment,
computed by walking the stored order and skipping zero-probability
branches (which contribute nothing to that sum).  No variable elimination
or caching; this is the oracle the rest of the package is checked
against, so it stays as close to the defining formula as possible.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping

from .errors import NetworkValidationError, UnknownOutcome, ZeroEvidence
from .numerics import ONE, ZERO, RandomStream, draw_index, format_rational, parse_rational

ABSOLUTE = "absolute"
RELATIVE = "relative"
GAP_KINDS = (ABSOLUTE, RELATIVE)


@dataclass(frozen=True)
class Node:
    """One variable: outcome labels, parent names, and a CPT.

    ``cpt`` maps each parent configuration (tuple of parent outcomes, in
    parent order) to a distribution over this node's outcomes.  Zero
    probabilities may be omitted from a row.
    """

    name: str
    outcomes: tuple[str, ...]
    parents: tuple[str, ...]
    cpt: Mapping[tuple[str, ...], Mapping[str, Fraction]]


@dataclass(frozen=True)
class BayesianNetwork:
    """Nodes in a stored order that must be topological."""

    nodes: tuple[Node, ...]

    def node(self, name: str) -> Node:
        for node in self.nodes:
            if node.name == name:
                return node
        raise UnknownOutcome(f"no node named {name!r}")

    def names(self) -> tuple[str, ...]:
        return tuple(node.name for node in self.nodes)


@dataclass(frozen=True)
class PromiseInstance:
    """An inference query bundled with its gap promise.

    ``h`` is the queried joint assignment, ``e`` the evidence (empty for
    unconditional queries).  The promise states that the queried
    probability avoids an open interval around the threshold ``q``:
    (q - epsilon, q + epsilon) for the absolute kind,
    (q / (1 + epsilon), q * (1 + epsilon)) for the relative kind.
    """

    network: BayesianNetwork
    h: Mapping[str, str]
    e: Mapping[str, str]
    q: Fraction
    epsilon: Fraction
    gap_kind: str = ABSOLUTE


def validate_promise_instance(inst: PromiseInstance) -> list[str]:
    violations = list(validate(inst.network))
    names = set(inst.network.names())
    overlap = set(inst.h) & set(inst.e)
    if overlap:
        violations.append(f"query and evidence overlap on {sorted(overlap)}")
    if not inst.h:
        violations.append("query assignment is empty")
    for label, assignment in (("query", inst.h), ("evidence", inst.e)):
        for name, outcome in assignment.items():
            if name not in names:
                violations.append(f"{label} names unknown node {name!r}")
            elif outcome not in inst.network.node(name).outcomes:
                violations.append(
                    f"{label} assigns {name!r} the unknown outcome {outcome!r}")
    if not 0 <= inst.q <= 1:
        violations.append("threshold q must lie in [0, 1]")
    if not 0 < inst.epsilon <= Fraction(1, 2):
        violations.append("epsilon must lie in (0, 1/2]")
    if inst.gap_kind not in GAP_KINDS:
        violations.append(f"gap_kind must be one of {GAP_KINDS}")
    return violations


def validate(net: BayesianNetwork) -> list[str]:
    """Every invariant violation, as human-readable strings."""
    violations: list[str] = []
    names = [node.name for node in net.nodes]
    if len(set(names)) != len(names):
        violations.append("duplicate node names")
        return violations
    position = {name: i for i, name in enumerate(names)}
    outcomes_of = {node.name: node.outcomes for node in net.nodes}

    for node in net.nodes:
        if len(node.outcomes) < 1:
            violations.append(f"node {node.name!r} has no outcomes")
        if len(set(node.outcomes)) != len(node.outcomes):
            violations.append(f"node {node.name!r} has duplicate outcomes")
        dangling = [p for p in node.parents if p not in position]
        for parent in dangling:
            violations.append(f"node {node.name!r} has dangling parent {parent!r}")
        if not dangling:
            late = [p for p in node.parents if position[p] >= position[node.name]]
            for parent in late:
                if position[parent] == position[node.name]:
                    violations.append(f"cycle: node {node.name!r} is its own parent")
                else:
                    violations.append(
                        f"stored order is not topological: {node.name!r} "
                        f"precedes its parent {parent!r}")
            if _on_a_cycle(net, node.name, position):
                violations.append(f"cycle through node {node.name!r}")
        if dangling:
            continue  # row shape below would just cascade

        expected_rows = set(itertools.product(
            *(outcomes_of[p] for p in node.parents)))
        seen_rows = set(node.cpt)
        for row in sorted(expected_rows - seen_rows):
            violations.append(f"node {node.name!r} missing CPT row for {row!r}")
        for row in sorted(seen_rows - expected_rows):
            violations.append(f"node {node.name!r} has spurious CPT row {row!r}")
        for key in sorted(seen_rows & expected_rows):
            dist = node.cpt[key]
            for outcome, p in dist.items():
                if outcome not in node.outcomes:
                    violations.append(
                        f"node {node.name!r} row {key!r} mentions unknown "
                        f"outcome {outcome!r}")
                if p < 0 or p > 1:
                    violations.append(
                        f"node {node.name!r} row {key!r} has probability "
                        f"{format_rational(p)} outside [0, 1]")
            total = sum(dist.values(), ZERO)
            if total != 1:
                violations.append(
                    f"node {node.name!r} row {key!r} not normalized: sums to "
                    f"{format_rational(total)}")
    return violations


def _on_a_cycle(net: BayesianNetwork, start: str, position: Mapping[str, int]) -> bool:
    # ancestors live strictly earlier in a topological order, so any walk
    # up resolved parents that returns to the start is a genuine cycle
    parents_of = {node.name: node.parents for node in net.nodes}
    stack, seen = [start], set()
    while stack:
        current = stack.pop()
        for parent in parents_of.get(current, ()):
            if parent == start:
                return True
            if parent in position and parent not in seen:
                seen.add(parent)
                stack.append(parent)
    return False


def check_network(net: BayesianNetwork) -> BayesianNetwork:
    violations = validate(net)
    if violations:
        raise NetworkValidationError(violations)
    return net


def _row_key(node: Node, assignment: Mapping[str, str]) -> tuple[str, ...]:
    return tuple(assignment[p] for p in node.parents)


def joint_probability(net: BayesianNetwork,
                      assignment: Mapping[str, str]) -> Fraction:
    """Chain-rule product over every node; the assignment must be full."""
    missing = [n for n in net.names() if n not in assignment]
    if missing:
        raise ValueError(f"assignment misses nodes {missing}")
    product = ONE
    for node in net.nodes:
        outcome = assignment[node.name]
        if outcome not in node.outcomes:
            raise UnknownOutcome(
                f"node {node.name!r} has no outcome {outcome!r}")
        product *= node.cpt[_row_key(node, assignment)].get(outcome, ZERO)
        if product == 0:
            return ZERO
    return product


def _check_event(net: BayesianNetwork, event: Mapping[str, str]) -> None:
    for name, outcome in event.items():
        node = net.node(name)  # raises UnknownOutcome for unknown names
        if outcome not in node.outcomes:
            raise UnknownOutcome(f"node {name!r} has no outcome {outcome!r}")


def marginal(net: BayesianNetwork, event: Mapping[str, str]) -> Fraction:
    """Pr(event): the sum of joint probabilities over all full assignments
    consistent with the event, walking the stored topological order and
    pruning zero-probability branches (they add nothing to the sum)."""
    _check_event(net, event)
    nodes = net.nodes
    assignment: dict[str, str] = {}

    def descend(i: int, weight: Fraction) -> Fraction:
        if i == len(nodes):
            return weight
        node = nodes[i]
        row = node.cpt[_row_key(node, assignment)]
        pinned = event.get(node.name)
        total = ZERO
        for outcome in node.outcomes if pinned is None else (pinned,):
            p = row.get(outcome, ZERO)
            if p == 0:
                continue
            assignment[node.name] = outcome
            total += descend(i + 1, weight * p)
            del assignment[node.name]
        return total

    return descend(0, ONE)


def conditional(net: BayesianNetwork, h: Mapping[str, str],
                e: Mapping[str, str]) -> Fraction:
    """Pr(h | e) = Pr(h, e) / Pr(e), exact; ZeroEvidence when Pr(e) = 0."""
    overlap = set(h) & set(e)
    if overlap:
        raise ValueError(f"query and evidence overlap on {sorted(overlap)}")
    if not e:
        return marginal(net, h)
    evidence_mass = marginal(net, e)
    if evidence_mass == 0:
        raise ZeroEvidence(f"conditioning event has probability 0: {dict(e)}")
    return marginal(net, {**h, **e}) / evidence_mass


class ForwardSampler:
    """Ancestral sampler with precomputed integer CPT rows.

    Each CPT row is reduced once to cumulative numerators over a common
    denominator, so a trial costs only integer comparisons and the random
    bits the outcome genuinely needs (point-mass rows consume none).
    """

    def __init__(self, net: BayesianNetwork):
        self.net = net
        self._tables = []
        for node in net.nodes:
            rows = {}
            for key, dist in node.cpt.items():
                denominator = lcm(*(p.denominator for p in dist.values())) \
                    if dist else 1
                running = 0
                cumulative = []
                for outcome in node.outcomes:
                    p = dist.get(outcome, ZERO)
                    running += p.numerator * (denominator // p.denominator)
                    cumulative.append(running)
                rows[key] = (tuple(cumulative), denominator)
            self._tables.append((node, rows))

    def sample(self, stream: RandomStream) -> dict[str, str]:
        assignment: dict[str, str] = {}
        for node, rows in self._tables:
            cumulative, denominator = rows[_row_key(node, assignment)]
            choice = draw_index(stream, cumulative, denominator)
            assignment[node.name] = node.outcomes[choice]
        return assignment


def forward_sample(net: BayesianNetwork, stream: RandomStream) -> dict[str, str]:
    """One full assignment drawn ancestrally along the stored order."""
    return ForwardSampler(net).sample(stream)


def decide_threshold(net: BayesianNetwork, h: Mapping[str, str],
                     e: Mapping[str, str], q: Fraction) -> bool:
    """Yes iff Pr(h | e) strictly exceeds q."""
    return conditional(net, h, e) > q


def promise_interval(inst: PromiseInstance) -> tuple[Fraction, Fraction]:
    """The open interval the queried probability promises to avoid."""
    if inst.gap_kind == ABSOLUTE:
        return inst.q - inst.epsilon, inst.q + inst.epsilon
    if inst.gap_kind == RELATIVE:
        return inst.q / (1 + inst.epsilon), inst.q * (1 + inst.epsilon)
    raise ValueError(f"unknown gap_kind {inst.gap_kind!r}")


def query_probability(inst: PromiseInstance) -> Fraction:
    return conditional(inst.network, inst.h, inst.e)


def check_promise(inst: PromiseInstance) -> bool:
    """Exact check that the queried probability avoids the open interval;
    landing exactly on an endpoint counts as avoiding it."""
    low, high = promise_interval(inst)
    p = query_probability(inst)
    return not (low < p < high)


def network_to_json(net: BayesianNetwork) -> dict:
    """JSON-ready dict; rows in parent-product order, zero entries dropped."""
    payload = []
    outcomes_of = {node.name: node.outcomes for node in net.nodes}
    for node in net.nodes:
        rows = []
        for key in itertools.product(*(outcomes_of[p] for p in node.parents)):
            dist = node.cpt[key]
            rows.append({
                "given": {p: key[i] for i, p in enumerate(node.parents)},
                "dist": {o: format_rational(dist[o])
                         for o in node.outcomes if dist.get(o, ZERO) != 0},
            })
        payload.append({
            "name": node.name,
            "outcomes": list(node.outcomes),
            "parents": list(node.parents),
            "cpt": rows,
        })
    return {"nodes": payload}


def network_from_json(payload: dict) -> BayesianNetwork:
    try:
        nodes = []
        for entry in payload["nodes"]:
            parents = tuple(entry["parents"])
            cpt = {}
            for row in entry["cpt"]:
                key = tuple(row["given"][p] for p in parents)
                cpt[key] = {o: parse_rational(text)
                            for o, text in row["dist"].items()}
            nodes.append(Node(
                name=entry["name"],
                outcomes=tuple(entry["outcomes"]),
                parents=parents,
                cpt=cpt,
            ))
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkValidationError(
            [f"malformed network document: {exc}"]) from exc
    return check_network(BayesianNetwork(nodes=tuple(nodes)))


def save_network(net: BayesianNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(network_to_json(net), handle, indent=2)
        handle.write("\n")


def load_network(path) -> BayesianNetwork:
    with open(path, encoding="utf-8") as handle:
        return network_from_json(json.load(handle))
