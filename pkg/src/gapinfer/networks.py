"""Small example networks used across tests, demos and documentation.

Everything here is desk-scale on purpose: the point of these fixtures is
that their probabilities can be verified by hand or by brute-force
enumeration in a test.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .bayesnet import BayesianNetwork, Node, check_network
from .numerics import ONE, ZERO, rat


def root_node(name: str, dist: Mapping[str, Fraction],
              outcomes: Sequence[str] | None = None) -> Node:
    """Parentless node; outcome order defaults to the dist's key order."""
    outcomes = tuple(outcomes if outcomes is not None else dist)
    return Node(name=name, outcomes=outcomes, parents=(), cpt={(): dict(dist)})


def uniform_bit(name: str = "X") -> BayesianNetwork:
    return check_network(BayesianNetwork(nodes=(
        root_node(name, {"0": rat(1, 2), "1": rat(1, 2)}),
    )))


def biased_bit(p_one: Fraction, name: str = "X") -> BayesianNetwork:
    """Single bit with Pr(name=1) exactly ``p_one``."""
    return check_network(BayesianNetwork(nodes=(
        root_node(name, {"0": ONE - p_one, "1": p_one}),
    )))


def copy_pair() -> BayesianNetwork:
    """A uniform, B a deterministic copy of A."""
    a = root_node("A", {"0": rat(1, 2), "1": rat(1, 2)})
    b = Node(name="B", outcomes=("0", "1"), parents=("A",),
             cpt={("0",): {"0": ONE}, ("1",): {"1": ONE}})
    return check_network(BayesianNetwork(nodes=(a, b)))


def point_mass_chain() -> BayesianNetwork:
    """Fully deterministic three-node chain; the joint has a single atom."""
    a = root_node("A", {"1": ONE}, outcomes=("0", "1"))
    b = Node(name="B", outcomes=("0", "1"), parents=("A",),
             cpt={("0",): {"1": ONE}, ("1",): {"0": ONE}})
    c = Node(name="C", outcomes=("0", "1"), parents=("B",),
             cpt={("0",): {"0": ONE}, ("1",): {"1": ONE}})
    return check_network(BayesianNetwork(nodes=(a, b, c)))


def noisy_or_toy() -> BayesianNetwork:
    """Two root causes and a noisy OR: C fires for sure when either parent
    is 1, and with probability 1/5 on its own."""
    a = root_node("A", {"0": rat(2, 3), "1": rat(1, 3)})
    b = root_node("B", {"0": rat(3, 4), "1": rat(1, 4)})
    c = Node(name="C", outcomes=("0", "1"), parents=("A", "B"), cpt={
        ("0", "0"): {"0": rat(4, 5), "1": rat(1, 5)},
        ("0", "1"): {"1": ONE},
        ("1", "0"): {"1": ONE},
        ("1", "1"): {"1": ONE},
    })
    return check_network(BayesianNetwork(nodes=(a, b, c)))


def third_bit(name: str = "X") -> BayesianNetwork:
    """Single bit with Pr(1) = 1/3; the simplest non-dyadic sampler fixture."""
    return biased_bit(rat(1, 3), name)


def fixture_networks() -> list[tuple[str, BayesianNetwork]]:
    return [
        ("uniform_bit", uniform_bit()),
        ("third_bit", third_bit()),
        ("copy_pair", copy_pair()),
        ("point_mass_chain", point_mass_chain()),
        ("noisy_or_toy", noisy_or_toy()),
    ]
