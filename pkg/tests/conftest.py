"""Shared helpers for the test suite."""

import random

from gapinfer.reductions import And, Not, Or, Var


def random_formula(rng: random.Random, names, depth: int):
    """Random small AST over the given variable names (all gates arity 2-3)."""
    if depth == 0 or rng.random() < 0.3:
        leaf = Var(name=rng.choice(names))
        return Not(child=leaf) if rng.random() < 0.4 else leaf
    children = tuple(random_formula(rng, names, depth - 1)
                     for _ in range(rng.randint(2, 3)))
    gate = And(children=children) if rng.random() < 0.5 else Or(children=children)
    return Not(child=gate) if rng.random() < 0.2 else gate
