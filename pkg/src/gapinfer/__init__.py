"""Exact and sampled inference over gap promise instances.

The package turns bounded runs of coin-flipping machines into layered
Bayesian networks whose single query marginal reproduces the acceptance
probability exactly, wraps unconditional queries into conditional ones
through a two-coin gadget, and decides promise-gapped thresholds by
forward sampling, amplification, and rejection sampling.  All
probability arithmetic is exact rational; floats only ever appear in
reported error bounds.
"""

from .bayesnet import (
    BayesianNetwork,
    ForwardSampler,
    Node,
    PromiseInstance,
    check_network,
    check_promise,
    conditional,
    joint_probability,
    load_network,
    marginal,
    save_network,
)
from .deciders import (
    DeciderReport,
    amplify,
    combined_decider,
    debias,
    forward_sampling_decider,
    majority_correctness,
    min_odd_trials,
    rejection_sampling_decider,
)
from .errors import GapinferError
from .instances import load_instance, save_promise_instance
from .kernels import KERNEL_BACKEND
from .numerics import RandomStream, format_rational, parse_rational
from .ptm import (
    PTM,
    acceptance_probability,
    check_ptm,
    clockify,
    load_machine,
    outcome_probabilities,
    run_sampled,
    save_machine,
)
from .reductions import (
    CompiledInstance,
    compile_ptm_to_bn,
    cond_gadget,
    count_satisfying,
    formula_to_bn,
    or_compose,
)

__version__ = "0.1.0"

__all__ = [
    "BayesianNetwork",
    "CompiledInstance",
    "DeciderReport",
    "ForwardSampler",
    "GapinferError",
    "KERNEL_BACKEND",
    "Node",
    "PTM",
    "PromiseInstance",
    "RandomStream",
    "acceptance_probability",
    "amplify",
    "check_network",
    "check_promise",
    "check_ptm",
    "clockify",
    "combined_decider",
    "compile_ptm_to_bn",
    "cond_gadget",
    "conditional",
    "count_satisfying",
    "debias",
    "format_rational",
    "formula_to_bn",
    "forward_sampling_decider",
    "joint_probability",
    "load_instance",
    "load_machine",
    "load_network",
    "majority_correctness",
    "marginal",
    "min_odd_trials",
    "or_compose",
    "outcome_probabilities",
    "parse_rational",
    "rejection_sampling_decider",
    "run_sampled",
    "save_machine",
    "save_network",
    "save_promise_instance",
    "__version__",
]
