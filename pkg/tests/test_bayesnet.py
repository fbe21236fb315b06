"""Network validation, exact enumeration inference, and forward sampling.

The inference oracle is cross-checked against a second, even dumber
route: itertools over the full outcome product, summing chain-rule
products directly.  Sampling is held to exact values at 3 sigma with
fixed seeds.
"""

import itertools
from fractions import Fraction

import pytest

from gapinfer import networks
from gapinfer.bayesnet import (
    ABSOLUTE,
    RELATIVE,
    BayesianNetwork,
    ForwardSampler,
    Node,
    PromiseInstance,
    check_network,
    check_promise,
    conditional,
    decide_threshold,
    forward_sample,
    joint_probability,
    load_network,
    marginal,
    network_from_json,
    network_to_json,
    promise_interval,
    query_probability,
    save_network,
    validate,
    validate_promise_instance,
)
from gapinfer.errors import NetworkValidationError, UnknownOutcome, ZeroEvidence
from gapinfer.numerics import ONE, RandomStream, rat

FIXTURES = networks.fixture_networks()


def enumerate_marginal(net, event):
    """Independent oracle: chain-rule products over the raw outcome grid."""
    total = Fraction(0)
    domains = [node.outcomes for node in net.nodes]
    names = net.names()
    for combo in itertools.product(*domains):
        assignment = dict(zip(names, combo))
        if any(assignment[k] != v for k, v in event.items()):
            continue
        total += joint_probability(net, assignment)
    return total


def test_validate_accepts_fixtures():
    for label, net in FIXTURES:
        assert validate(net) == [], label


def test_validate_rejects_unnormalized_row():
    bad = BayesianNetwork(nodes=(
        networks.root_node("X", {"0": rat(1, 2), "1": rat(2, 5)}),
    ))
    violations = validate(bad)
    assert any("not normalized" in v for v in violations)
    with pytest.raises(NetworkValidationError):
        check_network(bad)


def test_validate_rejects_cycle():
    a = Node(name="A", outcomes=("0", "1"), parents=("B",),
             cpt={("0",): {"0": ONE}, ("1",): {"1": ONE}})
    b = Node(name="B", outcomes=("0", "1"), parents=("A",),
             cpt={("0",): {"0": ONE}, ("1",): {"1": ONE}})
    violations = validate(BayesianNetwork(nodes=(a, b)))
    assert any("cycle" in v for v in violations)


def test_validate_rejects_dangling_parent_and_bad_rows():
    ghost = Node(name="X", outcomes=("0", "1"), parents=("nowhere",),
                 cpt={("0",): {"0": ONE}})
    violations = validate(BayesianNetwork(nodes=(ghost,)))
    assert any("dangling parent" in v for v in violations)

    partial = Node(name="Y", outcomes=("0", "1"), parents=(), cpt={})
    violations = validate(BayesianNetwork(nodes=(partial,)))
    assert any("missing CPT row" in v for v in violations)

    spurious = networks.root_node("Z", {"0": ONE}, outcomes=("0", "1"))
    spurious.cpt[("ghost",)] = {"0": ONE}
    violations = validate(BayesianNetwork(nodes=(spurious,)))
    assert any("spurious CPT row" in v for v in violations)


def test_validate_rejects_non_topological_order():
    a = networks.root_node("A", {"0": rat(1, 2), "1": rat(1, 2)})
    b = Node(name="B", outcomes=("0", "1"), parents=("A",),
             cpt={("0",): {"0": ONE}, ("1",): {"1": ONE}})
    violations = validate(BayesianNetwork(nodes=(b, a)))
    assert any("not topological" in v for v in violations)


def test_joint_probability_basics():
    net = networks.uniform_bit()
    assert joint_probability(net, {"X": "1"}) == rat(1, 2)

    pair = networks.copy_pair()
    assert joint_probability(pair, {"A": "1", "B": "1"}) == rat(1, 2)
    assert joint_probability(pair, {"A": "1", "B": "0"}) == 0


def test_joint_probability_validates_assignment():
    pair = networks.copy_pair()
    with pytest.raises(ValueError):
        joint_probability(pair, {"A": "1"})
    with pytest.raises(UnknownOutcome):
        joint_probability(pair, {"A": "1", "B": "2"})


def test_joint_probabilities_sum_to_one():
    for label, net in FIXTURES:
        total = enumerate_marginal(net, {})
        assert total == 1, label


def test_marginal_against_brute_force():
    for label, net in FIXTURES:
        for node in net.nodes:
            for outcome in node.outcomes:
                event = {node.name: outcome}
                assert marginal(net, event) == enumerate_marginal(net, event), (
                    label, event)


def test_marginal_of_empty_event_is_one():
    for label, net in FIXTURES:
        assert marginal(net, {}) == 1, label


def test_marginal_uniform_bit():
    assert marginal(networks.uniform_bit(), {"X": "1"}) == rat(1, 2)


def test_noisy_or_conditionals():
    net = networks.noisy_or_toy()
    # hand-checked: Pr(C=1) = 1/3 + 2/3*(1/4 + 3/4*1/5) = 3/5
    assert marginal(net, {"C": "1"}) == rat(3, 5)
    assert conditional(net, {"A": "1"}, {"C": "1"}) == \
        enumerate_marginal(net, {"A": "1", "C": "1"}) / rat(3, 5)


def test_conditional_chain_rule_identity():
    net = networks.noisy_or_toy()
    for h_outcome in ("0", "1"):
        for e_outcome in ("0", "1"):
            h, e = {"A": h_outcome}, {"C": e_outcome}
            assert conditional(net, h, e) * marginal(net, e) == \
                marginal(net, {**h, **e})


def test_conditional_with_empty_evidence_is_marginal():
    net = networks.copy_pair()
    assert conditional(net, {"A": "1"}, {}) == marginal(net, {"A": "1"})


def test_conditional_rejects_overlap():
    net = networks.copy_pair()
    with pytest.raises(ValueError):
        conditional(net, {"A": "1"}, {"A": "0"})


def test_zero_evidence_uses_impossible_event():
    chain = networks.point_mass_chain()
    # B is the negation of A=1, so B=1 has probability 0
    with pytest.raises(ZeroEvidence):
        conditional(chain, {"C": "1"}, {"B": "1"})


def test_marginal_rejects_unknown_names_and_outcomes():
    net = networks.uniform_bit()
    with pytest.raises(UnknownOutcome):
        marginal(net, {"Y": "1"})
    with pytest.raises(UnknownOutcome):
        marginal(net, {"X": "banana"})


def test_forward_sample_deterministic_network():
    chain = networks.point_mass_chain()
    for seed in range(10):
        stream = RandomStream(seed, 0)
        assert forward_sample(chain, stream) == {"A": "1", "B": "0", "C": "0"}
        assert stream.position == 0  # point masses consume no bits


def test_forward_sample_respects_point_mass_child():
    pair = networks.copy_pair()
    for seed in range(30):
        sample = forward_sample(pair, RandomStream(seed, 0))
        assert sample["B"] == sample["A"]


def test_forward_sample_uniform_frequency():
    net = networks.uniform_bit()
    sampler = ForwardSampler(net)
    trials = 100_000
    ones = sum(sampler.sample(RandomStream(4242, i))["X"] == "1"
               for i in range(trials))
    assert 0.495 <= ones / trials <= 0.505


def test_forward_sample_matches_exact_marginals():
    trials = 4000
    for label, net in FIXTURES:
        sampler = ForwardSampler(net)
        counts = {}
        for i in range(trials):
            sample = sampler.sample(RandomStream(1701, i))
            for name, outcome in sample.items():
                counts[(name, outcome)] = counts.get((name, outcome), 0) + 1
        for node in net.nodes:
            for outcome in node.outcomes:
                p = float(marginal(net, {node.name: outcome}))
                freq = counts.get((node.name, outcome), 0) / trials
                sigma = (p * (1 - p) / trials) ** 0.5
                assert abs(freq - p) <= 3 * sigma, (label, node.name, outcome)


def test_decide_threshold_is_strict():
    net = networks.uniform_bit()
    assert decide_threshold(net, {"X": "1"}, {}, rat(1, 2)) is False
    assert decide_threshold(net, {"X": "1"}, {}, rat(1, 4)) is True


def test_promise_interval_absolute_and_relative():
    net = networks.biased_bit(rat(3, 4))
    absolute = PromiseInstance(network=net, h={"X": "1"}, e={},
                               q=rat(1, 2), epsilon=rat(1, 8))
    assert promise_interval(absolute) == (rat(3, 8), rat(5, 8))
    relative = PromiseInstance(network=net, h={"X": "1"}, e={},
                               q=rat(1, 2), epsilon=rat(1, 4),
                               gap_kind=RELATIVE)
    assert promise_interval(relative) == (rat(2, 5), rat(5, 8))


def test_check_promise_cases():
    # Pr(h)=3/4 avoids (3/8, 5/8)
    holds = PromiseInstance(network=networks.biased_bit(rat(3, 4)),
                            h={"X": "1"}, e={}, q=rat(1, 2), epsilon=rat(1, 8))
    assert check_promise(holds) is True
    # dead centre of the interval
    centre = PromiseInstance(network=networks.uniform_bit(),
                             h={"X": "1"}, e={}, q=rat(1, 2), epsilon=rat(1, 8))
    assert check_promise(centre) is False
    # exactly on the lower endpoint: open interval, so the promise holds
    endpoint = PromiseInstance(network=networks.biased_bit(rat(3, 8)),
                               h={"X": "1"}, e={}, q=rat(1, 2), epsilon=rat(1, 8))
    assert query_probability(endpoint) == rat(1, 2) - rat(1, 8)
    assert check_promise(endpoint) is True


def test_validate_promise_instance():
    net = networks.uniform_bit()
    good = PromiseInstance(network=net, h={"X": "1"}, e={},
                           q=rat(1, 2), epsilon=rat(1, 4))
    assert validate_promise_instance(good) == []
    bad = PromiseInstance(network=net, h={"X": "1", "Ghost": "1"},
                          e={"X": "0"}, q=rat(3, 2), epsilon=rat(2, 3),
                          gap_kind="sideways")
    text = "\n".join(validate_promise_instance(bad))
    assert "overlap" in text
    assert "unknown node" in text
    assert "q must lie" in text
    assert "epsilon" in text
    assert "gap_kind" in text


def test_network_json_round_trip():
    for label, net in FIXTURES:
        assert network_from_json(network_to_json(net)) == net, label


def test_network_file_io_is_byte_stable(tmp_path):
    net = networks.noisy_or_toy()
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    save_network(net, first)
    save_network(load_network(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_network_json_drops_zero_entries():
    payload = network_to_json(networks.copy_pair())
    copy_rows = payload["nodes"][1]["cpt"]
    assert copy_rows[0]["dist"] == {"0": "1/1"}
    assert copy_rows[1]["dist"] == {"1": "1/1"}


def test_network_from_json_validates():
    with pytest.raises(NetworkValidationError):
        network_from_json({"nodes": [{"name": "X", "outcomes": ["0"],
                                      "parents": [], "cpt": []}]})
    with pytest.raises(NetworkValidationError):
        network_from_json({"wrong": "shape"})
