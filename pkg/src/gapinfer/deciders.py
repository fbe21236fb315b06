"""Randomized decision procedures over promise instances.

The building blocks compose: a single forward-sampling trial has
acceptance probability exactly 1/2 + (Pr(h) - q)/2, ``amplify`` majority-
votes any single-trial decider over per-trial streams, ``debias`` trims a
decider's false-positive rate strictly below 1/2, and ``combined_decider``
runs a step-budgeted component first and falls back when it overruns.
Rejection sampling handles conditional queries, reporting rather than
crashing when every sample misses the evidence.

Trial counts are always explicit arguments; helpers translate error
targets into counts (Hoeffding for majorities, a Chernoff-style rule for
rejection budgets).  All certification math is exact rational; floats
appear only in reported bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .bayesnet import ForwardSampler, PromiseInstance, conditional, marginal
from .errors import ReductionError
from .numerics import HALF, ONE, RandomStream, bernoulli, format_rational

TrialFn = Callable[[RandomStream], bool]

STATUS_OK = "ok"
STATUS_ALL_SAMPLES_REJECTED = "all_samples_rejected"


@dataclass(frozen=True)
class DeciderReport:
    """Outcome of a (possibly amplified) decision run.

    ``margin`` is the claimed correctness advantage over 1/2 under the
    instance's promise.  ``decision`` is None only when the run could not
    decide at all (see ``status``).
    """

    decision: Optional[bool]
    trials: int
    accept_count: int
    margin: Fraction
    exact_accept_prob: Optional[Fraction] = None
    estimate: Optional[Fraction] = None
    retained: Optional[int] = None
    status: str = STATUS_OK


def report_to_json(report: DeciderReport) -> dict:
    def fmt(value):
        return None if value is None else format_rational(value)

    return {
        "decision": {True: "yes", False: "no", None: "none"}[report.decision],
        "trials": report.trials,
        "accept_count": report.accept_count,
        "margin": format_rational(report.margin),
        "exact_accept_prob": fmt(report.exact_accept_prob),
        "estimate": fmt(report.estimate),
        "retained": report.retained,
        "status": report.status,
    }


def _require_unconditional_absolute(inst: PromiseInstance) -> None:
    if inst.e:
        raise ReductionError("forward sampling handles unconditional queries; "
                             "use rejection sampling for evidence")
    if inst.gap_kind != "absolute":
        raise ReductionError("forward sampling expects an absolute gap")


def make_forward_trial(inst: PromiseInstance) -> TrialFn:
    """Single-trial decider for an unconditional absolute-gap instance.

    Draw one full sample; if it agrees with the queried assignment accept
    with probability 1 - q/2, otherwise with probability 1/2 - q/2.  The
    overall acceptance probability is exactly 1/2 + (Pr(h) - q)/2, so a
    promise-satisfying instance is decided correctly with probability at
    least 1/2 + epsilon/2.
    """
    _require_unconditional_absolute(inst)
    sampler = ForwardSampler(inst.network)
    agree_accept = ONE - inst.q / 2
    disagree_accept = HALF - inst.q / 2

    def trial(stream: RandomStream) -> bool:
        sample = sampler.sample(stream)
        agrees = all(sample[name] == outcome for name, outcome in inst.h.items())
        return bernoulli(stream, agree_accept if agrees else disagree_accept)

    return trial


def forward_sampling_decider(inst: PromiseInstance,
                             stream: RandomStream) -> bool:
    """One forward-sampling trial (see ``make_forward_trial``)."""
    return make_forward_trial(inst)(stream)


def exact_trial_accept_probability(inst: PromiseInstance) -> Fraction:
    """Closed form for the single-trial acceptance probability, by exact
    case analysis: Pr(h)(1 - q/2) + (1 - Pr(h))(1/2 - q/2)."""
    _require_unconditional_absolute(inst)
    p_h = marginal(inst.network, inst.h)
    return p_h * (ONE - inst.q / 2) + (ONE - p_h) * (HALF - inst.q / 2)


def majority_correctness(p: Fraction, trials: int) -> Fraction:
    """Exact probability that a majority of ``trials`` independent coins of
    bias ``p`` land heads (``trials`` odd, so no ties)."""
    if trials < 1 or trials % 2 == 0:
        raise ValueError("trials must be odd and positive")
    return sum(
        (Fraction(math.comb(trials, j)) * p ** j * (1 - p) ** (trials - j)
         for j in range(trials // 2 + 1, trials + 1)),
        Fraction(0),
    )


def hoeffding_error_bound(trials: int, advantage) -> float:
    """The e^(-2 n eps^2) tail bound; float, for reporting only."""
    return math.exp(-2 * trials * float(advantage) ** 2)


def min_odd_trials(advantage, target_error: float) -> int:
    """Smallest odd n with e^(-2 n advantage^2) <= target_error."""
    if not 0 < float(advantage) <= 0.5:
        raise ValueError("advantage must lie in (0, 1/2]")
    if not 0 < target_error < 1:
        raise ValueError("target_error must lie in (0, 1)")
    n = math.ceil(math.log(1 / target_error) / (2 * float(advantage) ** 2))
    n = max(n, 1)
    return n if n % 2 else n + 1


def amplify(trial: TrialFn, trials: int, seed: int,
            advantage: Fraction) -> DeciderReport:
    """Majority vote over ``trials`` independent runs of ``trial``.

    Trial i draws from RandomStream(seed, i), so the vote is reproducible
    and trials could run in any order.  The reported margin is exact: the
    binomial majority correctness of a per-trial advantage that size,
    minus 1/2.
    """
    if trials < 1 or trials % 2 == 0:
        raise ValueError("trials must be odd and positive")
    if not 0 < advantage <= HALF:
        raise ValueError("advantage must lie in (0, 1/2]")
    accept_count = sum(trial(RandomStream(seed, i)) for i in range(trials))
    return DeciderReport(
        decision=2 * accept_count > trials,
        trials=trials,
        accept_count=accept_count,
        margin=majority_correctness(HALF + advantage, trials) - HALF,
    )


def debias_accept_probability(accept_prob: Fraction,
                              delta: Fraction) -> Fraction:
    """Acceptance probability after the veto coin: a(1 - delta/2)."""
    return accept_prob * (ONE - delta / 2)


def debias(trial: TrialFn, delta: Fraction) -> TrialFn:
    """Veto each acceptance with probability delta/2.

    A decider accepting Yes-instances with probability >= 1/2 + delta and
    No-instances with probability <= 1/2 becomes one with acceptance
    >= 1/2 + delta/4 on Yes and <= 1/2 - delta/4 on No, pushing the
    false-positive rate strictly below one half.
    """
    if not 0 < delta <= HALF:
        raise ValueError("delta must lie in (0, 1/2]")
    veto = delta / 2

    def vetoed(stream: RandomStream) -> bool:
        if not trial(stream):
            return False
        return not bernoulli(stream, veto)

    return vetoed


def promise_margin(q: Fraction, epsilon: Fraction, gap_kind: str) -> Fraction:
    """Smallest distance from q that the promise guarantees: epsilon for an
    absolute gap, min(q - q/(1+eps), q eps) = q eps/(1+eps) for a relative
    one."""
    if gap_kind == "absolute":
        return epsilon
    if gap_kind == "relative":
        return q * epsilon / (1 + epsilon)
    raise ValueError(f"unknown gap kind: {gap_kind!r}")


def rejection_trial_budget(inst: PromiseInstance,
                           evidence_lower_bound: Fraction,
                           fail_prob: Fraction = Fraction(1, 100)) -> int:
    """Chernoff-style sample budget for rejection sampling:
    ceil(3 ln(2 / fail_prob) / (Pr(e) lower bound * margin^2)) where margin
    is the instance's promise margin."""
    if not 0 < evidence_lower_bound <= 1:
        raise ValueError("evidence lower bound must lie in (0, 1]")
    if not 0 < fail_prob < 1:
        raise ValueError("fail_prob must lie in (0, 1)")
    gap = promise_margin(inst.q, inst.epsilon, inst.gap_kind)
    if gap <= 0:
        raise ValueError("promise gap must be positive")
    return math.ceil(3 * math.log(2 / float(fail_prob))
                     / (float(evidence_lower_bound) * float(gap) ** 2))


def rejection_sampling_decider(inst: PromiseInstance, trials: int, seed: int,
                               fail_prob: Fraction = Fraction(1, 100),
                               compute_exact: bool = False) -> DeciderReport:
    """Estimate Pr(h | e) by forward sampling and discarding samples that
    disagree with the evidence; decide against q.

    Returns a report rather than raising when every sample was discarded
    (status ``all_samples_rejected``, no decision).  Trial i draws from
    RandomStream(seed, i).
    """
    if not inst.e:
        raise ReductionError("rejection sampling needs evidence; "
                             "use forward sampling for unconditional queries")
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 < fail_prob < HALF:
        raise ValueError("fail_prob must lie in (0, 1/2)")
    sampler = ForwardSampler(inst.network)
    retained = 0
    hits = 0
    for i in range(trials):
        sample = sampler.sample(RandomStream(seed, i))
        if any(sample[name] != outcome for name, outcome in inst.e.items()):
            continue
        retained += 1
        if all(sample[name] == outcome for name, outcome in inst.h.items()):
            hits += 1
    exact = conditional(inst.network, inst.h, inst.e) if compute_exact else None
    if retained == 0:
        return DeciderReport(
            decision=None, trials=trials, accept_count=0,
            margin=HALF - fail_prob, exact_accept_prob=exact,
            estimate=None, retained=0, status=STATUS_ALL_SAMPLES_REJECTED)
    estimate = Fraction(hits, retained)
    return DeciderReport(
        decision=estimate > inst.q,
        trials=trials,
        accept_count=hits,
        margin=HALF - fail_prob,
        exact_accept_prob=exact,
        estimate=estimate,
        retained=retained,
    )


BudgetedFn = Callable[[Sequence[str], int, int, RandomStream], Optional[bool]]
FallbackFn = Callable[[Sequence[str], int, RandomStream], bool]


@dataclass(frozen=True)
class CombinedDecision:
    decision: bool
    decided_by: str  # "budgeted" | "fallback"
    budget: int


def combined_decider(budgeted: BudgetedFn, fallback: FallbackFn,
                     x: Sequence[str], k: int, budget_exponent: int,
                     seed: int) -> CombinedDecision:
    """Run the budgeted component for at most len(x)^(budget_exponent + 1)
    steps; adopt its answer if it decides in budget, else run the fallback.

    The two components draw from distinct streams (indexes 0 and 1), so
    which one decides, and what it says, is a function of (x, k, seed).
    """
    budget = len(x) ** (budget_exponent + 1)
    verdict = budgeted(x, k, budget, RandomStream(seed, 0))
    if verdict is not None:
        return CombinedDecision(decision=verdict, decided_by="budgeted",
                                budget=budget)
    return CombinedDecision(decision=fallback(x, k, RandomStream(seed, 1)),
                            decided_by="fallback", budget=budget)


def machine_budget_decider(machine) -> BudgetedFn:
    """Budgeted-component adapter: one sampled run capped at the budget;
    None when the machine is still running at the cap."""
    from .ptm import ACCEPTED, UNHALTED, run_sampled

    def budgeted(x, k, budget, stream):
        if budget < 1:
            return None
        outcome = run_sampled(machine, x, budget, stream)
        return None if outcome == UNHALTED else outcome == ACCEPTED

    return budgeted


def machine_fallback_decider(machine, steps: int) -> FallbackFn:
    """Fallback adapter: one sampled run of a fixed step count, unhalted
    counting as No."""
    from .ptm import decide_error_ptm_acceptance

    def fallback(x, k, stream):
        return decide_error_ptm_acceptance(machine, x, steps, stream)

    return fallback
