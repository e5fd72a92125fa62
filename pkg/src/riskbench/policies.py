"""The epsilon-Greedy family and its sufficient statistics.

These are the scalar reference implementations. The compiled kernel in
:mod:`riskbench._kernel` mirrors them operation for operation and the test
suite checks that both produce identical trajectories.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .schedules import Schedule
from .streams import RandomStream


class Variant(str, enum.Enum):
    PLAIN = "plain"
    REWEIGHTED = "reweighted"
    OPTIMISTIC = "optimistic"
    DEBIASED = "debiased"

    @property
    def code(self) -> int:
        return _CODES[self]


_CODES = {Variant.PLAIN: 0, Variant.REWEIGHTED: 1, Variant.OPTIMISTIC: 2, Variant.DEBIASED: 3}


@dataclass(frozen=True)
class PolicySpec:
    variant: Variant = Variant.PLAIN
    rho: float = 0.0
    schedule: Schedule = Schedule()

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not (math.isfinite(self.rho) and self.rho >= 0):
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.variant is Variant.OPTIMISTIC and self.rho <= 0:
            raise ValueError("optimistic variant requires rho > 0")


@dataclass(frozen=True)
class ArmState:
    """Running aggregates for one arm.

    ``reweighted_sum`` accumulates ``r / sqrt(pi)`` and ``debiased_sum``
    accumulates ``r / pi``, where ``pi`` is the probability with which the arm
    was chosen on that step.
    """

    count: int = 0
    reward_sum: float = 0.0
    reweighted_sum: float = 0.0
    debiased_sum: float = 0.0


def update(arm: ArmState, reward: float, pi_at: float) -> ArmState:
    if not pi_at > 0:
        raise ValueError(f"selection probability must be positive, got {pi_at}")
    return replace(
        arm,
        count=arm.count + 1,
        reward_sum=arm.reward_sum + reward,
        reweighted_sum=arm.reweighted_sum + reward / math.sqrt(pi_at),
        debiased_sum=arm.debiased_sum + reward / pi_at,
    )


def statistic(arm: ArmState, variant: Variant, rho: float = 0.0, t: int = 1) -> float:
    """Sufficient statistic of ``arm`` after ``t`` rounds.

    Unpulled arms score 0, except under the optimistic variant where they
    score ``+inf``. The optimism bonus uses the natural log.
    """
    variant = Variant(variant)
    n = arm.count
    if n == 0:
        return math.inf if variant is Variant.OPTIMISTIC else 0.0
    if variant is Variant.PLAIN:
        return arm.reward_sum / n
    if variant is Variant.REWEIGHTED:
        return arm.reweighted_sum / n
    if variant is Variant.DEBIASED:
        return arm.debiased_sum / n
    return arm.reward_sum / n + rho * math.sqrt(math.log(t) / n)


def probabilities_from_statistics(stats: Sequence[float], eps: float) -> np.ndarray:
    """Uniform exploration mass plus the remainder split evenly over the argmax set.

    Ties are exact floating point equality.
    """
    k = len(stats)
    best = max(stats)
    winners = [i for i, s in enumerate(stats) if s == best]
    explore = eps / k
    exploit = (1.0 - eps) / len(winners)
    probs = np.full(k, explore)
    for i in winners:
        probs[i] = explore + exploit
    return probs


def action_probabilities(arms: Sequence[ArmState], spec: PolicySpec, t: int) -> np.ndarray:
    """Action distribution on round ``t`` given arm states after round ``t - 1``."""
    if len(arms) < 2:
        raise ValueError("need at least two arms")
    eps = spec.schedule.epsilon(t)
    stats = [statistic(a, spec.variant, spec.rho, t - 1) for a in arms]
    return probabilities_from_statistics(stats, eps)


def select_with_uniform(probs: Sequence[float], u: float) -> int:
    """Inverse-CDF draw given ``u`` in [0, 1)."""
    acc = 0.0
    last = -1
    for i, p in enumerate(probs):
        if p > 0:
            last = i
        acc += p
        if u < acc:
            return i
    # only reached through rounding when u is within an ulp of 1
    return last


def select(probs: Sequence[float], rng: RandomStream) -> int:
    return select_with_uniform(probs, rng.random())


def replay(pulls: Iterable[tuple[float, float]]) -> ArmState:
    """Batch recomputation of an arm's aggregates from its ``(reward, pi)`` log."""
    log = list(pulls)
    if not log:
        return ArmState()
    r = np.array([x[0] for x in log], dtype=float)
    pi = np.array([x[1] for x in log], dtype=float)
    return ArmState(
        count=len(log),
        reward_sum=math.fsum(r),
        reweighted_sum=math.fsum(r / np.sqrt(pi)),
        debiased_sum=math.fsum(r / pi),
    )
