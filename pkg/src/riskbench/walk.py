"""The advantage walk: a lazy random walk whose laziness depends on its sign.

With a safe arm paying exactly 0, the plain epsilon-Greedy process is fully
described by the risky arm's reward sum ``X_t``. It moves by a fresh reward
draw with probability ``1 - eps/2`` above zero, ``1/2`` at zero and ``eps/2``
below zero, so it lingers where it is negative.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .distributions import RewardDistribution
from .schedules import Schedule
from .streams import RandomStream

EpsilonLike = Union[Schedule, float]


@dataclass(frozen=True)
class WalkState:
    position: float = 0.0
    t: int = 0
    last_crossing: int = 0

    @property
    def tau(self) -> int:
        """Steps since the last upward crossing of zero."""
        return self.t - self.last_crossing


def move_probability(position: float, eps: float) -> float:
    if position > 0:
        return 1.0 - eps / 2
    if position < 0:
        return eps / 2
    return 0.5


def walk_step(w: WalkState, inc: RewardDistribution, eps: float, rng: RandomStream) -> WalkState:
    """Advance one step.

    A crossing is recorded whenever the previous position is <= 0 and the new
    one is >= 0, which includes sitting at zero.
    """
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    moves = rng.random() < move_probability(w.position, eps)
    step = float(inc.sample_n(rng, 1)[0])
    new = w.position + step if moves else w.position
    t = w.t + 1
    crossed = w.position <= 0 <= new
    return WalkState(new, t, t if crossed else w.last_crossing)


def _eps_at(eps: EpsilonLike, t: int) -> float:
    if isinstance(eps, Schedule):
        return eps.epsilon(t)
    return float(eps)


@dataclass
class WalkBatch:
    """Per-run tallies from :func:`simulate_walks`.

    ``moved`` and ``trials`` are indexed by the sign of the position before the
    step: 0 for positive, 1 for zero, 2 for negative.
    """

    positive_steps: np.ndarray
    final_position: np.ndarray
    last_crossing: np.ndarray
    horizon: int
    moved: np.ndarray
    trials: np.ndarray

    @property
    def fraction_positive(self) -> np.ndarray:
        return self.positive_steps / self.horizon

    @property
    def tau(self) -> np.ndarray:
        return self.horizon - self.last_crossing


def simulate_walks(inc: RewardDistribution, eps: EpsilonLike, horizon: int, runs: int, rng: RandomStream) -> WalkBatch:
    """Run ``runs`` independent advantage walks for ``horizon`` steps.

    ``eps`` is either a schedule (evaluated at step ``t``) or a fixed rate.
    """
    if horizon < 1 or runs < 1:
        raise ValueError("horizon and runs must be positive")
    x = np.zeros(runs)
    positive = np.zeros(runs, dtype=np.int64)
    last = np.zeros(runs, dtype=np.int64)
    moved = np.zeros(3, dtype=np.int64)
    trials = np.zeros(3, dtype=np.int64)
    for t in range(1, horizon + 1):
        e = _eps_at(eps, t)
        bins = np.where(x > 0, 0, np.where(x < 0, 2, 1))
        p = np.array([1.0 - e / 2, 0.5, e / 2])[bins]
        go = rng.random(runs) < p
        step = inc.sample_n(rng, runs)
        new = np.where(go, x + step, x)
        last[(x <= 0) & (new >= 0)] = t
        moved += np.bincount(bins[go], minlength=3)
        trials += np.bincount(bins, minlength=3)
        x = new
        positive += x > 0
    return WalkBatch(positive, x, last, horizon, moved, trials)


def occupation_fractions(inc: RewardDistribution, eps_schedule: EpsilonLike, horizon: int, runs: int, rng: RandomStream) -> tuple[float, float]:
    """Average fraction of steps with ``X_t > 0`` and with ``X_t <= 0``."""
    fp = float(simulate_walks(inc, eps_schedule, horizon, runs, rng).fraction_positive.mean())
    return fp, 1.0 - fp


def survival_probability(inc: RewardDistribution, t: int, runs: int, rng: RandomStream, chunk: int = 100_000) -> float:
    """Monte Carlo estimate of P[Y_1, ..., Y_t > 0] for the ordinary walk with steps ``inc``."""
    if t < 1 or runs < 1:
        raise ValueError("t and runs must be positive")
    alive = 0
    done = 0
    while done < runs:
        m = min(chunk, runs - done)
        paths = np.cumsum(inc.sample_n(rng, m * t).reshape(m, t), axis=1)
        alive += int(np.count_nonzero((paths > 0).all(axis=1)))
        done += m
    return alive / runs


def sample_path(inc: RewardDistribution, eps: EpsilonLike, horizon: int, rng: RandomStream) -> np.ndarray:
    """Positions ``X_0..X_horizon`` of a single walk."""
    w = WalkState()
    out = np.empty(horizon + 1)
    out[0] = 0.0
    for t in range(1, horizon + 1):
        w = walk_step(w, inc, _eps_at(eps, t), rng)
        out[t] = w.position
    return out
