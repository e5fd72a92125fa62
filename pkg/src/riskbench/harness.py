"""Monte Carlo experiment engine.

Each run is an independent trajectory keyed by ``(master_seed, run_index)``.
Per-run checkpoint snapshots are reduced into a :class:`SelectionCurve` by run
index, so results do not depend on execution order or worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import _kernel
from .distributions import PointMass, describe
from .policies import (
    ArmState,
    PolicySpec,
    Variant,
    action_probabilities,
    select_with_uniform,
    update,
)
from .streams import stream

DEFAULT_HORIZON = 100_000
DEFAULT_RUNS = 100
CHUNK = 4096


class ConfigError(ValueError):
    """Invalid experiment configuration; ``violations`` lists every problem found."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def log_checkpoints(horizon: int) -> tuple[int, ...]:
    """Powers of ten times {1, 2, 5} up to ``horizon``, always ending at ``horizon``."""
    grid = []
    scale = 1
    while scale <= horizon:
        for m in (1, 2, 5):
            if m * scale <= horizon:
                grid.append(m * scale)
        scale *= 10
    if grid[-1] != horizon:
        grid.append(horizon)
    return tuple(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    arms: tuple
    policy: PolicySpec = PolicySpec()
    horizon: int = DEFAULT_HORIZON
    runs: int = DEFAULT_RUNS
    checkpoints: Optional[tuple] = None
    master_seed: int = 0
    label: str = ""
    arm_names: Optional[tuple] = None
    ci_method: str = "normal"

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        if self.checkpoints is None and isinstance(self.horizon, int) and self.horizon >= 1:
            object.__setattr__(self, "checkpoints", log_checkpoints(self.horizon))
        elif self.checkpoints is not None:
            object.__setattr__(self, "checkpoints", tuple(int(c) for c in self.checkpoints))
        if self.arm_names is None:
            object.__setattr__(self, "arm_names", tuple(describe(d) for d in self.arms))
        else:
            object.__setattr__(self, "arm_names", tuple(self.arm_names))
        problems = self.violations()
        if problems:
            raise ConfigError(problems)

    def violations(self) -> list[str]:
        out = []
        if len(self.arms) < 2:
            out.append("arms: need at least two arms")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            out.append(f"horizon: must be a positive integer, got {self.horizon!r}")
        if not isinstance(self.runs, int) or self.runs < 1:
            out.append(f"runs: must be >= 1, got {self.runs!r}")
        ck = self.checkpoints or ()
        if not ck:
            out.append("checkpoints: must be non-empty")
        else:
            if any(b <= a for a, b in zip(ck, ck[1:])):
                out.append("checkpoints: must be strictly increasing")
            if ck[0] < 1:
                out.append("checkpoints: must be positive")
            if isinstance(self.horizon, int) and ck[-1] > self.horizon:
                out.append(f"checkpoints: last checkpoint {ck[-1]} exceeds horizon {self.horizon}")
        if len(self.arm_names) != len(self.arms):
            out.append("names: need one name per arm")
        if self.ci_method not in ("normal", "wilson"):
            out.append(f"ci: unknown method {self.ci_method!r}")
        if not 0 <= int(self.master_seed) < 2**64:
            out.append("seed: must fit in 64 bits")
        return out

    def with_horizon(self, horizon: int) -> "ExperimentConfig":
        """Copy with a new horizon; a default log grid is regenerated, custom grids are truncated."""
        if tuple(self.checkpoints) == log_checkpoints(self.horizon):
            ck = None
        else:
            ck = tuple(c for c in self.checkpoints if c < horizon) + (horizon,)
        return replace(self, horizon=horizon, checkpoints=ck)

    def arm_index(self, name: str) -> int:
        return self.arm_names.index(name)

    def means(self) -> np.ndarray:
        return np.array([d.mean() for d in self.arms])


@dataclass
class RunResult:
    """Checkpoint snapshots of one trajectory.

    ``sums`` has shape ``(n_checkpoints, 3, n_arms)`` holding the reward,
    reweighted and debiased sums in that order.
    """

    run_index: int
    checkpoints: np.ndarray
    chosen: np.ndarray
    counts: np.ndarray
    cum_reward: np.ndarray
    sums: np.ndarray

    @property
    def reward_sum(self) -> np.ndarray:
        return self.sums[:, 0, :]

    @property
    def reweighted_sum(self) -> np.ndarray:
        return self.sums[:, 1, :]

    @property
    def debiased_sum(self) -> np.ndarray:
        return self.sums[:, 2, :]

    def final_arm_states(self) -> list[ArmState]:
        return [
            ArmState(int(self.counts[-1, a]), *map(float, self.sums[-1, :, a]))
            for a in range(self.counts.shape[1])
        ]

    def __eq__(self, other):
        if not isinstance(other, RunResult):
            return NotImplemented
        return self.run_index == other.run_index and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("checkpoints", "chosen", "counts", "cum_reward", "sums")
        )


class _RewardFeed:
    """Per-arm reward buffers fed from per-arm streams.

    Before each chunk every buffer is topped up so at least ``CHUNK`` unused
    draws remain, which covers any arm being pulled on every step.
    """

    def __init__(self, arms, master_seed, run_index):
        self.arms = arms
        self.rngs = [stream(master_seed, run_index, f"arm:{a}") for a in range(len(arms))]
        self.draws = np.zeros((len(arms), CHUNK))
        self.used = np.full(len(arms), CHUNK, dtype=np.int64)

    def top_up(self):
        for a, d in enumerate(self.arms):
            u = int(self.used[a])
            if u:
                row = self.draws[a]
                row[: CHUNK - u] = row[u:].copy()
                row[CHUNK - u:] = d.sample_n(self.rngs[a], u)
                self.used[a] = 0


def run_trajectory(cfg: ExperimentConfig, run_index: int, *, reference: bool = False) -> RunResult:
    """Simulate rounds ``1..T`` of one run.

    ``reference=True`` uses the scalar functions in :mod:`riskbench.policies`
    instead of the compiled kernel; both consume the same random numbers.
    """
    k = len(cfg.arms)
    ck = np.asarray(cfg.checkpoints, dtype=np.int64)
    n_ck = len(ck)
    out_chosen = np.full(n_ck, -1, dtype=np.int64)
    out_counts = np.zeros((n_ck, k), dtype=np.int64)
    out_sums = np.zeros((n_ck, 3, k))
    out_cum = np.zeros(n_ck)

    sel = stream(cfg.master_seed, run_index, "select")
    feed = _RewardFeed(cfg.arms, cfg.master_seed, run_index)
    horizon = ck[-1]
    spec = cfg.policy
    sch = spec.schedule

    if reference:
        states = [ArmState() for _ in range(k)]
        cum = 0.0
        p = 0
        for t0 in range(0, horizon, CHUNK):
            n = min(CHUNK, horizon - t0)
            feed.top_up()
            u = sel.random(n)
            for j in range(n):
                t = t0 + j + 1
                probs = action_probabilities(states, spec, t)
                a = select_with_uniform(probs, u[j])
                r = feed.draws[a, feed.used[a]]
                feed.used[a] += 1
                states[a] = update(states[a], r, probs[a])
                cum += r
                if p < n_ck and ck[p] == t:
                    out_chosen[p] = a
                    out_cum[p] = cum
                    for b, s in enumerate(states):
                        out_counts[p, b] = s.count
                        out_sums[p, :, b] = (s.reward_sum, s.reweighted_sum, s.debiased_sum)
                    p += 1
    else:
        count = np.zeros(k, dtype=np.int64)
        sums = np.zeros((3, k))
        cum = np.zeros(1)
        ck_pos = np.zeros(1, dtype=np.int64)
        for t0 in range(0, horizon, CHUNK):
            n = min(CHUNK, horizon - t0)
            feed.top_up()
            u = sel.random(n)
            _kernel.advance(
                t0, n, spec.variant.code, float(spec.rho),
                float(sch.c), float(sch.p), float(sch.floor),
                count, sums, u, feed.draws, feed.used,
                ck, ck_pos, out_chosen, out_counts, out_sums, out_cum, cum,
            )

    return RunResult(run_index, ck.copy(), out_chosen, out_counts, out_cum, out_sums)


def _run_one(args):
    cfg, i = args
    return run_trajectory(cfg, i)


def run_all(cfg: ExperimentConfig, *, workers: int = 1, order: Optional[Sequence[int]] = None) -> list[RunResult]:
    """Run every trajectory and return results indexed by run.

    ``order`` permutes execution order (for testing order independence).
    """
    indices = list(range(cfg.runs)) if order is None else list(order)
    if sorted(indices) != list(range(cfg.runs)):
        raise ValueError("order must be a permutation of the run indices")
    if workers <= 1:
        done = [run_trajectory(cfg, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_one, [(cfg, i) for i in indices], chunksize=max(1, len(indices) // (4 * workers))))
    by_index = {r.run_index: r for r in done}
    return [by_index[i] for i in range(cfg.runs)]


def compute_ci(successes: int, n: int, level: float = 0.90, method: str = "normal") -> tuple[float, float]:
    """Confidence interval for a binomial proportion, clipped to [0, 1].

    ``method="normal"`` is the Wald interval ``p +- z sqrt(p(1-p)/n)``;
    ``method="wilson"`` is the Wilson score interval.
    """
    if n < 1 or not 0 <= successes <= n:
        raise ValueError(f"need 0 <= successes <= n and n >= 1, got {successes}/{n}")
    lo, hi = _ci_arrays(np.asarray(successes, dtype=float), n, level, method)
    return float(lo), float(hi)


def _ci_arrays(successes, n, level, method):
    z = stats.norm.ppf(0.5 + level / 2)
    p = successes / n
    if method == "normal":
        half = z * np.sqrt(p * (1 - p) / n)
        lo, hi = p - half, p + half
    elif method == "wilson":
        denom = 1 + z**2 / n
        centre = (p + z**2 / (2 * n)) / denom
        half = z * np.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denom
        lo, hi = centre - half, centre + half
    else:
        raise ValueError(f"unknown CI method {method!r}")
    return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)


@dataclass
class SelectionCurve:
    """Per-arm selection probability at each checkpoint, estimated across runs.

    ``p_hat[i, a]`` is the fraction of runs that chose arm ``a`` on round
    ``checkpoints[i]``. ``cum_share`` is the mean of ``N_a(t) / t``.
    """

    checkpoints: np.ndarray
    p_hat: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    cum_share: np.ndarray
    runs: int
    arm_names: tuple = ()
    label: str = ""
    level: float = 0.90

    @property
    def half_width(self) -> np.ndarray:
        return (self.ci_hi - self.ci_lo) / 2

    @property
    def n_arms(self) -> int:
        return self.p_hat.shape[1]

    def final(self, arm: int) -> float:
        return float(self.p_hat[-1, arm])

    def at(self, t: int, arm: int) -> float:
        i = int(np.searchsorted(self.checkpoints, t))
        if i >= len(self.checkpoints) or self.checkpoints[i] != t:
            raise KeyError(f"{t} is not a checkpoint")
        return float(self.p_hat[i, arm])


def selection_curve(cfg: ExperimentConfig, results: Sequence[RunResult], level: float = 0.90) -> SelectionCurve:
    k = len(cfg.arms)
    n = len(results)
    chosen = np.stack([r.chosen for r in results])  # (runs, n_ck)
    hits = np.stack([(chosen == a).sum(axis=0) for a in range(k)], axis=1)
    p_hat = hits / n
    lo, hi = _ci_arrays(hits.astype(float), n, level, cfg.ci_method)
    ck = np.asarray(cfg.checkpoints)
    counts = np.stack([r.counts for r in results])  # (runs, n_ck, k)
    cum_share = (counts / ck[None, :, None]).mean(axis=0)
    return SelectionCurve(ck.copy(), p_hat, lo, hi, cum_share, n, cfg.arm_names, cfg.label, level)


def run_experiment(cfg: ExperimentConfig, *, workers: int = 1, order=None) -> SelectionCurve:
    return selection_curve(cfg, run_all(cfg, workers=workers, order=order))


def dominated_arms(cfg: ExperimentConfig) -> list[int]:
    means = cfg.means()
    best = means.max()
    return [a for a in range(len(means)) if means[a] < best and not math.isclose(means[a], best)]


def dominated_arm_frequency(cfg: ExperimentConfig, dominated_index: int, curve: Optional[SelectionCurve] = None) -> np.ndarray:
    """Selection-frequency curve of an arm whose mean is strictly below the best."""
    if dominated_index not in dominated_arms(cfg):
        raise ConfigError(f"arm {dominated_index} is not dominated: its mean equals the best mean")
    if curve is None:
        curve = run_experiment(cfg)
    return curve.p_hat[:, dominated_index].copy()


def reweighted_variance_check(cfg: ExperimentConfig, t: int) -> float:
    """Across-run variance of ``Y_t / sqrt(t)`` for the risky arm's reweighted sum.

    Requires the reweighted variant with exactly two arms, one of which is a
    point mass at zero; the other arm is the risky one.
    """
    if cfg.policy.variant is not Variant.REWEIGHTED:
        raise ConfigError("variance check requires the reweighted variant")
    if len(cfg.arms) != 2:
        raise ConfigError("variance check requires exactly two arms")
    zero = [a for a, d in enumerate(cfg.arms) if d == PointMass(0.0)]
    if not zero:
        raise ConfigError("variance check requires one point mass at 0")
    risky = 1 if zero[0] == 0 else 0
    sub = replace(cfg, horizon=t, checkpoints=(t,))
    y = np.array([r.reweighted_sum[0, risky] for r in run_all(sub)])
    return float(np.var(y / math.sqrt(t), ddof=1))
