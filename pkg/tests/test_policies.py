import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from riskbench.distributions import PointMass, Rademacher, Uniform
from riskbench.harness import ExperimentConfig, run_trajectory
from riskbench.policies import (
    ArmState,
    PolicySpec,
    Variant,
    action_probabilities,
    probabilities_from_statistics,
    replay,
    select,
    select_with_uniform,
    statistic,
    update,
)
from riskbench.schedules import Schedule
from riskbench.streams import stream


def arm_from(rewards, pis=None):
    a = ArmState()
    pis = pis or [1.0] * len(rewards)
    for r, p in zip(rewards, pis):
        a = update(a, r, p)
    return a


class TestStatistic:
    def test_plain_mean(self):
        assert statistic(arm_from([1, -1, 1]), Variant.PLAIN) == pytest.approx(1 / 3)

    def test_reweighted_single_pull(self):
        assert statistic(arm_from([1.0], [0.25]), Variant.REWEIGHTED) == 2.0

    def test_debiased_single_pull(self):
        assert statistic(arm_from([1.0], [0.25]), Variant.DEBIASED) == 4.0

    def test_optimistic_bonus(self):
        arm = ArmState(count=4, reward_sum=0.0)
        assert statistic(arm, Variant.OPTIMISTIC, rho=2.0, t=100) == pytest.approx(2 * math.sqrt(math.log(100) / 4))
        assert statistic(arm, Variant.OPTIMISTIC, rho=2.0, t=100) == pytest.approx(2.14597, abs=5e-6)

    def test_optimistic_unpulled_is_infinite(self):
        assert statistic(ArmState(), Variant.OPTIMISTIC, rho=2.0, t=5) == math.inf

    @pytest.mark.parametrize("v", [Variant.PLAIN, Variant.REWEIGHTED, Variant.DEBIASED])
    def test_unpulled_scores_zero(self, v):
        assert statistic(ArmState(), v) == 0.0


class TestActionProbabilities:
    def test_clear_winner(self):
        np.testing.assert_allclose(probabilities_from_statistics([0.5, 0.2], 0.2), [0.9, 0.1])

    def test_tie(self):
        np.testing.assert_allclose(probabilities_from_statistics([0.3, 0.3], 0.2), [0.5, 0.5])

    @pytest.mark.parametrize("v", [Variant.PLAIN, Variant.REWEIGHTED, Variant.DEBIASED, Variant.OPTIMISTIC])
    @pytest.mark.parametrize("eps_c", [0.01, 0.5, 1.0])
    def test_fresh_start_is_a_fair_coin(self, v, eps_c):
        spec = PolicySpec(v, 1.0, Schedule(eps_c, 0.0))
        np.testing.assert_allclose(action_probabilities([ArmState(), ArmState()], spec, 1), [0.5, 0.5])

    def test_needs_two_arms(self):
        with pytest.raises(ValueError):
            action_probabilities([ArmState()], PolicySpec(), 1)

    @given(
        st.lists(st.one_of(st.floats(-1e6, 1e6), st.just(math.inf)), min_size=2, max_size=8),
        st.floats(0, 1),
    )
    def test_normalisation_and_exploration_floor(self, stats, eps):
        probs = probabilities_from_statistics(stats, eps)
        assert abs(probs.sum() - 1) <= 1e-12
        assert np.all(probs >= eps / len(stats) - 1e-12)

    @given(st.lists(st.integers(0, 3), min_size=1, max_size=6))
    def test_optimistic_precedence(self, counts):
        counts = counts + [0]
        arms = [ArmState(count=n, reward_sum=float(n)) for n in counts]
        spec = PolicySpec(Variant.OPTIMISTIC, 2.0, Schedule(0.1, 0.0))
        t = sum(counts) + 1
        probs = action_probabilities(arms, spec, t)
        top = set(np.flatnonzero(probs == probs.max()))
        assert top == {i for i, n in enumerate(counts) if n == 0}


class TestSelect:
    def test_degenerate(self, rng):
        assert select([1.0, 0.0], rng) == 0
        assert select([0.0, 1.0], rng) == 1

    def test_skips_zero_mass_at_rounding_edge(self):
        assert select_with_uniform([0.5, 0.5, 0.0], 1 - 1e-17) == 1

    def test_fair_coin_frequency(self):
        g = stream(2, 0, "select")
        n = 10**5
        hits = sum(select([0.5, 0.5], g) == 0 for _ in range(n))
        # binomial oracle: sd = 0.5 / sqrt(n) ~ 0.0016, so 0.01 is > 6 sd
        assert abs(hits / n - 0.5) <= 0.01


class TestUpdate:
    def test_fresh_arm(self):
        a = update(ArmState(), 1.0, 0.25)
        assert a == ArmState(1, 1.0, 2.0, 4.0)

    def test_zero_reward(self):
        a = ArmState(3, 1.5, 2.5, 3.5)
        assert update(a, 0.0, 0.3) == ArmState(4, 1.5, 2.5, 3.5)

    @pytest.mark.parametrize("pi", [0.0, -0.1])
    def test_non_positive_probability(self, pi):
        with pytest.raises(ValueError):
            update(ArmState(), 1.0, pi)

    @settings(max_examples=200)
    @given(st.lists(st.tuples(st.floats(-10, 10), st.floats(1e-6, 1.0)), min_size=1, max_size=60))
    def test_incremental_equals_batch(self, log):
        inc = ArmState()
        for r, p in log:
            inc = update(inc, r, p)
        batch = replay(log)
        assert inc.count == batch.count
        for v in Variant:
            a = statistic(inc, v, 1.0, 50)
            b = statistic(batch, v, 1.0, 50)
            scale = sum(abs(r) / p for r, p in log) / len(log) + 1.0
            assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9 * scale)


@given(
    st.lists(st.lists(st.integers(-5, 5), min_size=1, max_size=6), min_size=2, max_size=5),
    st.integers(-100, 100),
)
def test_plain_argmax_shift_invariant(logs, c):
    def winners(rows):
        stats = [statistic(arm_from([float(r) for r in row]), Variant.PLAIN) for row in rows]
        best = max(stats)
        return {i for i, s in enumerate(stats) if s == best}

    exact = [Fraction(sum(row), len(row)) for row in logs]
    assert winners(logs) == {i for i, m in enumerate(exact) if m == max(exact)}
    assert winners(logs) == winners([[r + c for r in row] for row in logs])


def test_unpulled_arms_state_invariant():
    a = ArmState()
    assert a.count == 0 and a.reward_sum == a.reweighted_sum == a.debiased_sum == 0


@pytest.mark.parametrize(
    "variant, rho, sched",
    [
        (Variant.PLAIN, 0.0, Schedule(1, 1)),
        (Variant.REWEIGHTED, 0.0, Schedule(1, 0.49)),
        (Variant.OPTIMISTIC, 2.0, Schedule(1, 1)),
        (Variant.OPTIMISTIC, 0.02, Schedule(0.5, 0.3, 0.01)),
        (Variant.DEBIASED, 0.0, Schedule(1, 1)),
    ],
)
def test_compiled_kernel_matches_reference(variant, rho, sched):
    cfg = ExperimentConfig(
        arms=(PointMass(-1.0), PointMass(0.0), Uniform(-1.0, 1.0), Rademacher()),
        policy=PolicySpec(variant, rho, sched),
        horizon=9000,
        runs=2,
        master_seed=31,
    )
    for i in range(2):
        assert run_trajectory(cfg, i) == run_trajectory(cfg, i, reference=True)


def test_replay_matches_trajectory_sums():
    # replay oracle over the logged pulls, reconstructed from the reference path
    cfg = ExperimentConfig(
        arms=(PointMass(0.0), Uniform(-1.0, 1.0)),
        policy=PolicySpec(Variant.REWEIGHTED, 0.0, Schedule(1, 0.49)),
        horizon=500,
        runs=1,
        checkpoints=tuple(range(1, 501)),
        master_seed=8,
    )
    res = run_trajectory(cfg, 0)
    log = {0: [], 1: []}
    prev_sum = np.zeros(2)
    prev_cnt = np.zeros(2, dtype=int)
    states = [ArmState(), ArmState()]
    spec = cfg.policy
    for i, t in enumerate(res.checkpoints):
        a = int(res.chosen[i])
        r = res.reward_sum[i, a] - prev_sum[a]
        pi = action_probabilities(states, spec, int(t))[a]
        log[a].append((r, pi))
        states[a] = update(states[a], r, pi)
        prev_sum = res.reward_sum[i].copy()
        assert res.counts[i, a] == prev_cnt[a] + 1
        prev_cnt = res.counts[i].copy()
    for a in (0, 1):
        batch = replay(log[a])
        assert batch.count == res.counts[-1, a]
        assert math.isclose(batch.reweighted_sum, res.reweighted_sum[-1, a], rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(batch.debiased_sum, res.debiased_sum[-1, a], rel_tol=1e-9, abs_tol=1e-7)
