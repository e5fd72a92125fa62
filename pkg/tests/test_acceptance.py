"""Exit criteria: desk-scale reproductions at T = 1e5 (1e6 for fig5b), 100 runs.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
"""
import functools
import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from riskbench.config import load_preset
from riskbench.distributions import PointMass, Rademacher, Uniform
from riskbench.harness import (
    ExperimentConfig,
    dominated_arm_frequency,
    dominated_arms,
    reweighted_variance_check,
    run_all,
    run_trajectory,
    selection_curve,
)
from riskbench.output import emit_csv
from riskbench.policies import (
    ArmState,
    PolicySpec,
    Variant,
    action_probabilities,
    replay,
    statistic,
    update,
)
from riskbench.schedules import Schedule
from riskbench.streams import stream
from riskbench.walk import simulate_walks, survival_probability

pytestmark = pytest.mark.slow


def check(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@functools.lru_cache(maxsize=None)
def preset_run(pid):
    cfg = load_preset(pid)
    results = run_all(cfg)
    return cfg, results, selection_curve(cfg, results)


def final(pid, name):
    cfg, _, curve = preset_run(pid)
    return curve.final(cfg.arm_index(name))


@pytest.mark.parametrize("pid", ["fig2a", "fig2b", "fig2c"])
def test_c01_plain_perfect_risk_aversion(pid):
    safe, dom = final(pid, "safe"), final(pid, "dominated")
    check(1, f"{pid} perfect risk aversion", safe >= 0.9 and dom <= 0.05, f"p_safe={safe:.3f} (>=0.9), p_dominated={dom:.3f} (<=0.05)")


@pytest.mark.parametrize("pid", ["fig3a", "fig3b"])
def test_c02_reweighted_risk_neutral(pid):
    safe = final(pid, "safe")
    check(2, f"{pid} reweighted risk neutral", abs(safe - 0.5) <= 0.1, f"p_safe={safe:.3f}, |p_safe-0.5|={abs(safe - 0.5):.3f} (<=0.1)")


def test_c03_reweighted_low_exploration_risk_averse():
    safe = final("fig3c", "safe")
    check(3, "fig3c reweighted with eps=1/t risk averse", safe >= 0.7, f"p_safe={safe:.3f} (>=0.7)")


@pytest.mark.parametrize("pid", ["fig4a", "fig4b"])
def test_c04_optimistic_risk_neutral(pid):
    safe, risky, dom = final(pid, "safe"), final(pid, "risky"), final(pid, "dominated")
    ok = dom <= 0.05 and abs(safe - 0.5) <= 0.1 and abs(risky - 0.5) <= 0.1
    check(4, f"{pid} optimistic rho=2 risk neutral", ok, f"p_safe={safe:.3f}, p_risky={risky:.3f} (0.5+-0.1), p_dominated={dom:.3f} (<=0.05)")


def test_c05_optimistic_small_rho_risk_averse():
    safe = final("fig4c", "safe")
    check(5, "fig4c optimistic rho=0.02 risk averse", safe >= 0.7, f"p_safe={safe:.3f} (>=0.7)")


def test_c06_transient_bias_with_better_risky_arm():
    cfg, _, curve = preset_run("fig5b")
    s, r = cfg.arm_index("safe"), cfg.arm_index("risky")
    window = [i for i, t in enumerate(curve.checkpoints) if 100 <= t <= 10**4]
    favoured = [int(curve.checkpoints[i]) for i in window if curve.p_hat[i, s] > curve.p_hat[i, r]]
    late, early = curve.at(10**6, r), curve.at(10**3, r)
    ok = bool(favoured) and late > early
    check(6, "fig5b transient preference for the safe arm", ok,
          f"safe>risky at t in {favoured[:3]}..., p_risky(1e6)={late:.3f} > p_risky(1e3)={early:.3f}")


def test_c07_reweighted_three_arms_not_neutral():
    cfg, _, curve = preset_run("fig6")
    s = cfg.arm_index("safe")
    dev, hw = abs(curve.final(s) - 0.5), float(curve.half_width[-1, s])
    check(7, "fig6 reweighted with a third arm departs from neutrality", dev >= 3 * hw,
          f"|p_safe-0.5|={dev:.3f} vs 3*half-width={3 * hw:.3f}")


def test_c08_debiased_risk_affine():
    risky = final("fig8", "risky")
    check(8, "fig8 debiased statistic is risk affine", risky >= 0.6, f"p_risky={risky:.3f} (>=0.6)")


@pytest.mark.parametrize("pid", ["fig7a", "fig7b"])
def test_c09_reweighted_no_regret(pid):
    cfg, _, curve = preset_run(pid)
    freqs = {cfg.arm_names[a]: dominated_arm_frequency(cfg, a, curve)[-1] for a in dominated_arms(cfg)}
    ok = bool(freqs) and all(v <= 0.15 for v in freqs.values())
    check(9, f"{pid} reweighted no-regret", ok, ", ".join(f"p_{k}={v:.3f}" for k, v in freqs.items()) + " (<=0.15)")


def test_c10_survival_law():
    target = 1 / math.sqrt(100 * math.pi)
    p = survival_probability(Rademacher(), 100, 10**6, stream(2024, 0, "survival"))
    rel = p / target - 1
    check(10, "Rademacher survival at t=100 vs 1/sqrt(pi t)", abs(rel) <= 0.2,
          f"estimate={p:.4f}, target={target:.4f}, relative error={rel:+.1%} (+-20%)")


def test_c11_walk_kernel_and_bandit_equivalence():
    eps = 0.1
    b = simulate_walks(Uniform(-1, 1), eps, 1000, 1000, stream(2024, 0, "kernel"))
    z = []
    for i, p in enumerate((1 - eps / 2, 0.5, eps / 2)):
        n = int(b.trials[i])
        z.append(abs(b.moved[i] / n - p) / math.sqrt(p * (1 - p) / n))
    kernel_ok = all(v <= 3 for v in z)

    T, runs = 1000, 1000
    cfg = ExperimentConfig(
        arms=(PointMass(0.0), Uniform(-1, 1)),
        policy=PolicySpec(Variant.PLAIN, 0.0, Schedule(1, 1)),
        horizon=T,
        runs=runs,
        checkpoints=tuple(range(1, T + 1)),
        master_seed=2024,
    )
    x = np.stack([r.reward_sum[:, 1] for r in run_all(cfg)])
    bandit = float((x > 0).mean())
    walk = float(simulate_walks(Uniform(-1, 1), Schedule(1, 1), T, runs, stream(2024, 0, "walk")).fraction_positive.mean())
    eq_ok = abs(bandit - walk) < 0.03
    check(11, "walk kernel conformance and bandit equivalence", kernel_ok and eq_ok,
          f"kernel |z|=({', '.join(f'{v:.2f}' for v in z)}) (<=3); occupation bandit={bandit:.3f} walk={walk:.3f} (diff<0.03)")


@pytest.mark.parametrize("risky, sigma2", [(Uniform(-1, 1), 1 / 3), (Rademacher(), 1.0)], ids=["uniform", "rademacher"])
def test_c12_variance_equalisation(risky, sigma2):
    cfg = ExperimentConfig(
        arms=(PointMass(0.0), risky),
        policy=PolicySpec(Variant.REWEIGHTED, 0.0, Schedule(1, 0.49)),
        horizon=10**4,
        runs=1000,
        master_seed=2024,
    )
    v = reweighted_variance_check(cfg, 10**4)
    rel = v / sigma2 - 1
    check(12, f"reweighted variance equalisation ({type(risky).__name__})", abs(rel) <= 0.15,
          f"var(Y_t/sqrt t)={v:.4f}, sigma^2={sigma2:.4f}, relative error={rel:+.1%} (+-15%)")


def test_c13_engineering_properties(tmp_path):
    problems = []

    # normalisation and exploration floor on states visited by real runs
    cfg = replace(load_preset("fig4a"), horizon=3000, checkpoints=tuple(range(1, 3001)), runs=3)
    for r in run_all(cfg):
        for i in range(0, 3000, 97):
            arms = [ArmState(int(r.counts[i, a]), *map(float, r.sums[i, :, a])) for a in range(3)]
            t = int(r.checkpoints[i]) + 1
            p = action_probabilities(arms, cfg.policy, t)
            if abs(p.sum() - 1) > 1e-12 or p.min() < cfg.policy.schedule.epsilon(t) / 3 - 1e-12:
                problems.append(f"normalisation at t={t}")
        if not np.array_equal(r.counts.sum(axis=1), r.checkpoints):
            problems.append("pull conservation")

    # incremental vs batch, for all four variants
    g = stream(2024, 0, "log")
    log = list(zip(g.uniform(-1, 1, 5000), g.uniform(1e-4, 1, 5000)))
    inc = ArmState()
    for rw, pi in log:
        inc = update(inc, rw, pi)
    batch = replay(log)
    for v in Variant:
        a, b = statistic(inc, v, 2.0, 5000), statistic(batch, v, 2.0, 5000)
        scale = sum(abs(rw) / pi for rw, pi in log) / len(log)
        if not math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9 * scale):
            problems.append(f"incremental vs batch ({v.value})")
    small = load_preset("fig2a").with_horizon(5000)
    if not run_trajectory(small, 0) == run_trajectory(small, 0, reference=True):
        problems.append("compiled kernel vs scalar reference")

    # byte-identical CSVs across reruns and worker counts
    fig3a = load_preset("fig3a")
    paths = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 2)):
        path = tmp_path / f"{tag}.csv"
        emit_csv(selection_curve(fig3a, run_all(fig3a, workers=workers)), path)
        paths.append(path.read_bytes())
    if not paths[0] == paths[1] == paths[2]:
        problems.append("CSV determinism")

    # per-run conservation on every full-scale preset already simulated
    for pid in ("fig2a", "fig3a", "fig4a", "fig6", "fig8"):
        _, results, curve = preset_run(pid)
        if any(not np.array_equal(r.counts.sum(axis=1), r.checkpoints) for r in results):
            problems.append(f"conservation {pid}")
        if not np.allclose(curve.p_hat.sum(axis=1), 1, atol=1e-9):
            problems.append(f"p_hat sums {pid}")

    check(13, "normalisation, incremental=batch, determinism, conservation", not problems,
          "all properties hold" if not problems else "; ".join(problems))
