# # The advantage walk
#
# With a safe arm paying exactly 0, plain epsilon-Greedy is driven by the risky
# arm's reward sum X_t alone. X_t moves often while positive and rarely while
# negative, so it spends most of its time below zero.

import math

import numpy as np

from riskbench.distributions import PointMass, Rademacher, Uniform
from riskbench.harness import ExperimentConfig, run_all
from riskbench.policies import PolicySpec
from riskbench.schedules import Schedule
from riskbench.streams import stream
from riskbench.walk import occupation_fractions, sample_path, simulate_walks, survival_probability

# ## One realisation

path = sample_path(Uniform(-1, 1), Schedule(1, 1), 2000, stream(0, 0, "demo"))
print("fraction of time above zero:", np.mean(path[1:] > 0))
print("longest stretch of constant position:", np.max(np.diff(np.flatnonzero(np.diff(path) != 0))))

# ## Occupation of the positive half-line
#
# Full exploration (eps = 1) makes the walk an ordinary lazy walk: symmetric.
# A decaying schedule makes it stick below zero.

for label, eps in [("eps = 1", 1.0), ("eps = 1/t", Schedule(1, 1)), ("eps = t^-0.49", Schedule(1, 0.49))]:
    fp, _ = occupation_fractions(Uniform(-1, 1), eps, 10_000, 500, stream(1, 0, label))
    print(f"{label:>14}: fraction positive = {fp:.3f}")

# ## The bandit is the walk
#
# Same occupation statistic, computed from the bandit's risky-arm reward sum.

T = 1000
cfg = ExperimentConfig(
    arms=(PointMass(0.0), Uniform(-1, 1)),
    policy=PolicySpec("plain", 0.0, Schedule(1, 1)),
    horizon=T,
    runs=500,
    checkpoints=tuple(range(1, T + 1)),
    master_seed=3,
)
x = np.stack([r.reward_sum[:, 1] for r in run_all(cfg)])
walk = simulate_walks(Uniform(-1, 1), Schedule(1, 1), T, 500, stream(3, 0, "walk"))
print("bandit:", (x > 0).mean(), " walk:", walk.fraction_positive.mean())

# ## Survival of an ordinary walk
#
# Continuous symmetric steps survive t steps above zero with probability close
# to 1/sqrt(pi t). Rademacher steps are lattice valued and survive less often:
# the exact value is C(t, t/2) / 2^(t+1), about 1/sqrt(2 pi t).

for t in (10, 100, 1000):
    pu = survival_probability(Uniform(-1, 1), t, 200_000, stream(4, t, "u"))
    pr = survival_probability(Rademacher(), t, 200_000, stream(4, t, "r"))
    print(f"t={t:5d}  uniform {pu:.4f}  1/sqrt(pi t) {1 / math.sqrt(math.pi * t):.4f}  "
          f"rademacher {pr:.4f}  exact {math.comb(t, t // 2) / 2 ** (t + 1) if t % 2 == 0 else float('nan'):.4f}")
