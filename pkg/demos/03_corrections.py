# # Correcting the bias
#
# Same centred pair (point mass at 0 against U[-1, 1]) under four sufficient
# statistics: the plain mean, the sqrt(pi)-reweighted mean, the optimistic mean
# and the fully inverse-propensity debiased mean.

from riskbench.distributions import PointMass, Uniform
from riskbench.harness import ExperimentConfig, run_experiment, reweighted_variance_check
from riskbench.policies import PolicySpec, Variant
from riskbench.schedules import Schedule

arms = (PointMass(0.0), Uniform(-1.0, 1.0))
setups = {
    "plain, eps=1/t": PolicySpec(Variant.PLAIN, 0.0, Schedule(1, 1)),
    "reweighted, eps=t^-0.49": PolicySpec(Variant.REWEIGHTED, 0.0, Schedule(1, 0.49)),
    "reweighted, eps=1/t": PolicySpec(Variant.REWEIGHTED, 0.0, Schedule(1, 1)),
    "optimistic rho=2": PolicySpec(Variant.OPTIMISTIC, 2.0, Schedule(1, 1)),
    "optimistic rho=0.02": PolicySpec(Variant.OPTIMISTIC, 0.02, Schedule(1, 1)),
    "debiased, eps=1/t": PolicySpec(Variant.DEBIASED, 0.0, Schedule(1, 1)),
}

# ## Final selection probability of the safe arm

for name, spec in setups.items():
    cfg = ExperimentConfig(arms=arms, policy=spec, horizon=100_000, runs=100, master_seed=11, arm_names=("safe", "risky"))
    curve = run_experiment(cfg)
    lo, hi = curve.ci_lo[-1, 0], curve.ci_hi[-1, 0]
    print(f"{name:>24}: P[safe] = {curve.final(0):.2f}  (90% CI {lo:.2f}-{hi:.2f})")

# ## Why reweighting works
#
# Dividing each reward by sqrt(pi) makes every step of the risky arm's
# reweighted sum contribute exactly sigma^2 of variance in expectation, whether
# the arm is currently favoured or not. The sum then behaves like a symmetric
# random walk with constant step variance.

cfg = ExperimentConfig(arms=arms, policy=setups["reweighted, eps=t^-0.49"], horizon=10_000, runs=500, master_seed=12)
print("var(Y_t / sqrt t) =", round(reweighted_variance_check(cfg, 10_000), 4), " sigma^2 =", round(1 / 3, 4))
