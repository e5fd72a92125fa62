# # Emergent risk aversion of epsilon-Greedy
#
# Three arms share mean 0: a point mass and two centred uniforms of growing
# width. A fourth arm pays -1 for sure. Plain epsilon-Greedy with
# eps_t = 1/t ends up on the point mass in essentially every run.

# ## Imports

from pathlib import Path

import numpy as np

from riskbench.config import load_preset
from riskbench.harness import run_all, selection_curve
from riskbench.output import emit_csv, render_svg

out = Path("demo_output")
out.mkdir(exist_ok=True)

# ## The experiment

cfg = load_preset("fig2a")
print(cfg.arm_names, cfg.policy)

results = run_all(cfg)
curve = selection_curve(cfg, results)

# ## Selection probability over time

header = "t".rjust(8) + "".join(n.rjust(11) for n in cfg.arm_names)
print(header)
for t, row in zip(curve.checkpoints, curve.p_hat):
    print(str(t).rjust(8) + "".join(f"{p:11.2f}" for p in row))

# Cumulative shares tell the same story more slowly, since early exploration
# is averaged in.

print(np.round(curve.cum_share[-1], 3))

# ## Save the curve

emit_csv(curve, out / "fig2a.csv")
(out / "fig2a.svg").write_text(render_svg(curve))
