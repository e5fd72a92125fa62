# # Reproduce every figure preset
#
# Writes curves.csv, runs.csv and an SVG plot per preset into
# demo_output/<preset>/. The same can be done from the shell with
# `riskbench simulate --preset fig3a --out-dir demo_output/fig3a`.

import sys
import time
from pathlib import Path

from riskbench.config import load_preset, preset_ids
from riskbench.harness import run_all, selection_curve
from riskbench.output import emit_csv, emit_runs_csv, render_svg

root = Path("demo_output")
ids = sys.argv[1:] or preset_ids()

for pid in ids:
    cfg = load_preset(pid)
    start = time.perf_counter()
    results = run_all(cfg)
    curve = selection_curve(cfg, results)
    d = root / pid
    d.mkdir(parents=True, exist_ok=True)
    emit_csv(curve, d / "curves.csv")
    emit_runs_csv(results, d / "runs.csv")
    (d / "curves.svg").write_text(render_svg(curve))
    final = "  ".join(f"{n}={p:.2f}" for n, p in zip(cfg.arm_names, curve.p_hat[-1]))
    print(f"{pid:6s} T={cfg.horizon:>8d}  {final}  ({time.perf_counter() - start:.1f}s)")
