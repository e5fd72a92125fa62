"""``riskbench`` command line entry point.

Exit codes: 0 on success, 1 on configuration errors, 2 on I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from . import config as cfgmod
from .distributions import from_record
from .harness import ConfigError, run_all, selection_curve
from .output import emit_csv, emit_runs_csv, render_svg
from .schedules import Schedule
from .streams import stream
from .walk import simulate_walks

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_SHORTHANDS = {"rademacher": {"kind": "rademacher"}}


def parse_increments(text: str):
    """Accept ``rademacher`` or an inline record such as ``{kind="uniform", lo=-1.0, hi=1.0}``."""
    if text.strip() in _SHORTHANDS:
        return from_record(_SHORTHANDS[text.strip()])
    try:
        rec = tomllib.loads(f"x = {text}")["x"]
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"--increments: cannot parse {text!r}: {exc}") from None
    try:
        return from_record(rec)
    except ValueError as exc:
        raise ConfigError(f"--increments: {exc}") from None


def _simulate(args) -> int:
    if args.preset:
        cfg = cfgmod.load_preset(args.preset)
    else:
        cfg = cfgmod.parse_config(Path(args.config).read_text())
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.runs is not None:
        overrides["runs"] = args.runs
    if overrides:
        cfg = replace(cfg, **overrides)
    if args.horizon is not None:
        if args.horizon < 1:
            raise ConfigError(f"--horizon must be positive, got {args.horizon}")
        cfg = cfg.with_horizon(args.horizon)

    results = run_all(cfg, workers=args.workers)
    curve = selection_curve(cfg, results)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(curve, out / "curves.csv")
    emit_runs_csv(results, out / "runs.csv")
    (out / "curves.svg").write_text(render_svg(curve))
    (out / "config.toml").write_text(cfgmod.dump_config(cfg))
    final = ", ".join(f"{n}={p:.3f}" for n, p in zip(cfg.arm_names, curve.p_hat[-1]))
    print(f"{cfg.label or 'experiment'}: t={int(curve.checkpoints[-1])} {final}")
    return 0


def _walk(args) -> int:
    inc = parse_increments(args.increments)
    if args.fixed_eps is not None:
        if not 0 <= args.fixed_eps <= 1:
            raise ConfigError(f"--fixed-eps must lie in [0, 1], got {args.fixed_eps}")
        eps = args.fixed_eps
    else:
        try:
            eps = Schedule(args.eps_c, args.eps_p)
        except ValueError as exc:
            raise ConfigError(f"epsilon: {exc}") from None
    if args.horizon < 1 or args.runs < 1:
        raise ConfigError("--horizon and --runs must be positive")
    batch = simulate_walks(inc, eps, args.horizon, args.runs, stream(args.seed, 0, "walk"))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["run", "fraction_positive", "final_position", "tau"])
            for i in range(args.runs):
                w.writerow([i, f"{batch.fraction_positive[i]:.9g}", f"{batch.final_position[i]:.9g}", int(batch.tau[i])])
    fp = batch.fraction_positive.mean()
    print(f"fraction_positive={fp:.6f} fraction_nonpositive={1 - fp:.6f}")
    return 0


def _list_presets(args) -> int:
    for pid in cfgmod.preset_ids():
        text = cfgmod.preset_text(pid)
        first = text.splitlines()[0].lstrip("# ").strip()
        print(f"{pid:6s}  {first}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a bandit experiment and write curves.csv / runs.csv")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a TOML config file")
    src.add_argument("--preset", help="figure preset id (see list-presets)")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--runs", type=int)
    sim.add_argument("--horizon", type=int)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out-dir", required=True)
    sim.set_defaults(func=_simulate)

    walk = sub.add_parser("walk", help="simulate the advantage walk")
    walk.add_argument("--increments", default="{kind=\"uniform\", lo=-1.0, hi=1.0}")
    walk.add_argument("--horizon", type=int, default=10_000)
    walk.add_argument("--runs", type=int, default=1000)
    walk.add_argument("--eps-c", type=float, default=1.0)
    walk.add_argument("--eps-p", type=float, default=1.0)
    walk.add_argument("--fixed-eps", type=float)
    walk.add_argument("--seed", type=int, default=0)
    walk.add_argument("--out", help="per-run CSV output path")
    walk.set_defaults(func=_walk)

    lp = sub.add_parser("list-presets", help="list the figure presets")
    lp.set_defaults(func=_list_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
