"""Experiment configuration files and the figure presets.

Configs are TOML documents with dotted keys and inline tagged records for the
arms::

    label = "fig3a"
    seed = 1
    horizon = 100000
    runs = 100
    arms = [{kind = "point", value = 0.0}, {kind = "uniform", lo = -1.0, hi = 1.0}]
    names = ["safe", "risky"]
    policy.variant = "reweighted"
    epsilon.c = 1.0
    epsilon.p = 0.49
"""
from __future__ import annotations

import sys
from importlib import resources
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .distributions import from_record
from .harness import DEFAULT_HORIZON, DEFAULT_RUNS, ConfigError, ExperimentConfig, log_checkpoints
from .policies import PolicySpec, Variant
from .schedules import Schedule

_TOP = {"label", "seed", "horizon", "runs", "checkpoints", "ci", "arms", "names", "policy", "epsilon"}
_POLICY = {"variant", "rho"}
_EPSILON = {"c", "p", "floor"}


def _num(section: dict, key: str, where: str, errors: list, default=None, integer=False):
    if key not in section:
        return default
    v = section[key]
    ok = isinstance(v, int) if integer else isinstance(v, (int, float))
    if isinstance(v, bool) or not ok:
        kind = "an integer" if integer else "a number"
        errors.append(f"{where}: must be {kind}, got {v!r}")
        return default
    return v if integer else float(v)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document.

    Raises :class:`ConfigError` listing every violation found (syntax errors
    carry the line and column reported by the TOML reader).
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"syntax error: {exc}"]) from None
    return config_from_dict(doc)


def config_from_dict(doc: dict[str, Any]) -> ExperimentConfig:
    errors: list[str] = []
    for key in sorted(set(doc) - _TOP):
        errors.append(f"{key}: unknown key")

    policy = doc.get("policy", {})
    eps = doc.get("epsilon", {})
    for name, sec, allowed in (("policy", policy, _POLICY), ("epsilon", eps, _EPSILON)):
        if not isinstance(sec, dict):
            errors.append(f"{name}: must be a table")
            continue
        for key in sorted(set(sec) - allowed):
            errors.append(f"{name}.{key}: unknown key")
    policy = policy if isinstance(policy, dict) else {}
    eps = eps if isinstance(eps, dict) else {}

    n_before = len(errors)
    c = _num(eps, "c", "epsilon.c", errors, 1.0)
    p = _num(eps, "p", "epsilon.p", errors, 1.0)
    floor = _num(eps, "floor", "epsilon.floor", errors, 0.0)
    if c <= 0:
        errors.append(f"epsilon.c: coefficient must be > 0, got {c}")
    if p < 0:
        errors.append(f"epsilon.p: exponent must be >= 0, got {p}")
    if not 0 <= floor <= 1:
        errors.append(f"epsilon.floor: must lie in [0, 1], got {floor}")
    schedule = Schedule(c, p, floor) if len(errors) == n_before else None

    variant = policy.get("variant", "plain")
    try:
        variant = Variant(variant)
    except ValueError:
        errors.append(f"policy.variant: must be one of {[v.value for v in Variant]}, got {variant!r}")
        variant = None
    rho = _num(policy, "rho", "policy.rho", errors, 0.0)
    spec = None
    if variant is not None and schedule is not None:
        try:
            spec = PolicySpec(variant, rho, schedule)
        except ValueError as exc:
            errors.append(f"policy.rho: {exc}")

    arms = []
    raw_arms = doc.get("arms")
    if raw_arms is None:
        errors.append("arms: missing")
    elif not isinstance(raw_arms, list):
        errors.append("arms: must be a list of tagged records")
    else:
        for i, rec in enumerate(raw_arms):
            try:
                arms.append(from_record(rec))
            except ValueError as exc:
                errors.append(f"arms[{i}]: {exc}")

    horizon = _num(doc, "horizon", "horizon", errors, DEFAULT_HORIZON, integer=True)
    runs = _num(doc, "runs", "runs", errors, DEFAULT_RUNS, integer=True)
    seed = _num(doc, "seed", "seed", errors, 0, integer=True)
    if horizon is not None and horizon < 1:
        errors.append(f"horizon: must be a positive integer, got {horizon}")
    if runs is not None and runs < 1:
        errors.append(f"runs: must be >= 1, got {runs}")
    if seed is not None and seed < 0:
        errors.append(f"seed: must be non-negative, got {seed}")
    checkpoints = doc.get("checkpoints")
    if checkpoints is not None and not (
        isinstance(checkpoints, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in checkpoints)
    ):
        errors.append("checkpoints: must be a list of integers")
        checkpoints = None
    names = doc.get("names")
    if names is not None and not (isinstance(names, list) and all(isinstance(x, str) for x in names)):
        errors.append("names: must be a list of strings")
        names = None
    label = doc.get("label", "")
    if not isinstance(label, str):
        errors.append("label: must be a string")
        label = ""
    ci = doc.get("ci", "normal")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        arms=tuple(arms),
        policy=spec,
        horizon=horizon,
        runs=runs,
        checkpoints=tuple(checkpoints) if checkpoints is not None else None,
        master_seed=seed,
        label=label,
        arm_names=tuple(names) if names is not None else None,
        ci_method=ci,
    )


def _value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k} = {_value(x)}" for k, x in v.items()) + "}"
    raise TypeError(f"cannot serialise {v!r}")


def dump_config(cfg: ExperimentConfig) -> str:
    """Serialise ``cfg``; ``parse_config(dump_config(cfg)) == cfg``."""
    lines = [
        f"label = {_value(cfg.label)}",
        f"seed = {int(cfg.master_seed)}",
        f"horizon = {cfg.horizon}",
        f"runs = {cfg.runs}",
    ]
    if tuple(cfg.checkpoints) != log_checkpoints(cfg.horizon):
        lines.append(f"checkpoints = {_value(list(cfg.checkpoints))}")
    if cfg.ci_method != "normal":
        lines.append(f"ci = {_value(cfg.ci_method)}")
    lines.append("arms = [")
    lines += [f"    {_value(d.to_record())}," for d in cfg.arms]
    lines.append("]")
    lines.append(f"names = {_value(list(cfg.arm_names))}")
    s = cfg.policy.schedule
    lines += [
        f"policy.variant = {_value(cfg.policy.variant.value)}",
        f"policy.rho = {_value(float(cfg.policy.rho))}",
        f"epsilon.c = {_value(float(s.c))}",
        f"epsilon.p = {_value(float(s.p))}",
        f"epsilon.floor = {_value(float(s.floor))}",
    ]
    return "\n".join(lines) + "\n"


def preset_ids() -> list[str]:
    files = resources.files("riskbench").joinpath("presets").iterdir()
    ids = [f.name[:-5] for f in files if f.name.endswith(".toml")]
    return sorted(ids, key=lambda s: (int(s[3]), s))


def preset_text(preset_id: str) -> str:
    path = resources.files("riskbench").joinpath("presets", f"{preset_id}.toml")
    if not path.is_file():
        raise ConfigError(f"unknown preset {preset_id!r}; available: {', '.join(preset_ids())}")
    return path.read_text()


def load_preset(preset_id: str) -> ExperimentConfig:
    return parse_config(preset_text(preset_id))
