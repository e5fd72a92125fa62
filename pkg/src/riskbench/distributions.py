"""Reward distributions attached to bandit arms.

All families here are sub-Gaussian. ``variance()`` returns the exact variance,
which is what the toolkit uses as the variance proxy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Union

import numpy as np

from .streams import RandomStream


@dataclass(frozen=True)
class PointMass:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("point mass value must be finite")

    def mean(self) -> float:
        return float(self.value)

    def variance(self) -> float:
        return 0.0

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        # consumes no randomness
        return np.full(n, float(self.value))

    def to_record(self) -> dict:
        return {"kind": "point", "value": float(self.value)}


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("uniform bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"uniform requires lo < hi, got lo={self.lo}, hi={self.hi}")

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(n)

    def to_record(self) -> dict:
        return {"kind": "uniform", "lo": float(self.lo), "hi": float(self.hi)}


@dataclass(frozen=True)
class Exponential:
    """Exponential law parameterised by its mean (not its rate), plus a shift."""

    mean_: float
    shift: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mean_) and self.mean_ > 0):
            raise ValueError(f"exponential mean must be > 0, got {self.mean_}")
        if not math.isfinite(self.shift):
            raise ValueError("exponential shift must be finite")

    def mean(self) -> float:
        return self.mean_ + self.shift

    def variance(self) -> float:
        return self.mean_**2

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        return self.shift + rng.exponential(self.mean_, n)

    def to_record(self) -> dict:
        return {"kind": "exp", "mean": float(self.mean_), "shift": float(self.shift)}


@dataclass(frozen=True)
class Normal:
    mean_: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.mean_):
            raise ValueError("normal mean must be finite")
        if not (math.isfinite(self.sd) and self.sd >= 0):
            raise ValueError(f"normal sd must be >= 0, got {self.sd}")

    def mean(self) -> float:
        return self.mean_

    def variance(self) -> float:
        return self.sd**2

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        return self.mean_ + self.sd * rng.standard_normal(n)

    def to_record(self) -> dict:
        return {"kind": "normal", "mean": float(self.mean_), "sd": float(self.sd)}


@dataclass(frozen=True)
class Rademacher:
    def mean(self) -> float:
        return 0.0

    def variance(self) -> float:
        return 1.0

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)

    def to_record(self) -> dict:
        return {"kind": "rademacher"}


@dataclass(frozen=True)
class Sum:
    """Sum of independent components, e.g. an exponential plus Gaussian noise."""

    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("sum needs at least one component")

    def mean(self) -> float:
        return sum(p.mean() for p in self.parts)

    def variance(self) -> float:
        return sum(p.variance() for p in self.parts)

    def sample_n(self, rng: RandomStream, n: int) -> np.ndarray:
        out = np.zeros(n)
        for p in self.parts:
            out += p.sample_n(rng, n)
        return out

    def to_record(self) -> dict:
        return {"kind": "sum", "parts": [p.to_record() for p in self.parts]}


RewardDistribution = Union[PointMass, Uniform, Exponential, Normal, Rademacher, Sum]


def sample(d: RewardDistribution, rng: RandomStream) -> float:
    """Draw a single reward from ``d``."""
    return float(d.sample_n(rng, 1)[0])


def mean(d: RewardDistribution) -> float:
    return d.mean()


def variance(d: RewardDistribution) -> float:
    return d.variance()


_FIELDS = {
    "point": ({"value"}, set()),
    "uniform": ({"lo", "hi"}, set()),
    "exp": ({"mean"}, {"shift"}),
    "normal": ({"sd"}, {"mean"}),
    "rademacher": (set(), set()),
    "sum": ({"parts"}, set()),
}


def _number(rec: Mapping[str, Any], key: str) -> float:
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"field {key!r} must be a number, got {v!r}")
    return float(v)


def from_record(rec: Mapping[str, Any]) -> RewardDistribution:
    """Build a distribution from a tagged record such as ``{kind="uniform", lo=-1, hi=1}``.

    Raises ``ValueError`` with a readable message on unknown kinds, missing or
    unexpected fields and invariant violations.
    """
    if not isinstance(rec, Mapping):
        raise ValueError(f"distribution must be a tagged record, got {rec!r}")
    kind = rec.get("kind")
    if kind not in _FIELDS:
        raise ValueError(f"unknown distribution kind {kind!r}; expected one of {sorted(_FIELDS)}")
    required, optional = _FIELDS[kind]
    fields = set(rec) - {"kind"}
    missing = required - fields
    if missing:
        raise ValueError(f"{kind}: missing field(s) {sorted(missing)}")
    extra = fields - required - optional
    if extra:
        raise ValueError(f"{kind}: unknown field(s) {sorted(extra)}")

    if kind == "point":
        return PointMass(_number(rec, "value"))
    if kind == "uniform":
        return Uniform(_number(rec, "lo"), _number(rec, "hi"))
    if kind == "exp":
        shift = _number(rec, "shift") if "shift" in rec else 0.0
        return Exponential(_number(rec, "mean"), shift)
    if kind == "normal":
        mu = _number(rec, "mean") if "mean" in rec else 0.0
        return Normal(mu, _number(rec, "sd"))
    if kind == "rademacher":
        return Rademacher()
    parts = rec["parts"]
    if not isinstance(parts, list):
        raise ValueError("sum: 'parts' must be a list of records")
    return Sum(tuple(from_record(p) for p in parts))


def describe(d: RewardDistribution) -> str:
    """Short human-readable name, used in plot legends."""
    if isinstance(d, PointMass):
        return f"1{{{d.value:g}}}"
    if isinstance(d, Uniform):
        return f"U[{d.lo:g}, {d.hi:g}]"
    if isinstance(d, Exponential):
        s = f"Exp(mean {d.mean_:g})"
        return s if d.shift == 0 else f"{s} + {d.shift:g}"
    if isinstance(d, Normal):
        return f"N({d.mean_:g}, {d.sd:g}^2)"
    if isinstance(d, Rademacher):
        return "Rademacher"
    return " + ".join(describe(p) for p in d.parts)
