"""Exploration-rate schedules ``eps_t = max(floor, min(1, c * t**-p))``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Schedule:
    c: float = 1.0
    p: float = 1.0
    floor: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"coefficient must be > 0, got {self.c}")
        if not (math.isfinite(self.p) and self.p >= 0):
            raise ValueError(f"exponent must be >= 0, got {self.p}")
        if not (0 <= self.floor <= 1):
            raise ValueError(f"floor must lie in [0, 1], got {self.floor}")

    @classmethod
    def constant(cls, eps: float) -> "Schedule":
        """Fixed exploration rate ``eps`` in (0, 1]."""
        if not 0 < eps <= 1:
            raise ValueError(f"fixed epsilon must lie in (0, 1], got {eps}")
        return cls(c=eps, p=0.0)

    @classmethod
    def from_kappa(cls, kappa: float) -> "Schedule":
        """Schedule ``t**-(1/2 - kappa)`` used for the reweighted variant."""
        if not 0 < kappa < 0.5:
            raise ValueError("kappa must lie in (0, 1/2)")
        return cls(c=1.0, p=0.5 - kappa)

    def epsilon(self, t: int) -> float:
        if t < 1:
            raise ValueError("t is 1-indexed")
        return max(self.floor, min(1.0, self.c * float(t) ** (-self.p)))

    def epsilons(self, t) -> np.ndarray:
        """Vectorised ``epsilon`` over an array of times."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 1):
            raise ValueError("t is 1-indexed")
        return np.maximum(self.floor, np.minimum(1.0, self.c * t ** (-self.p)))


def epsilon(s: Schedule, t: int) -> float:
    return s.epsilon(t)
