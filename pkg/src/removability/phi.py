"""Orlicz gauges ``phi : [0, inf) -> [0, inf)`` (nondecreasing)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Power:
    """``phi(t) = t**p``."""

    p: float

    def __post_init__(self):
        if not (self.p >= 0) or not np.isfinite(self.p):
            raise DomainError(f"power gauge needs p >= 0, got {self.p}")

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.p


@dataclass(frozen=True)
class PowerLogPhi:
    """``phi(t) = t**p * log(e + t)**s``."""

    p: float
    s: float

    def __post_init__(self):
        if not (self.p > 0):
            raise DomainError(f"power-log gauge needs p > 0, got {self.p}")
        if self.s < 0:
            # with s < 0 the gauge can decrease for small p
            raise DomainError("power-log gauge needs s >= 0 to stay nondecreasing")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return t**self.p * np.log(np.e + t) ** self.s


@dataclass(frozen=True, eq=False)
class TabulatedPhi:
    """Monotone data ``(t_i, phi_i)``, interpolated linearly in log-log scale."""

    knots: tuple
    values: tuple
    _logk: np.ndarray = field(init=False, repr=False)
    _logv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 2:
            raise DomainError("tabulated gauge needs matching 1-d knots/values")
        if np.any(np.diff(k) <= 0) or k[0] <= 0:
            raise DomainError("gauge knots must be positive and strictly increasing")
        if np.any(v <= 0) or np.any(np.diff(v) < 0):
            raise DomainError("gauge values must be positive and nondecreasing")
        object.__setattr__(self, "knots", tuple(k))
        object.__setattr__(self, "values", tuple(v))
        object.__setattr__(self, "_logk", np.log(k))
        object.__setattr__(self, "_logv", np.log(v))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(np.interp(np.log(np.maximum(t, self.knots[0])), self._logk, self._logv))
        out = np.where(t <= 0, 0.0, out)
        if np.any(t > self.knots[-1]):
            raise DomainError("tabulated gauge evaluated beyond its last knot")
        return out


PhiSpec = Union[Power, PowerLogPhi, TabulatedPhi]
