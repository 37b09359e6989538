"""Concrete mappings of the punctured unit ball and their radial profiles.

A radial map is ``f(x) = (x / |x|) * rho(|x|)``.  Three profiles are
provided: ``PowerShift`` (``rho = 1 + r**alpha``), ``ExpIntegral`` (``rho``
is the exponential of minus the criterion integral of a majorant ``q``) and
``TabulatedProfile`` (monotone cubic interpolation of data).  Non-radial
examples are the twist about an axis, ``z**k`` and an affine shear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, ResolutionError, UnsupportedVariantError
from .geometry import as_point, check_dimension, integrate_log_radius

# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class LimitEstimate:
    """Numerical value of ``rho(0+)`` with an error estimate and its provenance."""

    value: float
    error: float
    method: str
    trace: tuple = ()


@dataclass(frozen=True)
class PowerShift:
    """``rho(r) = 1 + r**alpha`` with ``0 < alpha < 1``."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"PowerShift needs alpha in (0, 1), got {self.alpha}")

    def __call__(self, r):
        return 1.0 + np.asarray(r, dtype=float) ** self.alpha

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.alpha * r ** (self.alpha - 1.0)

    def log_value(self, r):
        return np.log1p(np.asarray(r, dtype=float) ** self.alpha)


@dataclass(frozen=True, eq=False)
class ExpIntegral:
    """``rho(r) = exp(-int_r^1 dt / (t q(t)^(1/(n-1))))`` for a radial majorant ``q``.

    ``q`` is any radial field exposing ``log_value_at(u)`` (log of the field
    at radius ``exp(-u)``), e.g. :class:`removability.fields.PowerLog`.
    Integration runs in ``u = log(1/t)`` so the ``1/t`` singularity and
    radii below the float range are never formed explicitly.
    """

    q: object
    n: int

    def __post_init__(self):
        check_dimension(self.n)
        if not getattr(self.q, "is_radial", False):
            raise UnsupportedVariantError("ExpIntegral needs a radial majorant q")

    def integrand(self, u: float) -> float:
        return math.exp(-float(self.q.log_value_at(u)) / (self.n - 1))

    def exponent_integral_u(self, u_lo: float, u_hi: float) -> float:
        """``int_{u_lo}^{u_hi} q(e^-v)^(-1/(n-1)) dv``."""
        return integrate_log_radius(self.integrand, u_lo, u_hi)

    def _exponent_integral(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0) or np.any(r > 1):
            raise DomainError("ExpIntegral profile is defined on (0, 1]")
        u = -np.log(r.ravel())
        order = np.argsort(u, kind="stable")
        us = u[order]
        knots = np.concatenate([[0.0], us])
        pieces = np.array([self.exponent_integral_u(a, b) for a, b in zip(knots[:-1], knots[1:])])
        out = np.empty_like(us)
        out[order] = np.cumsum(pieces)
        return out.reshape(r.shape)

    def log_value(self, r):
        return -self._exponent_integral(r)

    def __call__(self, r):
        return np.exp(self.log_value(r))

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        log_q = np.vectorize(lambda t: float(self.q.log_value_at(-math.log(t))))(r)
        return self(r) / (r * np.exp(log_q / (self.n - 1)))


@dataclass(frozen=True, eq=False)
class TabulatedProfile:
    """Monotone piecewise-cubic interpolation of ``(knot, value)`` data."""

    knots: tuple
    values: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 2:
            raise DomainError("tabulated profile needs matching 1-d knots/values, at least 2")
        if np.any(np.diff(k) <= 0) or k[0] <= 0 or k[-1] > 1:
            raise DomainError("knots must be strictly increasing radii in (0, 1]")
        if np.any(v <= 0):
            raise DomainError("tabulated profile values must be positive")
        if np.any(np.diff(v) < 0):
            raise DomainError("tabulated profile values must be monotone nondecreasing")
        object.__setattr__(self, "knots", tuple(k))
        object.__setattr__(self, "values", tuple(v))
        object.__setattr__(self, "_interp", PchipInterpolator(k, v, extrapolate=False))

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.knots[0]) or np.any(r > self.knots[-1]):
            raise DomainError(
                f"tabulated profile has data only on [{self.knots[0]}, {self.knots[-1]}]"
            )
        return r

    def __call__(self, r):
        return self._interp(self._check(r))

    def derivative(self, r):
        return self._interp.derivative()(self._check(r))

    def log_value(self, r):
        return np.log(self(r))


Profile = Union[PowerShift, ExpIntegral, TabulatedProfile]


def _aitken(seq) -> tuple[float, float]:
    """Aitken delta-squared extrapolation of the last three terms."""
    a, b, c = seq[-3:]
    denom = (c - b) - (b - a)
    if denom == 0 or not np.isfinite(denom):
        return float(c), abs(float(c - b))
    acc = c - (c - b) ** 2 / denom
    # the extrapolated value must lie beyond the last term in the direction of travel
    if (c - b) * (acc - c) < 0 or not np.isfinite(acc):
        acc = c
    return float(acc), abs(float(acc - c)) + 1e-3 * abs(float(c - b))


ZERO_THRESHOLD = 1e-9
_MAX_DOUBLINGS = 64


def profile_limit_at_zero(p: Profile, tolerance: float = ZERO_THRESHOLD) -> LimitEstimate:
    """Estimate ``L = lim_{r -> 0+} rho(r)``.

    ``PowerShift`` is sampled on dyadic radii and Aitken-extrapolated.
    ``ExpIntegral`` walks the doubly-dyadic radii ``r_k = 2**-(2**k)`` in
    log-radius coordinates; ``L = 0`` is declared when ``rho(r_k)`` falls
    below ``tolerance`` on three successive radii and the divergence
    classifier of the majorant agrees.  ``TabulatedProfile`` needs data below
    ``1e-3``.
    """
    if isinstance(p, PowerShift):
        ks = np.arange(1, 61)
        seq = p(2.0 ** -ks)
        val, err = _aitken(seq)
        return LimitEstimate(val, err, "dyadic-aitken", tuple(zip((2.0 ** -ks[-3:]).tolist(), seq[-3:].tolist())))
    if isinstance(p, TabulatedProfile):
        if p.knots[0] > 1e-3:
            raise ResolutionError("tabulated profile has no data below 1e-3")
        vals = np.asarray(p.values)
        knots = np.asarray(p.knots)
        if vals.size >= 3:
            val, err = _aitken(vals[:3][::-1])
            val = min(max(val, 0.0), float(vals[0]))
        else:
            val, err = float(vals[0]), float(vals[1] - vals[0])
        return LimitEstimate(val, err, "tabulated-aitken", tuple(zip(knots[:3].tolist(), vals[:3].tolist())))
    if isinstance(p, ExpIntegral):
        return _exp_integral_limit(p, tolerance)
    raise UnsupportedVariantError(f"unsupported profile {type(p).__name__}")


def _exp_integral_limit(p: ExpIntegral, tolerance: float) -> LimitEstimate:
    from .criterion import classify_divergence

    verdict = classify_divergence(p.q, p.n).verdict
    log_tol = math.log(tolerance)
    u_grid = [math.log(2.0) * 2.0**k for k in range(_MAX_DOUBLINGS)]
    total = p.exponent_integral_u(0.0, u_grid[0])
    integrals = [total]
    incs = [total]
    below = 0
    trace = [(u_grid[0], -total)]
    for lo, hi in zip(u_grid[:-1], u_grid[1:]):
        inc = p.exponent_integral_u(lo, hi)
        total += inc
        integrals.append(total)
        incs.append(inc)
        trace.append((hi, -total))
        below = below + 1 if -total < log_tol else 0
        if below >= 3 and verdict == "Diverges":
            return LimitEstimate(0.0, math.exp(-total), "doubly-dyadic+classifier", tuple(trace))
        if not math.isfinite(total):
            break
        if verdict != "Diverges" and inc <= 1e-16 * max(total, 1.0):
            break
    if verdict == "Diverges":
        # classifier is authoritative; the numeric trace never went below tolerance
        return LimitEstimate(0.0, math.exp(-total), "classifier", tuple(trace))
    ratios = [b / a for a, b in zip(incs[-4:-1], incs[-3:]) if a > 0]
    tail = 0.0
    if ratios and all(0 <= q < 1 for q in ratios):
        q = ratios[-1]
        tail = incs[-1] * q / (1 - q)
    limit_exp = total + tail
    val = math.exp(-limit_exp)
    err = val * (abs(tail) + 1e-12 * limit_exp)
    return LimitEstimate(val, err, "doubly-dyadic-tail", tuple(trace))


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class Radial:
    """``f(x) = (x / |x|) rho(|x|)`` on the punctured unit ball in R^n."""

    profile: Profile
    n: int
    bounded: bool = True
    open_discrete_closed: bool = True

    def __post_init__(self):
        check_dimension(self.n)

    @property
    def dim(self) -> int:
        return self.n

    @property
    def multiplicity(self) -> int:
        return 1


@dataclass(frozen=True)
class Twist:
    """``(r cos m phi, r sin m phi, x3, ..., xn)`` in cylindrical coordinates."""

    m: int
    n: int = 3
    bounded: bool = True
    open_discrete_closed: bool = True

    def __post_init__(self):
        check_dimension(self.n, minimum=3)
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"twist order must be a positive integer, got {self.m}")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def multiplicity(self) -> int:
        return int(self.m)


@dataclass(frozen=True)
class PlanarPower:
    """``f(z) = z**k`` on the punctured unit disk."""

    k: int
    bounded: bool = True
    open_discrete_closed: bool = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"power must be a positive integer, got {self.k}")

    @property
    def dim(self) -> int:
        return 2

    @property
    def multiplicity(self) -> int:
        return int(self.k)


@dataclass(frozen=True)
class PlanarShear:
    """``f(z) = z + kappa * conj(z)``, ``0 <= kappa < 1`` (test fixture)."""

    kappa: float
    bounded: bool = True
    open_discrete_closed: bool = True

    def __post_init__(self):
        if not (0.0 <= self.kappa < 1.0):
            raise DomainError(f"shear needs kappa in [0, 1), got {self.kappa}")

    @property
    def dim(self) -> int:
        return 2

    @property
    def multiplicity(self) -> int:
        return 1


MapSpec = Union[Radial, Twist, PlanarPower, PlanarShear]


def check_domain_point(spec: MapSpec, x) -> np.ndarray:
    x = as_point(x, spec.dim)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise DomainError("the map is undefined at the puncture x = 0")
    if r >= 1.0:
        raise DomainError(f"point |x| = {r} lies outside the unit ball")
    return x


def eval_points(spec: MapSpec, X: np.ndarray) -> np.ndarray:
    """Vectorised evaluation on an ``(N, n)`` array without domain checks."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(spec, Radial):
        r = np.linalg.norm(X, axis=1)
        return X * (spec.profile(r) / r)[:, None]
    if isinstance(spec, Twist):
        z = X[:, 0] + 1j * X[:, 1]
        rad = np.abs(z)
        w = rad * np.exp(1j * spec.m * np.angle(z))
        out = X.copy()
        out[:, 0], out[:, 1] = w.real, w.imag
        return out
    if isinstance(spec, PlanarPower):
        w = (X[:, 0] + 1j * X[:, 1]) ** spec.k
        return np.column_stack([w.real, w.imag])
    if isinstance(spec, PlanarShear):
        kap = spec.kappa
        return np.column_stack([(1 + kap) * X[:, 0], (1 - kap) * X[:, 1]])
    raise UnsupportedVariantError(f"unsupported map {type(spec).__name__}")


def eval_map(spec: MapSpec, x) -> np.ndarray:
    """Evaluate ``f(x)`` for ``0 < |x| < 1``."""
    x = check_domain_point(spec, x)
    return eval_points(spec, x[None, :])[0]


# ---------------------------------------------------------------------------
# limit sets


@dataclass(frozen=True, eq=False)
class SinglePoint:
    point: np.ndarray


@dataclass(frozen=True, eq=False)
class SphereSet:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not (self.radius > 0):
            raise DomainError("limit sphere radius must be positive")


LimitSetDescription = Union[SinglePoint, SphereSet]


def _require_radial(spec) -> Radial:
    if not isinstance(spec, Radial):
        raise UnsupportedVariantError(f"only radial maps are supported, got {type(spec).__name__}")
    return spec


def limit_set_at_zero(spec: MapSpec) -> LimitSetDescription:
    """Cluster set of a radial map at the puncture."""
    spec = _require_radial(spec)
    est = profile_limit_at_zero(spec.profile)
    origin = np.zeros(spec.n)
    if est.value == 0.0:
        return SinglePoint(origin)
    return SphereSet(origin, est.value)


def limit_set_at_boundary(spec: MapSpec) -> LimitSetDescription:
    """Cluster set on the unit sphere: ``S(0, rho(1-))`` for a radial map."""
    spec = _require_radial(spec)
    p = spec.profile
    top = p.knots[-1] if isinstance(p, TabulatedProfile) else 1.0
    return SphereSet(np.zeros(spec.n), float(p(top)))


def describe_limit_set(ls: LimitSetDescription) -> str:
    if isinstance(ls, SinglePoint):
        return "point(" + ", ".join("%g" % v for v in ls.point) + ")"
    return "sphere(center=0, radius=%.17g)" % ls.radius


def extendable_ground_truth(spec: MapSpec) -> bool:
    """A radial map extends continuously to 0 iff its cluster set there is a point."""
    return isinstance(limit_set_at_zero(spec), SinglePoint)
