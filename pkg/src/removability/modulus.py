"""Moduli of curve and sphere families on rings, ring capacity, and checks.

Closed forms for the spherical ring ``A(r1, r2)`` in R^n:

* joining curves: ``M = omega_{n-1} log(r2/r1)^(1-n)``
* ring condenser: ``cap = M`` (capacity equals the modulus of joining curves)
* separating concentric spheres with ``(n-1)``-surface admissibility:
  ``M_sphere = omega_{n-1}^(-1/(n-1)) log(r2/r1) = cap^(-1/(n-1))``

A discrete radial minimisation serves as an independent oracle for the
curve modulus, and a finite-difference Dirichlet solver gives planar
condenser capacities.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize, sparse, special
from scipy.sparse.linalg import spsolve

from .errors import DomainError, UnsupportedVariantError
from .geometry import check_dimension, integrate_log_radius, unit_sphere_area
from .maps import Radial

IDENTITY_TOL = 1e-12
LOWER_Q_TOL = 1e-8


def _check_ring(r1, r2, n) -> int:
    n = check_dimension(n)
    if not (r1 > 0) or not math.isfinite(r1):
        raise DomainError(f"inner radius must be positive, got {r1}")
    if not math.isfinite(r2):
        raise DomainError("outer radius must be finite")
    if r2 == r1:
        raise DomainError("r1 = r2: the joining family has infinite modulus")
    if r2 < r1:
        raise DomainError(f"need r1 < r2, got r1={r1}, r2={r2}")
    return n


def ring_curve_modulus(r1: float, r2: float, n: int) -> float:
    """Modulus of the curves joining the boundary spheres of ``A(r1, r2)``."""
    n = _check_ring(r1, r2, n)
    return unit_sphere_area(n) * math.log(r2 / r1) ** (1 - n)


def ring_capacity(r1: float, r2: float, n: int) -> float:
    """Capacity of the ring condenser ``(B(r2), closed B(r1))``.

    The extremal potential is ``log(r2/|x|)/log(r2/r1)``; its gradient has
    size ``1/(|x| L)``, ``L = log(r2/r1)``, so the ``n``-energy is
    ``omega L^-n int dr/r = omega L^(1-n)``, evaluated in the same floating
    point order as the curve modulus so the two agree bit for bit.
    """
    n = _check_ring(r1, r2, n)
    return unit_sphere_area(n) * math.log(r2 / r1) ** (1 - n)


def sphere_family_modulus(a: float, b: float, n: int) -> float:
    """Modulus of the spheres ``S(0, t)``, ``a < t < b``, with exponent ``n-1`` admissibility.

    Returns 0 for the empty family ``a == b``.
    """
    n = check_dimension(n)
    if not (a > 0):
        raise DomainError(f"radii must be positive, got a={a}")
    if b == a:
        return 0.0
    if b < a:
        raise DomainError(f"need a <= b, got a={a}, b={b}")
    return unit_sphere_area(n) ** (-1.0 / (n - 1)) * math.log(b / a)


@dataclass(frozen=True)
class RingQuantities:
    r1: float
    r2: float
    n: int
    curve_modulus: float
    capacity: float
    surface_modulus: float

    def to_dict(self):
        return {**asdict(self), "method": "Symbolic"}


def ring_quantities(r1: float, r2: float, n: int) -> RingQuantities:
    return RingQuantities(
        float(r1), float(r2), int(n),
        ring_curve_modulus(r1, r2, n), ring_capacity(r1, r2, n), sphere_family_modulus(r1, r2, n),
    )


@dataclass(frozen=True)
class DualityReport:
    rings: RingQuantities
    capacity_vs_curve: float
    surface_vs_capacity: float
    passed: bool

    def to_dict(self):
        return {
            "rings": self.rings.to_dict(),
            "capacity_vs_curve": self.capacity_vs_curve,
            "surface_vs_capacity": self.surface_vs_capacity,
            "passed": self.passed,
        }


def duality_report(r1: float, r2: float, n: int, tol: float = IDENTITY_TOL) -> DualityReport:
    """Relative residuals of ``cap = M(curves)`` and ``M(spheres) = cap^(-1/(n-1))``."""
    q = ring_quantities(r1, r2, n)
    d1 = abs(q.capacity - q.curve_modulus) / q.curve_modulus
    target = q.capacity ** (-1.0 / (q.n - 1))
    d2 = abs(q.surface_modulus - target) / target
    return DualityReport(q, d1, d2, bool(d1 <= tol and d2 <= tol))


# ---------------------------------------------------------------------------
# radial maps


def _log_profile(profile, r: float) -> float:
    if hasattr(profile, "log_value"):
        return float(profile.log_value(r))
    return math.log(float(profile(r)))


def image_sphere_family_modulus(spec, eps: float, r0: float, n: Optional[int] = None) -> float:
    """Modulus of ``f(S(0, r))``, ``eps < r < r0``, for a radial map.

    Radial maps send ``S(0, r)`` onto ``S(0, rho(r))``, so this is the sphere
    family modulus between ``rho(eps)`` and ``rho(r0)``.  Log-profiles are
    used directly so tiny image radii keep full relative accuracy.
    """
    if not isinstance(spec, Radial):
        raise UnsupportedVariantError("image sphere modulus is implemented for radial maps")
    n = spec.n if n is None else check_dimension(n)
    if not (0 < eps < r0 <= 1):
        raise DomainError(f"need 0 < eps < r0 <= 1, got eps={eps}, r0={r0}")
    log_ratio = _log_profile(spec.profile, r0) - _log_profile(spec.profile, eps)
    return unit_sphere_area(n) ** (-1.0 / (n - 1)) * log_ratio


@dataclass(frozen=True)
class LowerQCheck:
    """Image modulus ``lhs`` against the weighted bound ``rhs``."""

    map: str
    Q: str
    eps: float
    r0: float
    lhs: float
    rhs: float
    holds: bool
    gap: float

    def to_dict(self):
        return {**asdict(self), "method": "Quadrature"}


def lower_Q_check_radial(spec, Q, eps: float, r0: float, n: Optional[int] = None,
                         tol: float = LOWER_Q_TOL) -> LowerQCheck:
    """Compare ``M(f(Sigma))`` with ``int_eps^r0 dr / ||Q||_{n-1}(r)``.

    For radial ``Q`` the sphere norm is ``Q(r) (omega r^(n-1))^(1/(n-1))``,
    so ``rhs = omega^(-1/(n-1)) int dr / (r Q(r))``, integrated in
    ``u = log(1/r)``.
    """
    if not isinstance(spec, Radial):
        raise UnsupportedVariantError("lower Q check is implemented for radial maps")
    if not getattr(Q, "is_radial", False):
        raise UnsupportedVariantError("lower Q check needs a radial Q")
    n = spec.n if n is None else check_dimension(n)
    lhs = image_sphere_family_modulus(spec, eps, r0, n)
    integral = integrate_log_radius(lambda u: math.exp(-Q.log_value_at(u)), math.log(1 / r0), math.log(1 / eps))
    rhs = unit_sphere_area(n) ** (-1.0 / (n - 1)) * integral
    gap = lhs - rhs
    return LowerQCheck(repr(spec.profile), repr(Q), eps, r0, lhs, rhs, bool(gap >= -tol), gap)


# ---------------------------------------------------------------------------
# discrete oracles


MIN_GRID = 64


def _cells(r1, r2, grid_size):
    edges = np.linspace(r1, r2, grid_size + 1)
    return 0.5 * (edges[1:] + edges[:-1]), np.diff(edges)


def variational_radial_modulus_oracle(r1: float, r2: float, n: int, grid_size: int = 10_000,
                                      method: str = "lagrange") -> float:
    """Minimise the discretised ``int rho^n dm`` over radial metrics.

    Cells ``i`` of width ``d_i`` at midpoints ``t_i``; the energy is
    ``sum omega t_i^(n-1) d_i rho_i^n`` under ``sum d_i rho_i >= 1``.
    ``method="lagrange"`` solves the stationarity condition on the grid;
    ``method="slsqp"`` runs a generic constrained minimiser (small grids).
    """
    n = _check_ring(r1, r2, n)
    if grid_size < MIN_GRID:
        raise DomainError(f"grid_size must be >= {MIN_GRID}, got {grid_size}")
    t, d = _cells(r1, r2, grid_size)
    omega = unit_sphere_area(n)
    w = omega * t ** (n - 1) * d
    if method == "lagrange":
        # n w_i rho_i^(n-1) = lam d_i  =>  rho_i proportional to 1/t_i
        rho = 1.0 / t
        rho /= np.sum(d * rho)
        return float(np.sum(w * rho**n))
    if method == "slsqp":
        x0 = np.full(grid_size, 1.0 / (r2 - r1))
        scale = float(np.sum(w * x0**n))
        res = optimize.minimize(
            lambda x: np.sum(w * x**n) / scale,
            x0,
            jac=lambda x: n * w * x ** (n - 1) / scale,
            bounds=[(0, None)] * grid_size,
            constraints=[{"type": "ineq", "fun": lambda x: np.sum(d * x) - 1.0, "jac": lambda x: d}],
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 500},
        )
        if not res.success:
            raise DomainError(f"minimiser failed: {res.message}")
        return float(res.fun * scale)
    raise ValueError(f"unknown method {method!r}")


def union_ring_modulus(rings: Sequence[tuple], n: int, grid_size: int = 256) -> float:
    """Modulus of the union of the joining families of concentric rings.

    Radial metrics on a common grid with one admissibility constraint per
    ring; solved with SLSQP.  For disjoint rings the minimum splits into
    the sum of the single-ring moduli.
    """
    n = check_dimension(n)
    if not rings:
        return 0.0
    for a, b in rings:
        _check_ring(a, b, n)
    lo = min(a for a, _ in rings)
    hi = max(b for _, b in rings)
    cuts = np.unique(np.concatenate([np.linspace(lo, hi, grid_size + 1), np.ravel(rings)]))
    t = 0.5 * (cuts[1:] + cuts[:-1])
    d = np.diff(cuts)
    w = unit_sphere_area(n) * t ** (n - 1) * d
    masks = [((t > a) & (t < b)).astype(float) * d for a, b in rings]
    x0 = np.zeros_like(t)
    for (a, b), m in zip(rings, masks):
        x0 = np.maximum(x0, np.where(m > 0, 1.0 / (t * math.log(b / a)), 0.0))
    scale = float(np.sum(w * x0**n))
    res = optimize.minimize(
        lambda x: np.sum(w * x**n) / scale,
        x0,
        jac=lambda x: n * w * np.abs(x) ** (n - 1) / scale,
        bounds=[(0, None)] * t.size,
        constraints=[{"type": "ineq", "fun": (lambda x, m=m: np.dot(m, x) - 1.0), "jac": (lambda x, m=m: m)}
                     for m in masks],
        method="SLSQP",
        options={"ftol": 1e-13, "maxiter": 1000},
    )
    if not res.success:
        raise DomainError(f"minimiser failed: {res.message}")
    return float(res.fun * scale)


def grotzsch_capacity(a: float) -> float:
    """Capacity of the planar condenser ``(unit disk, [0, a])``, ``0 < a < 1``.

    Uses the Grotzsch ring modulus ``mu(a) = (pi/2) K(sqrt(1-a^2)) / K(a)``
    (complete elliptic integrals, modulus convention).
    """
    if not (0 < a < 1):
        raise DomainError(f"need 0 < a < 1, got {a}")
    mu = 0.5 * math.pi * special.ellipk(1 - a * a) / special.ellipk(a * a)
    return 2 * math.pi / mu


def planar_condenser_capacity(plate: str, size: float, h: float = 1 / 100) -> float:
    """Capacity of ``(unit disk, C)`` from the five-point Dirichlet energy.

    ``plate="segment"``: ``C = [0, size] x {0}``; ``plate="disk"``:
    ``C = closed disk of radius size``.  Nodes outside the open unit disk
    are held at 0, nodes on ``C`` at 1.  First-order accurate in ``h``.
    """
    if not (0 < size < 1):
        raise DomainError(f"plate size must lie in (0, 1), got {size}")
    m = int(round(1.0 / h))
    xs = np.arange(-m, m + 1) * h
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    R = np.hypot(X, Y)
    outside = R >= 1.0
    if plate == "segment":
        on_plate = (np.abs(Y) < 0.5 * h) & (X >= -0.5 * h) & (X <= size + 0.5 * h)
    elif plate == "disk":
        on_plate = R <= size
    else:
        raise ValueError(f"unknown plate {plate!r}")
    fixed = outside | on_plate
    values = np.where(on_plate, 1.0, 0.0)
    N = xs.size
    idx = np.arange(N * N).reshape(N, N)
    # edges between horizontal and vertical neighbours
    pairs = np.concatenate([
        np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1),
        np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1),
    ])
    ones = np.ones(len(pairs))
    A = sparse.coo_matrix((ones, (pairs[:, 0], pairs[:, 1])), shape=(N * N, N * N))
    A = (A + A.T).tocsr()
    L = (sparse.diags(np.asarray(A.sum(axis=1)).ravel()) - A).tocsr()
    free = ~fixed.ravel()
    u = values.ravel().copy()
    rhs = -L[free][:, ~free] @ u[~free]
    u[free] = spsolve(L[free][:, free].tocsc(), rhs)
    diff = u[pairs[:, 0]] - u[pairs[:, 1]]
    return float(np.sum(diff**2))
