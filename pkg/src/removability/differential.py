"""Pointwise differential data of the model maps.

Jacobians (closed form or central differences), singular values by
one-sided Jacobi rotations, inner dilatation ``K_I = prod(lambda) / lambda_1**n``,
the planar complex dilatation ``mu = f_zbar / f_z`` and Orlicz energies
``int phi(|grad f|) dm`` over rings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedVariantError
from .geometry import DEFAULT_ORDER, AnnulusSpec, annulus_rule
from .maps import (
    MapSpec,
    PlanarPower,
    PlanarShear,
    Radial,
    Twist,
    check_domain_point,
    eval_points,
)

ZERO_MATRIX_TOL = 1e-13
_JACOBI_TOL = 1e-15
_MAX_SWEEPS = 60


# ---------------------------------------------------------------------------
# singular values


def singular_values_batch(A: np.ndarray) -> np.ndarray:
    """Ascending singular values of a stack of square matrices ``(N, n, n)``.

    One-sided (Hestenes) Jacobi: plane rotations orthogonalise the columns,
    the singular values are then the column norms.  All matrices of the
    stack are rotated together, so the result does not depend on how a
    point set is split into batches.
    """
    A = np.array(A, dtype=float, copy=True)
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise DomainError(f"expected a stack of square matrices, got shape {A.shape}")
    n = A.shape[2]
    # work on max-normalised matrices so squared column norms cannot overflow
    big = np.max(np.abs(A), axis=(1, 2))
    big = np.where(big > 0, big, 1.0)
    A /= big[:, None, None]
    for _ in range(_MAX_SWEEPS):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                ai = A[:, :, i]
                aj = A[:, :, j]
                alpha = np.einsum("ki,ki->k", ai, ai)
                beta = np.einsum("ki,ki->k", aj, aj)
                gamma = np.einsum("ki,ki->k", ai, aj)
                scale = np.sqrt(alpha) * np.sqrt(beta)
                active = (np.abs(gamma) > _JACOBI_TOL * scale) & (scale > 0)
                if not np.any(active):
                    continue
                off = max(off, float(np.max(np.abs(gamma[active]) / scale[active])))
                g = np.where(active, gamma, 1.0)
                with np.errstate(over="ignore"):
                    # an infinite zeta gives t = 0: the columns are already orthogonal to working precision
                    zeta = (beta - alpha) / (2.0 * g)
                t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
                t = np.where(zeta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c[:, None] * ai - s[:, None] * aj
                new_j = s[:, None] * ai + c[:, None] * aj
                A[:, :, i] = new_i
                A[:, :, j] = new_j
        if off <= _JACOBI_TOL:
            break
    return np.sort(np.linalg.norm(A, axis=1), axis=1) * big[:, None]


def singular_values(matrix) -> np.ndarray:
    """Ascending singular values of one square matrix (n <= 8)."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"singular values need a square matrix, got shape {M.shape}")
    if M.shape[0] > 8:
        raise DomainError("singular_values is meant for small matrices (n <= 8)")
    return singular_values_batch(M[None])[0]


# ---------------------------------------------------------------------------
# Jacobians


def _radial_jacobians(spec: Radial, X: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(X, axis=1)
    u = X / r[:, None]
    rho = spec.profile(r)
    drho = spec.profile.derivative(r)
    uu = u[:, :, None] * u[:, None, :]
    eye = np.eye(X.shape[1])[None]
    return drho[:, None, None] * uu + (rho / r)[:, None, None] * (eye - uu)


def _twist_jacobians(spec: Twist, X: np.ndarray) -> np.ndarray:
    R = np.hypot(X[:, 0], X[:, 1])
    if spec.m > 1 and np.any(R == 0):
        raise DomainError("the twist map is not differentiable on its axis")
    phi = np.arctan2(X[:, 1], X[:, 0])
    m = spec.m
    cp, sp = np.cos(phi), np.sin(phi)
    cm, sm = np.cos(m * phi), np.sin(m * phi)
    J = np.broadcast_to(np.eye(X.shape[1]), (X.shape[0], X.shape[1], X.shape[1])).copy()
    J[:, 0, 0] = cm * cp + m * sm * sp
    J[:, 0, 1] = cm * sp - m * sm * cp
    J[:, 1, 0] = sm * cp - m * cm * sp
    J[:, 1, 1] = sm * sp + m * cm * cp
    return J


def analytic_jacobians(spec: MapSpec, X) -> np.ndarray:
    """Closed-form Jacobians at the rows of ``X`` (no domain checks)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(spec, Radial):
        return _radial_jacobians(spec, X)
    if isinstance(spec, Twist):
        return _twist_jacobians(spec, X)
    if isinstance(spec, PlanarPower):
        d = spec.k * (X[:, 0] + 1j * X[:, 1]) ** (spec.k - 1)
        a, b = d.real, d.imag
        return np.stack([np.stack([a, -b], -1), np.stack([b, a], -1)], 1)
    if isinstance(spec, PlanarShear):
        J = np.zeros((X.shape[0], 2, 2))
        J[:, 0, 0] = 1 + spec.kappa
        J[:, 1, 1] = 1 - spec.kappa
        return J
    raise UnsupportedVariantError(f"no analytic Jacobian for {type(spec).__name__}")


def default_step(x) -> float:
    return float(np.finfo(float).eps ** (1 / 3) * max(1.0, np.linalg.norm(x)))


def relative_step(x) -> float:
    """``eps**(1/3) * |x|``: resolves maps that vary on the scale ``|x|`` near 0."""
    return float(np.finfo(float).eps ** (1 / 3) * np.linalg.norm(x))


def fd_jacobians(spec: MapSpec, X, h=None) -> np.ndarray:
    """Central-difference Jacobians.

    ``h`` is a scalar, one step per point, ``"relative"`` for
    :func:`relative_step`, or None for ``eps**(1/3) * max(1, |x|)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N, n = X.shape
    if h is None:
        steps = np.array([default_step(x) for x in X])
    elif isinstance(h, str):
        if h != "relative":
            raise DomainError(f"unknown step rule {h!r}")
        steps = np.array([relative_step(x) for x in X])
    else:
        steps = np.broadcast_to(np.asarray(h, dtype=float), (N,)).copy()
    if not np.all(steps > 0):
        raise DomainError(f"finite-difference step must be positive, got {h}")
    J = np.empty((N, n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        plus = eval_points(spec, X + steps[:, None] * e)
        minus = eval_points(spec, X - steps[:, None] * e)
        J[:, :, j] = (plus - minus) / (2.0 * steps[:, None])
    return J


def jacobian(spec: MapSpec, x, method: str = "analytic", h: Optional[float] = None) -> np.ndarray:
    """Jacobian matrix of ``spec`` at ``x``.

    Parameters
    ----------
    method : {"analytic", "fd"}
        Closed form, or central differences with step ``h``.
    """
    x = check_domain_point(spec, x)
    if method == "analytic":
        return analytic_jacobians(spec, x[None])[0]
    if method == "fd":
        return fd_jacobians(spec, x[None], h)[0]
    raise ValueError(f"unknown differentiation method {method!r}")


# ---------------------------------------------------------------------------
# dilatation


def _k_from_singular(sv: np.ndarray, zero: np.ndarray) -> np.ndarray:
    n = sv.shape[-1]
    lam1, lamn = sv[..., 0], sv[..., -1]
    with np.errstate(divide="ignore", invalid="ignore"):
        # prod(lambda) / lambda_1^n = prod_{i>1} (lambda_i / lambda_1)
        k = np.prod(sv[..., 1:] / lam1[..., None], axis=-1)
    degenerate = (lam1 == 0) | (lam1 <= 1e-15 * lamn)
    k = np.where(degenerate, np.inf, k)
    k = np.where(zero, 1.0, k)
    return k if n > 1 else np.ones_like(lam1)


def inner_dilatation_batch(J: np.ndarray, numeric: bool = True) -> np.ndarray:
    """``K_I`` for a stack of Jacobians.

    ``1`` for a zero matrix (exact test, or Frobenius norm below ``1e-13`` on
    the numeric path), ``inf`` for other singular matrices.
    """
    J = np.asarray(J, dtype=float)
    norms = np.linalg.norm(J, axis=(1, 2))
    zero = norms < ZERO_MATRIX_TOL if numeric else norms == 0
    return _k_from_singular(singular_values_batch(J), zero)


@dataclass(frozen=True, eq=False)
class PlanarDilatation:
    mu: complex
    K_mu: float


@dataclass(frozen=True, eq=False)
class DilatationSample:
    """Differential data of a map at one point."""

    point: np.ndarray
    jacobian: np.ndarray
    singular_values: np.ndarray
    jac_det_abs: float
    operator_norm: float
    min_stretch: float
    K_I: float
    mu: Optional[complex] = None
    K_mu: Optional[float] = None

    def to_dict(self) -> dict:
        out = {
            "point": self.point.tolist(),
            "jacobian": self.jacobian.tolist(),
            "singular_values": self.singular_values.tolist(),
            "jac_det_abs": self.jac_det_abs,
            "operator_norm": self.operator_norm,
            "min_stretch": self.min_stretch,
            "K_I": self.K_I,
        }
        if self.mu is not None:
            out["mu"] = [self.mu.real, self.mu.imag]
            out["K_mu"] = self.K_mu
        return out


def inner_dilatation(obj, numeric: bool = False) -> float:
    """Inner dilatation of a matrix or a :class:`DilatationSample`.

    Total on matrices: ``prod(lambda)/lambda_1**n`` when nondegenerate, ``1``
    for the zero matrix and ``inf`` for any other singular matrix.
    """
    if isinstance(obj, DilatationSample):
        return obj.K_I
    M = np.asarray(obj, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"inner dilatation needs a square matrix, got shape {M.shape}")
    return float(inner_dilatation_batch(M[None], numeric=numeric)[0])


def _planar_from_jacobian(J: np.ndarray) -> PlanarDilatation:
    fx = J[0, 0] + 1j * J[1, 0]
    fy = J[0, 1] + 1j * J[1, 1]
    fz = (fx - 1j * fy) / 2
    fzbar = (fx + 1j * fy) / 2
    mu = complex(fzbar / fz) if fz != 0 else 0j
    a = abs(mu)
    if a == 1.0:
        k = math.inf
    else:
        k = (1 + a) / abs(1 - a)
    return PlanarDilatation(mu, k)


def complex_dilatation(spec: MapSpec, z: complex, method: str = "analytic", h: Optional[float] = None) -> PlanarDilatation:
    """Complex dilatation ``mu`` and ``K_mu = (1 + |mu|) / (1 - |mu|)`` at ``z``."""
    if spec.dim != 2:
        raise UnsupportedVariantError("complex dilatation is defined for planar maps only")
    J = jacobian(spec, [complex(z).real, complex(z).imag], method=method, h=h)
    return _planar_from_jacobian(J)


def sample_dilatation(spec: MapSpec, x, method: str = "analytic", h: Optional[float] = None) -> DilatationSample:
    J = jacobian(spec, x, method=method, h=h)
    sv = singular_values(J)
    k = inner_dilatation(J, numeric=(method != "analytic"))
    pd = _planar_from_jacobian(J) if J.shape[0] == 2 else None
    return DilatationSample(
        point=np.asarray(x, dtype=float),
        jacobian=J,
        singular_values=sv,
        jac_det_abs=float(np.prod(sv)),
        operator_norm=float(sv[-1]),
        min_stretch=float(sv[0]),
        K_I=k,
        mu=None if pd is None else pd.mu,
        K_mu=None if pd is None else pd.K_mu,
    )


def minor_bracket(matrix, normal=None) -> tuple[float, float, float]:
    """``(lambda_1...lambda_{n-1}, J_{n-1}, lambda_2...lambda_n)`` for a matrix.

    ``J_{n-1}`` is the area stretch of the hyperplane orthogonal to ``normal``
    (default: last coordinate axis), i.e. the square root of the sum of
    squared ``(n-1)``-minors of the restricted linear map.
    """
    M = np.asarray(matrix, dtype=float)
    n = M.shape[0]
    sv = singular_values(M)
    nu = np.zeros(n) if normal is None else np.asarray(normal, dtype=float)
    if normal is None:
        nu[-1] = 1.0
    q, _ = np.linalg.qr(np.column_stack([nu, np.eye(n)]))
    basis = q[:, 1:n]
    image = M @ basis
    # Cauchy-Binet: det(image^T image) equals the sum of squared (n-1)-minors
    area = math.sqrt(max(np.linalg.det(image.T @ image), 0.0))
    return float(np.prod(sv[:-1])), area, float(np.prod(sv[1:]))


# ---------------------------------------------------------------------------
# Orlicz energy


def check_region_in_punctured_ball(region: AnnulusSpec) -> None:
    c = float(np.linalg.norm(region.center))
    if c + region.r2 >= 1.0:
        raise DomainError("region touches or leaves the unit sphere")
    if region.r1 <= c <= region.r2:
        raise DomainError("region touches the puncture x = 0")


def orlicz_energy(
    spec: MapSpec,
    region: AnnulusSpec,
    phi,
    order: int = DEFAULT_ORDER,
    panels: int = 8,
) -> float:
    """``int_region phi(|grad f|) dm`` with ``|grad f|`` the Frobenius norm."""
    if region.dim != spec.dim:
        raise DomainError("region and map dimensions differ")
    check_region_in_punctured_ball(region)
    rule = annulus_rule(region, order=order, panels=panels)
    J = analytic_jacobians(spec, rule.nodes)
    grad = np.linalg.norm(J, axis=(1, 2))
    return float(np.sum(rule.weights * phi(grad)))


def max_operator_norm(spec: MapSpec, region: AnnulusSpec, order: int = DEFAULT_ORDER, panels: int = 8) -> float:
    """Largest ``||f'(x)||`` over the quadrature nodes and both boundary spheres."""
    rule = annulus_rule(region, order=order, panels=panels)
    from .geometry import sphere_rule

    pts = [rule.nodes]
    for r in (region.r1, region.r2):
        pts.append(sphere_rule(region.center, r, order=order).nodes)
    J = analytic_jacobians(spec, np.vstack(pts))
    return float(np.max(singular_values_batch(J)[:, -1]))
