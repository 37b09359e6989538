import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import ortho_group

from oracles import k_inner_svd
from removability.differential import (
    analytic_jacobians,
    complex_dilatation,
    fd_jacobians,
    inner_dilatation,
    inner_dilatation_batch,
    jacobian,
    max_operator_norm,
    minor_bracket,
    orlicz_energy,
    sample_dilatation,
    singular_values,
    singular_values_batch,
)
from removability.errors import DomainError, UnsupportedVariantError
from removability.fields import PowerLog
from removability.geometry import AnnulusSpec
from removability.maps import ExpIntegral, PlanarPower, PlanarShear, PowerShift, Radial, Twist
from removability.phi import Power

SPECS = [
    Radial(PowerShift(0.5), 3),
    Radial(PowerShift(0.3), 4),
    Radial(ExpIntegral(PowerLog(2.0, 0.0, 1.0), 3), 3),
    Twist(3),
    PlanarPower(3),
    PlanarShear(0.4),
    Radial(PowerShift(0.6), 2),
]


def _points(rng, n, count, lo=0.05, hi=0.95):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(lo, hi, size=(count, 1))


def test_planar_power_jacobian():
    assert np.allclose(jacobian(PlanarPower(2), [0.5, 0.0]), [[1.0, 0.0], [0.0, 1.0]], atol=1e-15)
    # derivative 2z at z = 0.5 i is i: rotation by 90 degrees
    assert np.allclose(jacobian(PlanarPower(2), [0.0, 0.5]), [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)


def test_power_shift_singular_values_and_closed_form():
    s = sample_dilatation(Radial(PowerShift(0.5), 3), [0.25, 0.0, 0.0])
    assert np.allclose(s.singular_values, [1.0, 6.0, 6.0], rtol=1e-14)
    assert s.K_I == pytest.approx(36.0, rel=1e-14)
    assert s.jac_det_abs == pytest.approx(36.0, rel=1e-14)
    assert s.operator_norm == pytest.approx(6.0) and s.min_stretch == pytest.approx(1.0)


def test_twist_determinant_and_dilatation():
    spec = Twist(2)
    J = jacobian(spec, [0.5, 0.0, 0.0], method="fd")
    assert abs(np.linalg.det(J)) == pytest.approx(2.0, rel=1e-8)
    X = _points(np.random.default_rng(11), 3, 100)
    X = X[np.hypot(X[:, 0], X[:, 1]) > 1e-3]
    for m in (2, 3, 5):
        k = inner_dilatation_batch(fd_jacobians(Twist(m), X))
        assert np.allclose(k, m, rtol=1e-6)
    with pytest.raises(DomainError):
        jacobian(spec, [0.0, 0.0, 0.5])


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_analytic_matches_finite_differences(spec):
    X = _points(np.random.default_rng(1), spec.dim, 100)
    if isinstance(spec, Twist):
        X = X[np.hypot(X[:, 0], X[:, 1]) > 1e-2]
    Ja = analytic_jacobians(spec, X)
    Jf = fd_jacobians(spec, X, h=1e-5)
    scale = np.maximum(1.0, np.abs(Ja).max(axis=(1, 2)))
    assert np.max(np.abs(Ja - Jf).max(axis=(1, 2)) / scale) <= 1e-6


def test_fd_step_validation():
    with pytest.raises(DomainError):
        jacobian(PlanarPower(2), [0.5, 0.0], method="fd", h=0.0)
    with pytest.raises(DomainError):
        jacobian(PlanarPower(2), [0.0, 0.0])


def test_singular_values_examples():
    assert np.allclose(singular_values(np.eye(4)), np.ones(4))
    assert np.allclose(singular_values(np.diag([3.0, 1.0, 2.0])), [1.0, 2.0, 3.0], rtol=1e-15)
    Q = ortho_group.rvs(6, random_state=2)
    assert np.max(np.abs(singular_values(Q) - 1.0)) <= 1e-12
    with pytest.raises(DomainError):
        singular_values(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 8), st.just(8)), elements=st.floats(-10, 10)))
def test_singular_values_match_lapack(A):
    n = A.shape[0]
    M = A[:, :n]
    sv = singular_values(M)
    ref = np.sort(np.linalg.svd(M, compute_uv=False))
    assert np.all(np.diff(sv) >= 0) and np.all(sv >= 0)
    assert np.allclose(sv, ref, rtol=0, atol=1e-12 * max(1.0, ref[-1]))
    det = abs(np.linalg.det(M))
    if det > 1e-6 * max(1.0, ref[-1]) ** n:
        assert np.prod(sv) == pytest.approx(det, rel=1e-10)


def test_inner_dilatation_branches():
    assert inner_dilatation(np.zeros((3, 3))) == 1.0
    assert inner_dilatation(np.diag([1.0, 0.0, 2.0])) == math.inf
    assert inner_dilatation(1e-14 * np.eye(3), numeric=True) == 1.0
    assert inner_dilatation(np.diag([1.0, 2.0, 3.0])) == pytest.approx(6.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000), st.floats(1e-3, 1e3))
def test_inner_dilatation_scale_invariant_and_matches_svd(n, seed, c):
    M = np.random.default_rng(seed).standard_normal((n, n))
    k = inner_dilatation(M)
    assert k >= 1.0
    assert inner_dilatation(c * M) == pytest.approx(k, rel=1e-12)
    assert k == pytest.approx(k_inner_svd(M), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_minor_bracket(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    nu = rng.standard_normal(n)
    lo, mid, hi = minor_bracket(M, nu)
    assert lo <= mid * (1 + 1e-10) and mid <= hi * (1 + 1e-10)


def test_sample_invariants():
    for spec in SPECS:
        x = _points(np.random.default_rng(9), spec.dim, 1)[0]
        s = sample_dilatation(spec, x)
        assert s.jac_det_abs == pytest.approx(abs(np.linalg.det(s.jacobian)), rel=1e-8)
        assert s.operator_norm == s.singular_values[-1]
        assert s.K_I >= 1.0 - 1e-12
        d = s.to_dict()
        assert d["K_I"] == s.K_I


def test_planar_dilatation_examples():
    for k in (1, 2, 5):
        pd = complex_dilatation(PlanarPower(k), 0.3 + 0.4j)
        assert abs(pd.mu) <= 1e-15 and pd.K_mu == 1.0
    pd = complex_dilatation(PlanarShear(1 / 3), 0.2 - 0.1j)
    assert pd.mu == pytest.approx(1 / 3, abs=1e-15)
    assert pd.K_mu == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(UnsupportedVariantError):
        complex_dilatation(Radial(PowerShift(0.5), 3), 0.5)


def test_planar_exp_integral_dilatation_equals_q():
    q = PowerLog(1.5, 0.0, 1.0)
    spec = Radial(ExpIntegral(q, 2), 2)
    for z in (0.5, 0.1j, -0.01 + 0.02j):
        pd = complex_dilatation(spec, z)
        assert pd.K_mu == pytest.approx(float(q.radial(abs(z))), rel=1e-10)


def test_orlicz_energy_examples():
    A = AnnulusSpec(np.zeros(2), 0.01, 0.99)
    # |grad z^2|^2 = 8 r^2, integrated over the ring
    exact = 4 * math.pi * (0.99**4 - 0.01**4)
    assert orlicz_energy(PlanarPower(2), A, Power(2.0)) == pytest.approx(exact, rel=1e-12)
    ident = Radial(ExpIntegral(PowerLog(1.0), 3), 3)
    A3 = AnnulusSpec(np.zeros(3), 0.2, 0.7)
    assert orlicz_energy(ident, A3, Power(0.0)) == pytest.approx(A3.volume, rel=1e-12)
    spec = Radial(PowerShift(0.5), 3)
    A5 = AnnulusSpec(np.zeros(3), 0.5, 0.9)
    c = max_operator_norm(spec, A5)
    for phi in (Power(1.0), Power(3.0), Power(7.0)):
        assert orlicz_energy(spec, A5, phi) <= float(phi(math.sqrt(3) * c)) * A5.volume


def test_orlicz_region_checks():
    with pytest.raises(DomainError):
        orlicz_energy(PlanarPower(2), AnnulusSpec(np.zeros(2), 0.5, 1.0), Power(2.0))
    with pytest.raises(DomainError):
        orlicz_energy(PlanarPower(2), AnnulusSpec(np.array([0.3, 0.0]), 0.1, 0.5), Power(2.0))


def test_relative_step_near_puncture():
    spec = Radial(PowerShift(0.9), 3)
    x = np.array([[1e-3, 0.0, 0.0]])
    r = 1e-3
    exact = ((1 + r**0.9) / (0.9 * r**0.9)) ** 2
    k_rel = inner_dilatation_batch(fd_jacobians(spec, x, h="relative"))[0]
    k_def = inner_dilatation_batch(fd_jacobians(spec, x))[0]
    assert abs(k_rel - exact) / exact < 1e-7
    # the default step is sized for |x| of order 1
    assert abs(k_def - exact) / exact > 1e-5
    per_point = fd_jacobians(spec, np.vstack([x, 2 * x]), h=np.array([1e-9, 2e-9]))
    assert per_point.shape == (2, 3, 3)
    with pytest.raises(DomainError):
        fd_jacobians(spec, x, h="tiny")
    with pytest.raises(DomainError):
        fd_jacobians(spec, x, h=0.0)
