import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from removability.errors import DomainError, ResolutionError, UnsupportedVariantError
from removability.fields import PowerLog, RadialFunction
from removability.maps import (
    ExpIntegral,
    PlanarPower,
    PlanarShear,
    PowerShift,
    Radial,
    SinglePoint,
    SphereSet,
    TabulatedProfile,
    Twist,
    eval_map,
    eval_points,
    extendable_ground_truth,
    limit_set_at_boundary,
    limit_set_at_zero,
    profile_limit_at_zero,
)

# rho values from oracles.exp_integral_profile / exp_integral_limit (mpmath, 30 digits)
RHO_POWERLOG_2_0_1_N3_AT_0P1 = 0.294452829768419792379781421605
RHO_POWERLOG_1_0_2_N3_AT_1EM3 = 0.092276287928795023768149636796
# exp(-int_0^inf log(e + e^u)^(-3/2) du)
RHO_POWERLOG_1_0_3_N3_AT_ZERO = 0.100503210110088450019815353889


def unit_q():
    return PowerLog(1.0)


def log_e_over_r(n):
    # q(r) = log(e/r)^(n-1); log q at r = e^-u is (n-1) log(1 + u)
    return RadialFunction(lambda r: np.log(np.e / r) ** (n - 1), "log(e/r)^(n-1)",
                          log_func=lambda u: (n - 1) * math.log1p(u))


def test_power_shift_evaluation():
    spec = Radial(PowerShift(0.5), 3)
    assert np.allclose(eval_map(spec, [0.25, 0, 0]), [1.5, 0, 0], rtol=0, atol=1e-15)


def test_twist_fixed_ray_and_planar_power():
    assert np.allclose(eval_map(Twist(2), [0.3, 0.0, 0.4]), [0.3, 0.0, 0.4], atol=1e-15)
    assert np.allclose(eval_map(PlanarPower(2), [0.0, 0.9]), [-0.81, 0.0], atol=1e-15)


@pytest.mark.parametrize("x", [[0, 0, 0], [1, 0, 0], [0.8, 0.8, 0]])
def test_domain_errors(x):
    with pytest.raises(DomainError):
        eval_map(Radial(PowerShift(0.5), 3), x)


def test_parameter_validation():
    with pytest.raises(DomainError):
        PowerShift(1.0)
    with pytest.raises(DomainError):
        PlanarShear(1.0)
    with pytest.raises(DomainError):
        Twist(0)
    with pytest.raises(DomainError):
        TabulatedProfile((0.1, 0.5, 1.0), (0.3, 0.2, 0.4))


def _random_ball_points(rng, n, count):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(0.01, 0.99, size=(count, 1))


@pytest.mark.parametrize("profile", [PowerShift(0.3), ExpIntegral(PowerLog(2.0, 0.0, 1.0), 3)])
def test_radial_equivariance_and_modulus(profile):
    rng = np.random.default_rng(3)
    spec = Radial(profile, 3)
    X = _random_ball_points(rng, 3, 20)
    R = Rotation.random(5, random_state=4).as_matrix()
    FX = eval_points(spec, X)
    for Rm in R:
        assert np.allclose(eval_points(spec, X @ Rm.T), FX @ Rm.T, rtol=0, atol=1e-12)
    assert np.allclose(np.linalg.norm(FX, axis=1), profile(np.linalg.norm(X, axis=1)), rtol=1e-13)


def test_power_shift_image_ring():
    X = _random_ball_points(np.random.default_rng(5), 4, 500)
    r = np.linalg.norm(eval_points(Radial(PowerShift(0.7), 4), X), axis=1)
    assert np.all((r > 1) & (r < 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(3, 5), st.data())
def test_twist_preserves_cylinder_radius_and_axis(m, n, data):
    x = np.array(data.draw(st.lists(st.floats(-0.5, 0.5), min_size=n, max_size=n)))
    if np.linalg.norm(x) == 0:
        return
    y = eval_points(Twist(m, n), x[None, :])[0]
    assert math.hypot(y[0], y[1]) == pytest.approx(math.hypot(x[0], x[1]), abs=1e-15)
    assert np.array_equal(y[2:], x[2:])


def test_exp_integral_profile_against_oracle():
    p = ExpIntegral(PowerLog(2.0, 0.0, 1.0), 3)
    assert float(p(0.1)) == pytest.approx(RHO_POWERLOG_2_0_1_N3_AT_0P1, rel=1e-11)
    p2 = ExpIntegral(PowerLog(1.0, 0.0, 2.0), 3)
    assert float(p2(1e-3)) == pytest.approx(RHO_POWERLOG_1_0_2_N3_AT_1EM3, rel=1e-11)
    assert float(p(1.0)) == 1.0


def test_exp_integral_identity_and_log_closed_form():
    ident = ExpIntegral(unit_q(), 3)
    r = np.array([0.9, 0.3, 1e-3, 1e-8])
    assert np.allclose(ident(r), r, rtol=1e-12)
    p = ExpIntegral(log_e_over_r(3), 3)
    assert np.allclose(p(r), 1.0 / np.log(np.e / r), rtol=1e-11)
    # derivative rho / (r q^(1/(n-1)))
    assert np.allclose(p.derivative(r), 1.0 / (r * np.log(np.e / r) ** 2), rtol=1e-11)


def test_profile_limits():
    est = profile_limit_at_zero(PowerShift(0.5))
    assert abs(est.value - 1.0) <= 1e-9
    assert profile_limit_at_zero(ExpIntegral(unit_q(), 3)).value == 0.0
    assert profile_limit_at_zero(ExpIntegral(log_e_over_r(3), 3)).value == 0.0
    conv = profile_limit_at_zero(ExpIntegral(PowerLog(1.0, 0.0, 3.0), 3))
    assert conv.value == pytest.approx(RHO_POWERLOG_1_0_3_N3_AT_ZERO, rel=1e-8)


def test_tabulated_profile_limit_and_resolution():
    knots = (1e-4, 1e-3, 1e-2, 0.1, 1.0)
    vals = (0.5 + 1e-4, 0.5 + 1e-3, 0.5 + 1e-2, 0.6, 1.0)
    spec = Radial(TabulatedProfile(knots, vals), 3)
    ls = limit_set_at_zero(spec)
    assert isinstance(ls, SphereSet) and ls.radius == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(ResolutionError):
        profile_limit_at_zero(TabulatedProfile((0.01, 1.0), (0.5, 1.0)))


def test_limit_sets_and_ground_truth():
    ps = Radial(PowerShift(0.5), 3)
    ls = limit_set_at_zero(ps)
    assert isinstance(ls, SphereSet) and ls.radius == pytest.approx(1.0, abs=1e-9)
    assert limit_set_at_boundary(ps).radius == 2.0
    assert extendable_ground_truth(ps) is False
    ident = Radial(ExpIntegral(unit_q(), 3), 3)
    assert isinstance(limit_set_at_zero(ident), SinglePoint)
    assert extendable_ground_truth(ident) is True
    assert extendable_ground_truth(Radial(ExpIntegral(PowerLog(1.0, 0.0, 3.0), 3), 3)) is False


def test_non_radial_limit_sets_rejected():
    with pytest.raises(UnsupportedVariantError):
        limit_set_at_zero(Twist(2))
    with pytest.raises(UnsupportedVariantError):
        extendable_ground_truth(PlanarPower(3))


def test_multiplicity_metadata():
    assert Radial(PowerShift(0.5), 3).multiplicity == 1
    assert Twist(4).multiplicity == 4
    assert PlanarPower(3).multiplicity == 3
