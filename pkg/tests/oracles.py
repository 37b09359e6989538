"""Independent reference computations (mpmath / numpy.linalg) for frozen test values.

Nothing here imports the package; each function restates its quantity from
first principles so package results can be checked against it.
"""

import mpmath as mp
import numpy as np

mp.mp.dps = 30


def sphere_area(n):
    return 2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)


def sphere_monomial(a):
    """Integral of prod x_i^a_i over the unit sphere in R^len(a)."""
    a = [int(v) for v in a]
    if any(v % 2 for v in a):
        return mp.mpf(0)
    b = [mp.mpf(v + 1) / 2 for v in a]
    return 2 * mp.fprod(mp.gamma(x) for x in b) / mp.gamma(mp.fsum(b))


def k_inner_svd(J):
    """Inner dilatation from numpy's SVD."""
    s = np.linalg.svd(np.asarray(J, dtype=float), compute_uv=False)
    return float(np.prod(s) / s.min() ** len(s))


def power_log(c, gamma, s):
    return lambda t: c * t ** (-gamma) * mp.log(mp.e + 1 / t) ** s


def criterion_integral(q, eps, eps0, n):
    """int_eps^eps0 dt / (t q(t)^(1/(n-1))) by tanh-sinh in log t."""
    f = lambda v: 1 / q(mp.exp(v)) ** (mp.mpf(1) / (n - 1))
    return mp.quad(f, [mp.log(eps), mp.log(eps0)])


def exp_integral_profile(q, n, r):
    """rho(r) = exp(-int_r^1 dt / (t q^(1/(n-1))))."""
    return mp.exp(-criterion_integral(q, r, 1, n))


def ball_power_integral(q, p, n):
    """int_{B(0,1)} q(|x|)^p dm."""
    return sphere_area(n) * mp.quad(lambda r: q(r) ** p * r ** (n - 1), [0, mp.mpf("1e-8"), mp.mpf("1e-3"), 1])


def fmo_log_constant(n):
    """Mean oscillation of log(1/|x|) over a ball centred at 0 (scale free)."""
    m = mp.mpf(1) / n
    f = lambda s: n * s ** (n - 1) * abs(mp.log(1 / s) - m)
    return mp.quad(f, [0, mp.exp(-m), 1])


def fmo_inverse_radius_constant(n):
    """eps * mean oscillation of 1/|x| over B(0, eps)."""
    mean = mp.mpf(n) / (n - 1)
    f = lambda s: n * s ** (n - 1) * abs(1 / s - mean)
    return mp.quad(f, [0, 1 / mean, 1])


def grotzsch_capacity(a):
    """2 pi / mu(a), mu(a) = (pi/2) K'(a)/K(a), parameter m = a^2."""
    a = mp.mpf(a)
    mu = mp.pi / 2 * mp.ellipk(1 - a * a) / mp.ellipk(a * a)
    return 2 * mp.pi / mu


def weighted_ring(q, eta, r1, r2, n):
    """int_A q(|x|) eta(|x|)^n dm for radial q."""
    return sphere_area(n) * mp.quad(lambda r: q(r) * eta(r) ** n * r ** (n - 1), [r1, r2])


def exp_integral_limit(log_q, n):
    """rho(0+) = exp(-int_0^inf q(e^-u)^(-1/(n-1)) du) given u -> log q(e^-u)."""
    f = lambda u: mp.exp(-log_q(u) / (n - 1))
    return mp.exp(-mp.quad(f, [0, 1, 10, 100, mp.inf]))


def ball_borderline_log(s, n, cut=200):
    """int_{B(0,1)} |x|^-n log(e + 1/|x|)^s dm for s < -1.

    In u = log(1/|x|) this is omega int_0^inf log(e + e^u)^s du; past ``cut``
    the integrand equals u^s to working precision and the tail is closed form.
    """
    s = mp.mpf(s)
    U = mp.mpf(cut)
    head = mp.quad(lambda u: mp.log(mp.e + mp.exp(u)) ** s, [0, 1, 10, 50, 100, U])
    return sphere_area(n) * (head + U ** (s + 1) / (-s - 1))
