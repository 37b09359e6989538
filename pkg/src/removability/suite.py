"""Fixed reproduction suite: closed forms, sharpness examples and identities.

Each row is a top-level function ``(n, seed, order, decades) -> SuiteRow``
so rows can run in worker processes; results are assembled in the fixed
row order regardless of completion order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import multiprocessing as mp

import numpy as np

from .criterion import (
    classify_divergence,
    criterion_integral,
    fmo_weight_trend,
    removability_verdict,
    verify_extremality,
)
from .differential import analytic_jacobians, fd_jacobians, inner_dilatation_batch, max_operator_norm, orlicz_energy
from .fields import Anisotropic, FromMap, LogPower, PowerLog, ball_Lp_norm
from .geometry import AnnulusSpec
from .maps import (
    ExpIntegral,
    PowerShift,
    Radial,
    SphereSet,
    describe_limit_set,
    extendable_ground_truth,
    limit_set_at_boundary,
    limit_set_at_zero,
    profile_limit_at_zero,
)
from .modulus import duality_report, lower_Q_check_radial, variational_radial_modulus_oracle, ring_curve_modulus
from .phi import Power
from .report import ReportBundle

ALL_FLAGS = {"bounded": True, "open_discrete_closed": True, "limit_sets_disjoint": True}


@dataclass
class SuiteRow:
    name: str
    operation: str
    method: str
    passed: bool
    metric: float
    tolerance: float
    detail: dict = field(default_factory=dict)
    header: tuple = ()
    trace: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "operation": self.operation,
            "method": self.method,
            "passed": bool(self.passed),
            "metric": self.metric,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _points_in_shell(rng, n, count, lo=0.05, hi=0.95):
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(lo, hi, size=(count, 1))


def power_shift_closed_form(alpha, r, n):
    return ((1 + r**alpha) / (alpha * r**alpha)) ** (n - 1)


def row_power_shift_dilatation(n, seed, order, decades):
    alpha = 0.5
    spec = Radial(PowerShift(alpha), n)
    X = _points_in_shell(np.random.default_rng(seed), n, 100)
    r = np.linalg.norm(X, axis=1)
    exact = power_shift_closed_form(alpha, r, n)
    ka = inner_dilatation_batch(analytic_jacobians(spec, X))
    kf = inner_dilatation_batch(fd_jacobians(spec, X))
    ea = float(np.max(np.abs(ka - exact) / exact))
    ef = float(np.max(np.abs(kf - exact) / exact))
    return SuiteRow(
        "power-shift K_I closed form", "inner_dilatation", "Symbolic", ea <= 1e-10 and ef <= 1e-6, ef, 1e-6,
        {"alpha": alpha, "analytic_error": ea, "fd_error": ef},
        ("radius", "closed_form", "analytic", "finite_difference"),
        list(zip(r, exact, ka, kf)),
    )


def row_power_shift_lp(n, seed, order, decades):
    rows, ok = [], True
    for p in (1.0, 2.0, 5.0):
        crit = n / (p * (n - 1))
        for factor in (0.9, 1.1):
            alpha = factor * crit
            if alpha < 1:
                Q, label = FromMap(Radial(PowerShift(alpha), n)), "map"
            else:
                # majorant (2/alpha)^(n-1) |x|^(-alpha (n-1)) of the dilatation
                Q, label = PowerLog((2 / alpha) ** (n - 1), alpha * (n - 1)), "majorant"
            res = ball_Lp_norm(Q, p, n=n, order=order)
            expected_finite = factor < 1
            ok &= res.finite == expected_finite
            rows.append((p, alpha, factor, label, res.finite, res.value))
    return SuiteRow(
        "power-shift Lp threshold", "ball_Lp_norm", "Symbolic+Quadrature", ok, float(not ok), 0.0,
        {"cases": len(rows)}, ("p", "alpha", "factor", "field", "finite", "value"), rows,
    )


def row_power_shift_limit_set(n, seed, order, decades):
    spec = Radial(PowerShift(0.5), n)
    at0 = limit_set_at_zero(spec)
    at1 = limit_set_at_boundary(spec)
    est = profile_limit_at_zero(spec.profile)
    err = abs(est.value - 1.0)
    ok = isinstance(at0, SphereSet) and abs(at0.radius - 1.0) <= 1e-9 and abs(at1.radius - 2.0) <= 1e-12
    ok = ok and err <= 1e-9 and not extendable_ground_truth(spec)
    return SuiteRow(
        "power-shift limit set is the unit sphere", "limit_set_at_zero", "Symbolic", ok, err, 1e-9,
        {"limit_at_zero": describe_limit_set(at0), "limit_at_boundary": describe_limit_set(at1), "numeric_radius": est.value},
        ("radius", "profile"), [tuple(t) for t in est.trace],
    )


def row_power_shift_orlicz(n, seed, order, decades):
    spec = Radial(PowerShift(0.5), n)
    region = AnnulusSpec(np.zeros(n), 0.1, 0.9)
    c = max_operator_norm(spec, region, order=order)
    vol = region.volume
    rows, ok = [], True
    for p in (1.0, float(n), 2.0 * n):
        phi = Power(p)
        e = orlicz_energy(spec, region, phi, order=order)
        bound = float(phi(math.sqrt(n) * c)) * vol
        ok &= e <= bound
        rows.append((p, e, bound))
    return SuiteRow(
        "power-shift Orlicz energy bound", "orlicz_energy", "Quadrature", ok, max(r[1] / r[2] for r in rows), 1.0,
        {"region": [0.1, 0.9], "max_operator_norm": c}, ("p", "energy", "bound"), rows,
    )


def _exp_integral_map(n):
    q = PowerLog(2.0, 0.0, 1.0)
    return q, Radial(ExpIntegral(q, n), n)


def row_exp_integral_dilatation(n, seed, order, decades):
    q, spec = _exp_integral_map(n)
    X = _points_in_shell(np.random.default_rng(seed + 1), n, 50)
    r = np.linalg.norm(X, axis=1)
    k = inner_dilatation_batch(analytic_jacobians(spec, X))
    target = q.radial(r)
    err = float(np.max(np.abs(k - target) / target))
    return SuiteRow(
        "exp-integral K_I equals q", "inner_dilatation", "Quadrature", err <= 1e-6, err, 1e-6,
        {"q": repr(q)}, ("radius", "q", "K_I"), list(zip(r, target, k)),
    )


def row_exp_integral_lower_q(n, seed, order, decades):
    q, spec = _exp_integral_map(n)
    Q = FromMap(spec, exponent=1.0 / (n - 1))
    rows = []
    for e in (1e-1, 1e-2, 1e-3, 1e-4):
        chk = lower_Q_check_radial(spec, Q, e, 1.0, n)
        rows.append((e, chk.lhs, chk.rhs, chk.gap))
    worst = max(abs(r[3]) for r in rows)
    return SuiteRow(
        "exp-integral lower-Q equality", "lower_Q_check_radial", "Quadrature", worst <= 1e-6, worst, 1e-6,
        {"q": repr(q)}, ("epsilon", "lhs", "rhs", "gap"), rows,
    )


def row_exp_integral_sharpness(n, seed, order, decades):
    q = PowerLog(1.0, 0.0, float(n))
    spec = Radial(ExpIntegral(q, n), n)
    res = classify_divergence(q, n, decades=decades)
    truth = extendable_ground_truth(spec)
    rep = removability_verdict(spec, Power(float(n)), decades=decades, order=order)
    ok = res.verdict == "Converges" and truth is False and rep.extendable is None and rep.agreement is True
    return SuiteRow(
        "exp-integral convergent case is not extendable", "removability_verdict", res.method, ok, float(not ok), 0.0,
        {"verdict": res.verdict, "ground_truth": truth, "summary": rep.summary},
        ("epsilon", "integral", "increment"), list(res.trace),
    )


def row_log_power_verdict(n, seed, order, decades):
    Q = LogPower(float(n - 1))
    rep = removability_verdict(Q, Power(float(n)), n, ALL_FLAGS, decades=decades, order=order)
    eps0 = 0.5
    rows, worst = [], 0.0
    for k in range(2, 7):
        eps = 10.0**-k
        val = criterion_integral(Q, eps, eps0, n)
        exact = math.log(math.log(1 / eps) / math.log(1 / eps0))
        err = abs(val - exact) / exact
        worst = max(worst, err)
        rows.append((eps, val, exact, err))
    ok = rep.conclusion == "extendable" and worst <= 1e-8
    return SuiteRow(
        "log-power field is extendable", "removability_verdict", rep.method, ok, worst, 1e-8,
        {"verdict": rep.verdict, "conclusion": rep.conclusion}, ("epsilon", "integral", "closed_form", "error"), rows,
    )


def row_fmo_verdict(n, seed, order, decades):
    Q = LogPower(1.0)
    rep = removability_verdict(Q, Power(float(n)), n, ALL_FLAGS, route="fmo", order=order)
    trend = fmo_weight_trend(Q, n)
    last = [t[2] for t in trend]
    ok = rep.conclusion == "extendable" and all(b <= a for a, b in zip(last[:-1], last[1:]))
    return SuiteRow(
        "FMO model field is extendable", "removability_verdict", "Quadrature", ok, last[-1], last[0],
        {"verdict": rep.verdict, "conclusion": rep.conclusion},
        ("log_inv_epsilon", "scaled_energy", "scaled_times_loglog_power"), list(trend),
    )


def row_duality(n, seed, order, decades):
    rng = np.random.default_rng(seed + 2)
    rows, worst = [], 0.0
    for _ in range(50):
        dim = int(rng.integers(2, 7))
        r1 = float(rng.uniform(0.01, 1.0))
        r2 = r1 * float(np.exp(rng.uniform(0.05, 4.0)))
        d = duality_report(r1, r2, dim)
        worst = max(worst, d.capacity_vs_curve, d.surface_vs_capacity)
        rows.append((dim, r1, r2, d.rings.capacity, d.rings.surface_modulus))
    oracle = variational_radial_modulus_oracle(1.0, math.e, n, 10_000)
    oerr = abs(oracle - ring_curve_modulus(1.0, math.e, n)) / ring_curve_modulus(1.0, math.e, n)
    ok = worst <= 1e-12 and oerr <= 0.01
    return SuiteRow(
        "duality triple", "duality_report", "Symbolic+Oracle", ok, worst, 1e-12,
        {"oracle_relative_error": oerr}, ("n", "r1", "r2", "capacity", "surface_modulus"), rows,
    )


def row_extremal_eta(n, seed, order, decades):
    cases = [
        (PowerLog(1.0), AnnulusSpec(np.zeros(n), 1.0, math.e)),
        (PowerLog(2.0, 0.5, 1.0), AnnulusSpec(np.zeros(n), 0.05, 0.7)),
        (Anisotropic(0, 1.0, 0.5), AnnulusSpec(np.zeros(n), 0.1, 0.6)),
    ]
    rows, ok, worst = [], True, 0.0
    for Q, A in cases:
        rep = verify_extremality(Q, A, order=order)
        ok &= rep.passed
        worst = max(worst, rep.relative_error)
        rows.append((type(Q).__name__, A.r1, A.r2, rep.closed_form, rep.value_at_eta0,
                     min(c.value for c in rep.candidates)))
    return SuiteRow(
        "extremal eta equality", "verify_extremality", "Quadrature", ok, worst, 1e-6, {"cases": len(cases)},
        ("field", "r1", "r2", "closed_form", "value_at_eta0", "best_alternative"), rows,
    )


def row_power_shift_verdict(n, seed, order, decades):
    spec = Radial(PowerShift(0.5), n)
    rep = removability_verdict(spec, Power(float(n)), decades=decades, order=order)
    ok = rep.verdict == "Converges" and rep.ground_truth is False and rep.agreement is True
    return SuiteRow(
        "power-shift map is a sharpness example", "removability_verdict", rep.method, ok, float(not ok), 0.0,
        {"summary": rep.summary}, ("epsilon", "integral", "increment"), rep.trace_rows(),
    )


ROWS = (
    ("power-shift-dilatation", row_power_shift_dilatation),
    ("power-shift-lp", row_power_shift_lp),
    ("power-shift-limit-set", row_power_shift_limit_set),
    ("power-shift-orlicz", row_power_shift_orlicz),
    ("power-shift-verdict", row_power_shift_verdict),
    ("exp-integral-dilatation", row_exp_integral_dilatation),
    ("exp-integral-lower-q", row_exp_integral_lower_q),
    ("exp-integral-sharpness", row_exp_integral_sharpness),
    ("log-power-verdict", row_log_power_verdict),
    ("fmo-verdict", row_fmo_verdict),
    ("duality", row_duality),
    ("extremal-eta", row_extremal_eta),
)


def _run_row(args):
    slug, n, seed, order, decades = args
    fn = dict(ROWS)[slug]
    try:
        return fn(n, seed, order, decades)
    except Exception as exc:  # a failing row is reported, not raised
        return SuiteRow(slug, fn.__name__, "Error", False, math.nan, math.nan,
                        {"error": f"{type(exc).__name__}: {exc}"})


def reproduce_paper(n: int = 3, workers: int = 1, seed: int = 0, order: int = 16, decades: int = 8) -> ReportBundle:
    """Run every suite row and assemble the pass/fail table in fixed order."""
    jobs = [(slug, n, seed, order, decades) for slug, _ in ROWS]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, mp_context=mp.get_context("spawn")) as ex:
            results = list(ex.map(_run_row, jobs))
    else:
        results = [_run_row(j) for j in jobs]
    table = [r.summary() for r in results]
    traces = {slug: (r.header, r.trace) for (slug, _), r in zip(ROWS, results) if r.header}
    traces["suite"] = (
        ("row", "name", "operation", "method", "passed", "metric", "tolerance"),
        [(slug, r.name, r.operation, r.method, r.passed, r.metric, r.tolerance) for (slug, _), r in zip(ROWS, results)],
    )
    ok = all(r.passed for r in results)
    report = {"command": "reproduce", "operation": "reproduce_paper", "n": n, "seed": seed,
              "passed": ok, "rows": table}
    return ReportBundle(report, traces, ok)
