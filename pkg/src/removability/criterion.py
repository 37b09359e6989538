"""The divergence criterion for removability and the decisions built on it.

The criterion integral is ``I(eps, eps0) = int_eps^eps0 dt / (t q(t)^(1/(n-1)))``
for the spherical mean ``q`` of a majorant of the inner dilatation; its
divergence as ``eps -> 0`` (or FMO of the majorant) together with the
topological hypotheses and the Calderon growth condition on the Orlicz
gauge gives a continuous extension to the puncture.

Everything is integrated in ``u = log(1/t)``; with that substitution the
integrand is ``q(e^-u)^(-1/(n-1))`` and the borderline case ``q ~ log^{n-1}``
becomes ``du / u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, IncompleteInputError, NotApplicableError, UnsupportedVariantError
from .fields import FromMap, TabulatedRadial, fmo_classify, spherical_mean
from .geometry import (
    DEFAULT_ORDER,
    AnnulusSpec,
    annulus_rule,
    check_dimension,
    integrate_log_radius,
    unit_sphere_area,
)
from .maps import Radial, extendable_ground_truth, limit_set_at_boundary, limit_set_at_zero, SinglePoint
from .phi import Power, PowerLogPhi, TabulatedPhi

EXPONENT_NOTE = (
    "criterion exponent on the spherical mean is 1/(n-1); this is the exponent "
    "for which the lower modulus bound, the extremal weight and the sharp "
    "radial construction are mutually consistent"
)

DIVERGENCE_FLOOR = 1e-3
GEOMETRIC_RATIO = 0.7
DEFAULT_EPS0 = 0.5
DEFAULT_DECADES = 8

# ---------------------------------------------------------------------------
# the integrand in log-radius coordinates


def _log_q(q) -> Callable[[float], float]:
    """``u -> log q(e^-u)`` for a radial field or a plain callable ``q(t)``."""
    if hasattr(q, "log_value_at") and getattr(q, "is_radial", False):
        return q.log_value_at
    if callable(q):
        def log_q(u):
            val = float(q(math.exp(-u)))
            if not (val > 0):
                raise DomainError(f"q must be positive, got q = {val} at t = {math.exp(-u)}")
            return math.log(val)

        return log_q
    raise UnsupportedVariantError("q must be a radial field or a callable of the radius")


def _integrand(q, n: int) -> Callable[[float], float]:
    log_q = _log_q(q)

    def g(u):
        return math.exp(-log_q(u) / (n - 1))

    return g


def criterion_integral(q, eps: float, eps0: float, n: int) -> float:
    """``int_eps^eps0 dt / (t q(t)^(1/(n-1)))`` with ``u = log(1/t)``.

    ``q`` is a radial field or any positive callable of the radius.
    """
    n = check_dimension(n)
    if not (0 < eps < eps0):
        raise DomainError(f"need 0 < eps < eps0, got eps={eps}, eps0={eps0}")
    return integrate_log_radius(_integrand(q, n), math.log(1.0 / eps0), math.log(1.0 / eps))


def criterion_integral_u(q, u0: float, u1: float, n: int) -> float:
    """Same integral between log-radii ``u0 = log(1/eps0)`` and ``u1 = log(1/eps)``."""
    n = check_dimension(n)
    return integrate_log_radius(_integrand(q, n), u0, u1)


# ---------------------------------------------------------------------------
# divergence classification


@dataclass(frozen=True)
class DivergenceResult:
    """Verdict (Diverges | Converges | Inconclusive), how it was reached, and the trace.

    ``trace`` rows are ``(epsilon, integral, increment)`` on the decade grid;
    ``doubling_trace`` rows are ``(log_inv_epsilon, integral, increment)``.
    """

    verdict: str
    method: str
    rule: str
    trace: tuple = ()
    doubling_trace: tuple = ()


def symbolic_divergence(gamma: float, s: float, n: int) -> str:
    """Closed-form verdict for ``q ~ r^-gamma log(1/r)^s`` near 0.

    After ``u = log(1/t)`` the integrand behaves like
    ``exp(-gamma u/(n-1)) u^(-s/(n-1))``.
    """
    if gamma < 0:
        return "Diverges"
    if gamma > 0:
        return "Converges"
    return "Diverges" if s <= n - 1 else "Converges"


def decade_trace(q, n: int, eps0: float = DEFAULT_EPS0, decades: int = DEFAULT_DECADES) -> tuple:
    """Rows ``(eps_k, I(eps_k, eps0), increment)`` for ``eps_k = eps0 10^-k``.

    Stops early when a tabulated field has no data further down.
    """
    r_min = q.r_min if isinstance(q, TabulatedRadial) else 0.0
    rows = [(eps0, 0.0, 0.0)]
    total = 0.0
    u_prev = math.log(1.0 / eps0)
    for k in range(1, decades + 1):
        eps = eps0 * 10.0**-k
        if eps < r_min * (1 - 1e-12):
            break
        u = math.log(1.0 / eps)
        inc = criterion_integral_u(q, u_prev, u, n)
        total += inc
        rows.append((eps, total, inc))
        u_prev = u
    return tuple(rows)


def classify_decades(rows, floor: float = DIVERGENCE_FLOOR, ratio: float = GEOMETRIC_RATIO) -> tuple[str, str]:
    incs = [r[2] for r in rows[1:]]
    if len(incs) < 5:
        return "Inconclusive", "fewer than 5 decades of data"
    last = incs[-5:]
    ratios = [b / a if a > 0 else 0.0 for a, b in zip(last[:-1], last[1:])]
    if all(x < ratio for x in ratios):
        return "Converges", f"increments decay geometrically (ratio < {ratio}) over 4 steps"
    if all(x >= floor for x in incs):
        return "Diverges", f"increments stay above the floor {floor}"
    return "Inconclusive", "increments neither geometric nor bounded below"


_LOG_OVERFLOW = 700.0


def doubling_trace(q, n: int, u0: float = math.log(2.0), steps: int = 48) -> tuple:
    """Rows ``(u_k, I, increment)`` on ``u_k = u_0 2^k`` (``u = log(1/eps)``).

    Reaches radii like ``exp(-1e14)`` without forming them; increments that
    overflow are recorded as ``inf`` and end the trace.
    """
    log_q = _log_q(q)
    u0 = max(u0, 1.0)
    rows = [(u0, 0.0, 0.0)]
    total = 0.0
    g = _integrand(q, n)
    lo = u0
    for _ in range(steps):
        hi = 2.0 * lo
        if max(-log_q(lo), -log_q(hi)) / (n - 1) > _LOG_OVERFLOW:
            rows.append((hi, math.inf, math.inf))
            break
        inc = integrate_log_radius(g, lo, hi)
        total += inc
        rows.append((hi, total, inc))
        lo = hi
    return tuple(rows)


def classify_doubling(rows, floor: float = DIVERGENCE_FLOOR) -> tuple[str, str]:
    incs = [r[2] for r in rows[1:]]
    if incs and math.isinf(incs[-1]):
        return "Diverges", "increments overflow"
    last = incs[-5:]
    if len(last) < 5:
        return "Inconclusive", "trace too short"
    if all(x == 0.0 for x in last[-2:]):
        return "Converges", "increments underflow to zero"
    ratios = [b / a if a > 0 else 0.0 for a, b in zip(last[:-1], last[1:])]
    if all(x < 0.97 for x in ratios):
        return "Converges", "increments shrink by a factor < 0.97 per doubling of log(1/eps)"
    if all(x >= 0.995 for x in ratios) and last[-1] >= floor:
        return "Diverges", "increments do not shrink along doublings of log(1/eps)"
    return "Inconclusive", "increment ratios between 0.97 and 0.995"


def _asymptotic(q):
    f = getattr(q, "asymptotic", None)
    return f() if callable(f) else None


def classify_divergence(
    q,
    n: int,
    eps0: float = DEFAULT_EPS0,
    decades: int = DEFAULT_DECADES,
    mode: str = "auto",
) -> DivergenceResult:
    """Decide whether ``I(eps, eps0)`` diverges as ``eps -> 0``.

    ``mode="auto"`` uses the closed form whenever the field exposes its
    asymptotic ``(gamma, s)``; otherwise tabulated fields use the decade
    trace and analytic fields the doubling trace in ``log(1/eps)``.
    ``mode`` can force ``"symbolic"``, ``"decades"`` or ``"doubling"``.
    """
    n = check_dimension(n)
    if not getattr(q, "is_radial", False) and not (callable(q) and not hasattr(q, "is_radial")):
        raise UnsupportedVariantError("divergence classification needs a radial q")
    asym = _asymptotic(q)
    trace = decade_trace(q, n, eps0, decades)
    _check_monotone(trace)
    if mode in ("auto", "symbolic") and asym is not None:
        verdict = symbolic_divergence(asym[0], asym[1], n)
        return DivergenceResult(verdict, "Symbolic", f"asymptotic gamma={asym[0]:g}, s={asym[1]:g}", trace)
    if mode == "symbolic":
        raise UnsupportedVariantError("field has no known asymptotic form")
    if mode == "decades" or (mode == "auto" and isinstance(q, TabulatedRadial)):
        verdict, rule = classify_decades(trace)
        return DivergenceResult(verdict, "Numeric", rule, trace)
    if mode not in ("auto", "doubling"):
        raise ValueError(f"unknown mode {mode!r}")
    dtrace = doubling_trace(q, n, u0=math.log(1.0 / eps0))
    verdict, rule = classify_doubling(dtrace)
    return DivergenceResult(verdict, "Numeric", rule, trace, dtrace)


def _check_monotone(trace):
    vals = [r[1] for r in trace]
    if any(b < a for a, b in zip(vals[:-1], vals[1:])):
        raise AssertionError("criterion integrals must not decrease as eps decreases")


# ---------------------------------------------------------------------------
# Calderon condition


@dataclass(frozen=True)
class CalderonResult:
    verdict: str
    method: str
    rule: str
    trace: tuple = ()


def calderon_check(phi, n: int) -> CalderonResult:
    """Finiteness of ``int_1^inf (t / phi(t))^(1/(n-2)) dt`` (needs ``n >= 3``)."""
    n = check_dimension(n)
    if n == 2:
        raise NotApplicableError("the Calderon condition is not used in the plane (n = 2)")
    if isinstance(phi, Power):
        # integrand t^((1-p)/(n-2)); finite iff the exponent is < -1
        ok = phi.p > n - 1
        return CalderonResult("Holds" if ok else "Fails", "Symbolic", f"p={phi.p:g} vs n-1={n - 1}")
    if isinstance(phi, PowerLogPhi):
        if phi.p > n - 1:
            ok = True
        elif phi.p < n - 1:
            ok = False
        else:
            ok = phi.s / (n - 2) > 1
        return CalderonResult("Holds" if ok else "Fails", "Symbolic", f"p={phi.p:g}, s={phi.s:g}, n={n}")
    if isinstance(phi, TabulatedPhi):
        return _calderon_tabulated(phi, n)
    raise UnsupportedVariantError(f"unsupported gauge {type(phi).__name__}")


CALDERON_T_MAX = 1e12


def _calderon_tabulated(phi: TabulatedPhi, n: int) -> CalderonResult:
    t = np.asarray(phi.knots)
    v = np.asarray(phi.values)
    if t[-1] <= 1.0:
        return CalderonResult("Inconclusive", "Numeric", "no data beyond t = 1")
    # tail model phi ~ A t^p fitted on the last (up to) five knots
    tail = slice(max(0, t.size - 5), t.size)
    lt, lv = np.log(t[tail]), np.log(v[tail])
    if lt.size < 3:
        return CalderonResult("Inconclusive", "Numeric", "fewer than 3 tail knots")
    p, loga = np.polyfit(lt, lv, 1)
    resid = lv - (p * lt + loga)
    r2 = 1.0 - np.sum(resid**2) / max(np.sum((lv - lv.mean()) ** 2), 1e-300)
    expo = (1.0 - p) / (n - 2)
    lo = max(1.0, t[0])
    data_part, _ = integrate.quad(lambda s: (s / float(phi(s))) ** (1.0 / (n - 2)), lo, t[-1], limit=400)
    A = math.exp(loga)
    if abs(expo + 1.0) < 1e-9:
        tail_val = A ** (-1.0 / (n - 2)) * math.log(CALDERON_T_MAX / t[-1])
    else:
        tail_val = A ** (-1.0 / (n - 2)) * (CALDERON_T_MAX ** (expo + 1) - t[-1] ** (expo + 1)) / (expo + 1)
    trace = ((float(t[-1]), data_part), (CALDERON_T_MAX, data_part + tail_val))
    if r2 < 0.999 or abs(expo + 1.0) < 0.05:
        return CalderonResult("Inconclusive", "Numeric", f"tail fit p={p:.4g}, R^2={r2:.5f}", trace)
    verdict = "Holds" if expo < -1.0 else "Fails"
    return CalderonResult(verdict, "Numeric", f"power-law tail p={p:.4g}, exponent {expo:.4g}", trace)


# ---------------------------------------------------------------------------
# extremal weight and the weighted ring integral


def mean_function(Q, x0=None, n: Optional[int] = None, order: int = DEFAULT_ORDER) -> Callable[[float], float]:
    """``r -> q_{x0}(r)`` for any field; radial fields at the origin short-circuit."""
    if x0 is None:
        if n is None:
            raise DomainError("need x0 or n")
        x0 = np.zeros(n)
    x0 = np.asarray(x0, dtype=float)
    if getattr(Q, "is_radial", False) and not np.any(x0):
        return lambda r: float(Q.radial(r))
    return lambda r: spherical_mean(Q, x0, r, order=order)


@dataclass(frozen=True, eq=False)
class ExtremalEta:
    """``eta_0(r) = 1 / (I r q(r)^(1/(n-1)))`` together with ``I``."""

    q: Callable[[float], float]
    r1: float
    r2: float
    n: int
    I: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        qv = np.vectorize(lambda t: float(self.q(t)))(r)
        return 1.0 / (self.I * r * qv ** (1.0 / (self.n - 1)))


def extremal_eta(q, r1: float, r2: float, n: int) -> ExtremalEta:
    """Extremal radial weight on ``(r1, r2)``; ``int_{r1}^{r2} eta_0 = 1``."""
    n = check_dimension(n)
    if not (0 < r1 < r2):
        raise DomainError(f"need 0 < r1 < r2, got {r1}, {r2}")
    qf = (lambda r: float(q.radial(r))) if getattr(q, "is_radial", False) else q
    I = criterion_integral(q, r1, r2, n)
    if not (I > 0):
        raise DomainError("degenerate interval: I = 0")
    return ExtremalEta(qf, r1, r2, n, I)


def weighted_ring_integral(Q, eta, annulus: AnnulusSpec, order: int = DEFAULT_ORDER,
                           panels: int = 8, breaks=()) -> float:
    """``int_A Q(x) eta(|x - x0|)^n dm`` over the ring ``A``.

    Radial fields centred at the ring centre reduce to a 1-D adaptive
    integral; other fields use the ring quadrature.
    """
    n = annulus.dim
    c = annulus.center
    if getattr(Q, "is_radial", False) and not np.any(c):
        def g(r):
            return float(Q.radial(r)) * float(eta(r)) ** n * r ** (n - 1)

        pts = sorted({annulus.r1, annulus.r2, *[b for b in breaks if annulus.r1 < b < annulus.r2]})
        val = sum(
            integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-12, limit=400)[0]
            for a, b in zip(pts[:-1], pts[1:])
        )
        return unit_sphere_area(n) * val
    rule = annulus_rule(annulus, order=order, panels=panels, breaks=breaks)
    r = np.linalg.norm(rule.nodes - c, axis=1)
    ur, inv = np.unique(r, return_inverse=True)
    eta_vals = np.asarray(eta(ur), dtype=float)[inv]
    return float(np.sum(rule.weights * np.asarray(Q(rule.nodes), dtype=float) * eta_vals**n))


@dataclass(frozen=True, eq=False)
class EtaCandidate:
    """A radial weight on ``(r1, r2)`` and its kinks (for panel placement)."""

    name: str
    func: Callable
    breaks: tuple = ()


def standard_candidates(r1: float, r2: float) -> list[EtaCandidate]:
    """Five fixed alternative weights, each normalised to unit integral on ``(r1, r2)``."""
    L = r2 - r1
    mid = 0.5 * (r1 + r2)
    half = 0.5 * L

    def const(r):
        return np.full_like(np.asarray(r, dtype=float), 1.0 / L)

    def ramp(r):
        return 2.0 * (np.asarray(r, dtype=float) - r1) / L**2

    def reversed_ramp(r):
        return 2.0 * (r2 - np.asarray(r, dtype=float)) / L**2

    cut = r1 + 0.5 * L
    norm_t = math.log(cut / r1)

    def truncated_inv(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= cut, 1.0 / (r * norm_t), 0.0)

    # smooth bump (1 - x^2)^2 on x = (r - mid)/half; integral = 16/15 * half
    def bump(r):
        x = (np.asarray(r, dtype=float) - mid) / half
        return np.where(np.abs(x) < 1, (1 - x * x) ** 2, 0.0) / (16.0 / 15.0 * half)

    return [
        EtaCandidate("constant", const),
        EtaCandidate("linear-ramp", ramp),
        EtaCandidate("truncated-1/t", truncated_inv, (cut,)),
        EtaCandidate("bump", bump),
        EtaCandidate("reversed-ramp", reversed_ramp),
    ]


def normalize_candidate(c: EtaCandidate, r1: float, r2: float) -> EtaCandidate:
    pts = sorted({r1, r2, *[b for b in c.breaks if r1 < b < r2]})
    total = sum(
        integrate.quad(lambda r: float(c.func(r)), a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
        for a, b in zip(pts[:-1], pts[1:])
    )
    if not (abs(total - 1.0) <= 0.01):
        raise DomainError(f"weight {c.name!r} integrates to {total}, not within 1% of 1")
    return EtaCandidate(c.name, lambda r, f=c.func, t=total: f(r) / t, c.breaks)


@dataclass(frozen=True)
class ExtremalityRow:
    name: str
    value: float
    holds: bool


@dataclass(frozen=True)
class ExtremalityReport:
    """Equality at the extremal weight and inequalities for the alternatives."""

    I: float
    closed_form: float
    value_at_eta0: float
    relative_error: float
    equality_holds: bool
    candidates: tuple
    passed: bool

    def to_dict(self):
        return {
            "I": self.I,
            "closed_form": self.closed_form,
            "value_at_eta0": self.value_at_eta0,
            "relative_error": self.relative_error,
            "equality_holds": self.equality_holds,
            "candidates": [vars(c) for c in self.candidates],
            "passed": self.passed,
        }


def verify_extremality(Q, annulus: AnnulusSpec, candidates: Optional[Sequence[EtaCandidate]] = None,
                order: int = DEFAULT_ORDER, rtol: float = 1e-6, slack: float = 1e-9) -> ExtremalityReport:
    """Check ``omega/I^(n-1) = int Q eta_0^n <= int Q eta^n`` on a ring."""
    n = annulus.dim
    r1, r2 = annulus.r1, annulus.r2
    q = mean_function(Q, annulus.center, order=order)
    if getattr(Q, "is_radial", False) and not np.any(annulus.center):
        eta0 = extremal_eta(Q, r1, r2, n)
    else:
        eta0 = extremal_eta(q, r1, r2, n)
    closed = unit_sphere_area(n) / eta0.I ** (n - 1)
    val0 = weighted_ring_integral(Q, eta0, annulus, order=order)
    rel = abs(val0 - closed) / closed
    rows = []
    for cand in candidates if candidates is not None else standard_candidates(r1, r2):
        c = normalize_candidate(cand, r1, r2)
        v = weighted_ring_integral(Q, c.func, annulus, order=order, breaks=c.breaks)
        rows.append(ExtremalityRow(c.name, v, v >= closed * (1 - slack)))
    eq_ok = rel <= rtol
    return ExtremalityReport(eta0.I, closed, val0, rel, eq_ok, tuple(rows), eq_ok and all(r.holds for r in rows))


def fmo_weight_trend(Q, n: int, eps0: float = 0.5, u_values: Sequence[float] = (10, 100, 1e3, 1e4, 1e6)) -> tuple:
    """Rows ``(log(1/eps), scaled, scaled * (log log 1/eps)^(n-1))``.

    ``scaled = I^-n int_{eps<|x|<eps0} Q psi^n dm`` with
    ``psi(t) = 1/(t log(1/t))`` and ``I = log(log(1/eps)/log(1/eps0))``; for an
    FMO majorant the last column stays bounded.
    """
    if not getattr(Q, "is_radial", False):
        raise UnsupportedVariantError("trend is computed for radial fields")
    u0 = math.log(1.0 / eps0)
    omega = unit_sphere_area(n)

    def g(u):
        # q(e^-u) t^(n-1) psi^n dt  ->  q u^-n du
        return math.exp(Q.log_value_at(u) - n * math.log(u))

    rows = []
    for u in u_values:
        if u <= u0:
            continue
        I = math.log(u / u0)
        scaled = omega * integrate_log_radius(g, u0, u) / I**n
        rows.append((float(u), scaled, scaled * math.log(u) ** (n - 1)))
    return tuple(rows)


# ---------------------------------------------------------------------------
# composite verdict

HYPOTHESES = ("bounded", "open_discrete_closed", "limit_sets_disjoint")


@dataclass
class CriterionReport:
    """Outcome of the decision chain for one subject."""

    n: int
    epsilons: list
    integrals: list
    increments: list
    verdict: str
    method: str
    route: str
    hypotheses: dict
    calderon: Optional[str]
    conclusion: str
    extendable: Optional[bool]
    summary: str
    ground_truth: Optional[bool] = None
    agreement: Optional[bool] = None
    missing: list = field(default_factory=list)
    rule: str = ""
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "route": self.route,
            "verdict": self.verdict,
            "method": self.method,
            "rule": self.rule,
            "calderon": self.calderon,
            "hypotheses": dict(self.hypotheses),
            "missing": list(self.missing),
            "conclusion": self.conclusion,
            "extendable": self.extendable,
            "ground_truth": self.ground_truth,
            "agreement": self.agreement,
            "summary": self.summary,
            "notes": list(self.notes),
            "trace": [
                {"epsilon": e, "integral": i, "increment": d}
                for e, i, d in zip(self.epsilons, self.integrals, self.increments)
            ],
        }

    def trace_rows(self):
        return list(zip(self.epsilons, self.integrals, self.increments))


def _map_hypotheses(spec) -> dict:
    hyp = {"bounded": bool(spec.bounded), "open_discrete_closed": bool(spec.open_discrete_closed)}
    if isinstance(spec, Radial):
        at0 = limit_set_at_zero(spec)
        at_bd = limit_set_at_boundary(spec)
        if isinstance(at0, SinglePoint):
            hyp["limit_sets_disjoint"] = True
        else:
            hyp["limit_sets_disjoint"] = not math.isclose(at0.radius, at_bd.radius, rel_tol=1e-12)
    return hyp


def removability_verdict(
    subject,
    phi=None,
    n: Optional[int] = None,
    hypotheses: Optional[dict] = None,
    route: str = "divergence",
    eps0: float = DEFAULT_EPS0,
    decades: int = DEFAULT_DECADES,
    order: int = DEFAULT_ORDER,
    strict: bool = False,
) -> CriterionReport:
    """Run the decision chain on a map or a majorant field.

    Steps: Calderon condition on ``phi`` (``n >= 3`` only), the hypothesis
    flags, then the divergence classifier (``route="divergence"``) or the
    FMO classifier (``route="fmo"``).  Missing flags never pass silently:
    the report comes back with ``conclusion="incomplete-input"`` (or
    :class:`IncompleteInputError` is raised when ``strict``).  For radial
    maps the conclusion is cross-checked against the exact cluster set.
    """
    is_map = hasattr(subject, "multiplicity") and hasattr(subject, "dim") and not hasattr(subject, "radial")
    hyp = {}
    ground_truth = None
    notes = [EXPONENT_NOTE]
    if is_map:
        spec = subject
        n = spec.dim if n is None else n
        Q = FromMap(spec)
        hyp.update(_map_hypotheses(spec))
        if isinstance(spec, Radial):
            ground_truth = extendable_ground_truth(spec)
    else:
        Q = subject
        if n is None:
            n = getattr(Q, "n", None)
        if n is None:
            raise DomainError("dimension n is required for a field subject")
    n = check_dimension(n)
    hyp.update(hypotheses or {})
    missing = [h for h in HYPOTHESES if h not in hyp]

    calderon = None
    if n >= 3:
        if phi is None:
            missing.append("phi")
        else:
            calderon = calderon_check(phi, n).verdict
    else:
        notes.append("planar case: no growth condition on the Orlicz gauge is needed")

    if route == "divergence":
        if getattr(Q, "is_radial", False):
            res = classify_divergence(Q, n, eps0=eps0, decades=decades)
        else:
            # sampled spherical means only exist at representable radii
            qsub = mean_function(Q, np.zeros(n), order=order)
            res = classify_divergence(qsub, n, eps0=eps0, decades=decades, mode="decades")
        verdict, method, rule, trace = res.verdict, res.method, res.rule, res.trace
        holds = verdict == "Diverges"
    elif route == "fmo":
        fres = fmo_classify(Q, np.zeros(n), eps0=min(eps0, 0.25), order=order)
        verdict, method, rule = fres.verdict, "Numeric", fres.rule
        trace = tuple((e, o, 0.0) for e, o in fres.trace)
        holds = verdict == "FMO"
    else:
        raise ValueError(f"unknown route {route!r}")

    eps = [r[0] for r in trace]
    ints = [r[1] for r in trace]
    incs = [r[2] for r in trace]

    if missing:
        if strict:
            raise IncompleteInputError(f"missing inputs: {', '.join(missing)}")
        return CriterionReport(
            n, eps, ints, incs, verdict, method, route, hyp, calderon,
            "incomplete-input", None, f"missing inputs: {', '.join(missing)}",
            ground_truth, None, missing, rule, notes,
        )

    failing = [h for h in HYPOTHESES if not hyp[h]]
    if calderon == "Fails" or calderon == "Inconclusive":
        failing.append("calderon")
    if holds and not failing:
        conclusion, extendable = "extendable", True
        summary = "criterion holds and all hypotheses hold: continuous extension to the puncture"
    else:
        conclusion, extendable = "inconclusive", None
        if failing:
            summary = f"hypotheses fail ({', '.join(failing)}): extension not established"
        else:
            summary = "criterion fails: inconclusive for extension"
    agreement = None
    if ground_truth is not None:
        if extendable:
            agreement = ground_truth is True
            summary += "; ground truth: extendable"
        else:
            agreement = True
            if ground_truth:
                summary += "; ground truth: extendable (the criterion is only sufficient)"
            else:
                summary += "; ground truth: not extendable (sharpness example)"
    return CriterionReport(
        n, eps, ints, incs, verdict, method, route, hyp, calderon,
        conclusion, extendable, summary, ground_truth, agreement, [], rule, notes,
    )
