"""Report bundles: deterministic JSON/CSV serialisation and the job runner."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import config as cfg
from .criterion import removability_verdict
from .differential import sample_dilatation
from .errors import UnsupportedVariantError, ValidationError
from .fields import FromMap, fmo_classify
from .maps import Radial, describe_limit_set, limit_set_at_boundary, limit_set_at_zero
from .modulus import (
    duality_report,
    lower_Q_check_radial,
    ring_quantities,
    variational_radial_modulus_oracle,
)

CRITERION_COLUMNS = ("epsilon", "integral", "increment")
FMO_COLUMNS = ("epsilon", "oscillation")


def format_value(v) -> str:
    """CSV cell text; floats use 17 significant digits so they round-trip."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


@dataclass
class ReportBundle:
    """A JSON report plus named CSV traces ``name -> (header, rows)``."""

    report: dict
    traces: dict = field(default_factory=dict)
    ok: bool = True

    def json_text(self) -> str:
        return json.dumps(to_jsonable(self.report), indent=2, sort_keys=True) + "\n"

    def csv_texts(self) -> dict:
        return {name: csv_text(h, rows) for name, (h, rows) in sorted(self.traces.items())}

    def write(self, out_dir: str, json_only: bool = False) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        doc = to_jsonable(self.report)
        doc["meta"] = {"generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
        paths = [os.path.join(out_dir, "report.json")]
        with open(paths[0], "w") as fh:
            fh.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        if not json_only:
            for name, text in self.csv_texts().items():
                p = os.path.join(out_dir, f"trace-{name}.csv")
                with open(p, "w", newline="") as fh:
                    fh.write(text)
                paths.append(p)
        return paths


# ---------------------------------------------------------------------------
# job dispatch


def _analyze(job) -> ReportBundle:
    n = job.get("n")
    if not cfg.is_map_config(job["subject"]):
        raise ValidationError("analyze needs a map subject")
    spec = cfg.build_map(job["subject"], n)
    h = job["options"].get("fd_step")
    samples, rows = [], []
    for x in job["points"]:
        a = sample_dilatation(spec, x, method="analytic")
        f = sample_dilatation(spec, x, method="fd", h=h)
        d = a.to_dict()
        d["K_I_fd"] = f.K_I
        d["method"] = "Symbolic"
        d["method_fd"] = "Quadrature"
        samples.append(d)
        rows.append((*[float(v) for v in x], a.K_I, f.K_I, a.jac_det_abs))
    report = {"command": "analyze", "operation": "sample_dilatation", "n": spec.dim, "samples": samples}
    if isinstance(spec, Radial):
        report["limit_set_at_zero"] = describe_limit_set(limit_set_at_zero(spec))
        report["limit_set_at_boundary"] = describe_limit_set(limit_set_at_boundary(spec))
    header = (*[f"x{i}" for i in range(spec.dim)], "K_I_analytic", "K_I_fd", "jac_det_abs")
    return ReportBundle(report, {"analyze": (header, rows)})


def _criterion(job) -> ReportBundle:
    opts = job["options"]
    n = job.get("n")
    subject = cfg.build_subject(job["subject"], n)
    phi = cfg.build_phi(job["phi"]) if "phi" in job else None
    route = job.get("route", "divergence")
    rep = removability_verdict(
        subject, phi, n, job.get("hypotheses"), route=route,
        eps0=opts["eps0"], decades=opts["eps_decades"], order=opts["quad_order"],
    )
    body = {"command": "criterion", "operation": "removability_verdict", **rep.to_dict()}
    if route == "fmo":
        traces = {"criterion": (FMO_COLUMNS, [(e, v) for e, v, _ in rep.trace_rows()])}
    else:
        traces = {"criterion": (CRITERION_COLUMNS, rep.trace_rows())}
    return ReportBundle(body, traces)


def _fmo(job) -> ReportBundle:
    opts = job["options"]
    n = job.get("n")
    Q = cfg.build_subject(job["subject"], n)
    if cfg.is_map_config(job["subject"]):
        Q = FromMap(Q)
    n = n if n is not None else getattr(Q, "n", None)
    if n is None:
        raise ValidationError("fmo job needs n for a field subject")
    res = fmo_classify(Q, np.zeros(n), eps0=opts["fmo_eps0"], K=opts["fmo_steps"], order=opts["quad_order"])
    body = {"command": "fmo", "operation": "fmo_classify", "verdict": res.verdict, "rule": res.rule,
            "method": "Quadrature", "trace": [{"epsilon": e, "oscillation": o} for e, o in res.trace]}
    return ReportBundle(body, {"fmo": (FMO_COLUMNS, list(res.trace))})


def _modulus(job) -> ReportBundle:
    opts = job["options"]
    n = job["n"]
    r1, r2 = job["ring"]["r1"], job["ring"]["r2"]
    q = ring_quantities(r1, r2, n)
    dual = duality_report(r1, r2, n)
    grid = opts["oracle_grid"]
    oracle = variational_radial_modulus_oracle(r1, r2, n, grid)
    rows = []
    g = 64
    while g < grid:
        v = variational_radial_modulus_oracle(r1, r2, n, g)
        rows.append((g, v, abs(v - q.curve_modulus) / q.curve_modulus))
        g *= 4
    rows.append((grid, oracle, abs(oracle - q.curve_modulus) / q.curve_modulus))
    body = {
        "command": "modulus",
        "operation": "ring_quantities",
        "ring": q.to_dict(),
        "duality": dual.to_dict(),
        "oracle": {"grid": grid, "value": oracle, "relative_error": rows[-1][2], "method": "Oracle"},
    }
    if "lower_q" in job:
        if "subject" not in job or not cfg.is_map_config(job["subject"]):
            raise ValidationError("lower_q needs a radial map subject")
        spec = cfg.build_map(job["subject"], n)
        if not isinstance(spec, Radial):
            raise UnsupportedVariantError("lower_q needs a radial map subject")
        Q = FromMap(spec, exponent=1.0 / (n - 1))
        chk = lower_Q_check_radial(spec, Q, job["lower_q"]["eps"], job["lower_q"]["r0"], n)
        body["lower_q"] = chk.to_dict()
    return ReportBundle(body, {"modulus-oracle": (("grid_size", "oracle", "relative_error"), rows)})


def run_job(job: dict) -> ReportBundle:
    """Validate a job document and dispatch it to the owning module."""
    job = cfg.validate_job(job)
    cmd = job["command"]
    if cmd == "analyze":
        return _analyze(job)
    if cmd == "criterion":
        return _criterion(job)
    if cmd == "fmo":
        return _fmo(job)
    if cmd == "modulus":
        return _modulus(job)
    from .suite import reproduce_paper

    opts = job["options"]
    return reproduce_paper(job.get("n", 3), workers=opts["workers"], seed=opts["seed"],
                           order=opts["quad_order"], decades=opts["eps_decades"])


__all__ = ["ReportBundle", "run_job", "csv_text", "format_value", "to_jsonable"]
