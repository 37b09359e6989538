"""Command-line entry point: run a JSON job and write report.json / trace-*.csv."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    DomainError,
    IncompleteInputError,
    InvalidDimensionError,
    NotApplicableError,
    UnsupportedVariantError,
    ValidationError,
)
from .report import run_job

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

_INPUT_ERRORS = (
    ValidationError,
    DomainError,
    InvalidDimensionError,
    UnsupportedVariantError,
    NotApplicableError,
    IncompleteInputError,
)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="removability",
        description="Dilatation, divergence-criterion and modulus computations for isolated singularities.",
    )
    ap.add_argument("--config", type=str, help="Path to a JSON job document")
    ap.add_argument("--reproduce", action="store_true", help="Run the fixed reproduction suite (no config needed)")
    ap.add_argument("--n", type=int, default=None, help="Dimension for --reproduce (default 3)")
    ap.add_argument("--out", type=str, default=None, help="Output directory for report.json and trace CSVs")
    ap.add_argument("--quad-order", type=int, default=None, help="Sphere quadrature order")
    ap.add_argument("--eps-decades", type=int, default=None, help="Decades in the epsilon grid")
    ap.add_argument("--seed", type=int, default=None, help="Seed for randomized suite rows")
    ap.add_argument("--workers", type=int, default=None, help="Worker processes for the suite")
    ap.add_argument("--json-only", action="store_true",
                    help="Skip CSV traces; print the JSON report to stdout instead of the summary")
    return ap


def _error(kind: str, exc: Exception, code: int) -> int:
    print(json.dumps({"error": {"type": kind, "class": type(exc).__name__, "message": str(exc)}}), file=sys.stderr)
    return code


def _load_job(args) -> dict:
    if args.config:
        with open(args.config) as fh:
            try:
                job = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"job file is not valid JSON: {exc}") from exc
        if not isinstance(job, dict):
            raise ValidationError("job document must be a JSON object")
    elif args.reproduce:
        job = {"command": "reproduce"}
    else:
        raise ValidationError("either --config or --reproduce is required")
    if args.n is not None:
        job["n"] = args.n
    opts = dict(job.get("options", {}))
    for key, val in (("quad_order", args.quad_order), ("eps_decades", args.eps_decades),
                     ("seed", args.seed), ("workers", args.workers)):
        if val is not None:
            opts[key] = val
    if opts:
        job["options"] = opts
    return job


def _summary(bundle) -> str:
    rep = bundle.report
    cmd = rep.get("command")
    if cmd == "reproduce":
        lines = [f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}  [{r['method']}]" for r in rep["rows"]]
        lines.append(f"{sum(r['passed'] for r in rep['rows'])}/{len(rep['rows'])} rows passed")
        return "\n".join(lines)
    if cmd == "criterion":
        return f"verdict: {rep['verdict']} ({rep['method']})\nconclusion: {rep['conclusion']}\n{rep['summary']}"
    if cmd == "fmo":
        return f"verdict: {rep['verdict']} ({rep['rule']})"
    if cmd == "modulus":
        q = rep["ring"]
        return (f"curve modulus {q['curve_modulus']:.12g}, capacity {q['capacity']:.12g}, "
                f"surface modulus {q['surface_modulus']:.12g}; duality passed: {rep['duality']['passed']}")
    ks = [s["K_I"] for s in rep["samples"]]
    return "K_I at the given points: " + ", ".join(f"{k:.12g}" for k in ks)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = _load_job(args)
        json_only = args.json_only or job.get("output", {}).get("json_only", False)
        out = args.out or job.get("output", {}).get("dir")
        bundle = run_job(job)
    except OSError as exc:
        return _error("validation", exc, EXIT_VALIDATION)
    except _INPUT_ERRORS as exc:
        return _error("validation", exc, EXIT_VALIDATION)
    except Exception as exc:
        return _error("numeric", exc, EXIT_NUMERIC)
    if out:
        bundle.write(out, json_only=json_only)
    if json_only:
        sys.stdout.write(bundle.json_text())
    else:
        print(_summary(bundle))
    return EXIT_OK if bundle.ok else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
