"""Job documents: JSON schema, validation, and construction of model objects.

A job is one JSON object.  Subjects, fields and gauges are tagged by
``kind``; unknown keys are rejected at every level.
"""

from __future__ import annotations

import copy

import jsonschema

from .errors import ValidationError
from .fields import Anisotropic, FromMap, LogPower, PowerLog, TabulatedRadial
from .maps import ExpIntegral, PlanarPower, PlanarShear, PowerShift, Radial, TabulatedProfile, Twist
from .phi import Power, PowerLogPhi, TabulatedPhi

COMMANDS = ("analyze", "criterion", "fmo", "modulus", "reproduce")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NUM_LIST = {"type": "array", "items": _NUM, "minItems": 2}
_FLAGS = {"bounded": {"type": "boolean"}, "open_discrete_closed": {"type": "boolean"}}


def _variant(kind, props=None, required=()):
    props = dict(props or {})
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, **props},
        "required": ["kind", *required],
        "additionalProperties": False,
    }


FIELD_SCHEMA = {
    "oneOf": [
        _variant("PowerLog", {"c": _POS, "gamma": _NUM, "s": _NUM}, ["c"]),
        _variant("LogPower", {"a": _NUM, "c": _POS}, ["a"]),
        _variant("Anisotropic", {"axis": {"type": "integer", "minimum": 0}, "weight": _NUM, "offset": _NUM}),
        _variant("TabulatedRadial", {"radii": _NUM_LIST, "values": _NUM_LIST}, ["radii", "values"]),
        _variant("FromMap", {"map": {"$ref": "#/$defs/map"}, "exponent": _NUM,
                             "multiplicity": {"type": "integer", "minimum": 1}}, ["map"]),
    ]
}

MAP_SCHEMA = {
    "oneOf": [
        _variant("PowerShift", {"alpha": _POS, **_FLAGS}, ["alpha"]),
        _variant("ExpIntegral", {"q": {"$ref": "#/$defs/field"}, **_FLAGS}, ["q"]),
        _variant("TabulatedProfile", {"knots": _NUM_LIST, "values": _NUM_LIST, **_FLAGS}, ["knots", "values"]),
        _variant("Twist", {"m": {"type": "integer", "minimum": 1}, **_FLAGS}, ["m"]),
        _variant("PlanarPower", {"k": {"type": "integer", "minimum": 1}, **_FLAGS}, ["k"]),
        _variant("PlanarShear", {"kappa": _NUM, **_FLAGS}, ["kappa"]),
    ]
}

PHI_SCHEMA = {
    "oneOf": [
        _variant("Power", {"p": _NUM}, ["p"]),
        _variant("PowerLogPhi", {"p": _NUM, "s": _NUM}, ["p", "s"]),
        _variant("TabulatedPhi", {"knots": _NUM_LIST, "values": _NUM_LIST}, ["knots", "values"]),
    ]
}

JOB_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"field": FIELD_SCHEMA, "map": MAP_SCHEMA, "phi": PHI_SCHEMA},
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "n": {"type": "integer", "minimum": 2},
        "subject": {"oneOf": [{"$ref": "#/$defs/map"}, {"$ref": "#/$defs/field"}]},
        "phi": {"$ref": "#/$defs/phi"},
        "hypotheses": {
            "type": "object",
            "properties": {
                "bounded": {"type": "boolean"},
                "open_discrete_closed": {"type": "boolean"},
                "limit_sets_disjoint": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "route": {"enum": ["divergence", "fmo"]},
        "points": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2}},
        "ring": {
            "type": "object",
            "properties": {"r1": _POS, "r2": _POS},
            "required": ["r1", "r2"],
            "additionalProperties": False,
        },
        "lower_q": {
            "type": "object",
            "properties": {"eps": _POS, "r0": _POS},
            "required": ["eps", "r0"],
            "additionalProperties": False,
        },
        "options": {
            "type": "object",
            "properties": {
                "quad_order": {"type": "integer", "minimum": 2},
                "eps0": _POS,
                "eps_decades": {"type": "integer", "minimum": 1, "maximum": 300},
                "fd_step": _POS,
                "oracle_grid": {"type": "integer", "minimum": 64},
                "fmo_eps0": _POS,
                "fmo_steps": {"type": "integer", "minimum": 4},
                "seed": {"type": "integer", "minimum": 0},
                "workers": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "json_only": {"type": "boolean"}},
            "additionalProperties": False,
        },
    },
    "required": ["command"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"command": {"enum": ["analyze", "criterion", "fmo"]}}},
         "then": {"required": ["subject"]}},
        {"if": {"properties": {"command": {"const": "analyze"}}}, "then": {"required": ["points"]}},
        {"if": {"properties": {"command": {"const": "modulus"}}}, "then": {"required": ["ring", "n"]}},
    ],
}

DEFAULT_OPTIONS = {
    "quad_order": 16,
    "eps0": 0.5,
    "eps_decades": 8,
    "oracle_grid": 10_000,
    "fmo_eps0": 0.25,
    "fmo_steps": 12,
    "seed": 0,
    "workers": 1,
}

_VALIDATOR = jsonschema.Draft202012Validator(JOB_SCHEMA)


def validate_job(job: dict) -> dict:
    """Validate ``job`` and return a copy with default options filled in."""
    errors = sorted(_VALIDATOR.iter_errors(job), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ValidationError(f"{where}: {e.message}")
    out = copy.deepcopy(job)
    out["options"] = {**DEFAULT_OPTIONS, **job.get("options", {})}
    return out


MAP_KINDS = {"PowerShift", "ExpIntegral", "TabulatedProfile", "Twist", "PlanarPower", "PlanarShear"}


def is_map_config(d: dict) -> bool:
    return d["kind"] in MAP_KINDS


def _flags(d):
    return {k: d[k] for k in ("bounded", "open_discrete_closed") if k in d}


def build_map(d: dict, n: int | None):
    kind = d["kind"]
    if kind in ("PowerShift", "ExpIntegral", "TabulatedProfile") and n is None:
        raise ValidationError(f"{kind} subject needs the dimension n")
    if kind == "PowerShift":
        return Radial(PowerShift(d["alpha"]), n, **_flags(d))
    if kind == "ExpIntegral":
        return Radial(ExpIntegral(build_field(d["q"], n), n), n, **_flags(d))
    if kind == "TabulatedProfile":
        return Radial(TabulatedProfile(tuple(d["knots"]), tuple(d["values"])), n, **_flags(d))
    if kind == "Twist":
        return Twist(d["m"], 3 if n is None else n, **_flags(d))
    if kind == "PlanarPower":
        return PlanarPower(d["k"], **_flags(d))
    if kind == "PlanarShear":
        return PlanarShear(d["kappa"], **_flags(d))
    raise ValidationError(f"unknown map kind {kind!r}")


def build_field(d: dict, n: int | None):
    kind = d["kind"]
    if kind == "PowerLog":
        return PowerLog(d["c"], d.get("gamma", 0.0), d.get("s", 0.0))
    if kind == "LogPower":
        return LogPower(d["a"], d.get("c", 1.0))
    if kind == "Anisotropic":
        return Anisotropic(d.get("axis", 0), d.get("weight", 1.0), d.get("offset", 0.0))
    if kind == "TabulatedRadial":
        return TabulatedRadial(tuple(d["radii"]), tuple(d["values"]))
    if kind == "FromMap":
        return FromMap(build_map(d["map"], n), d.get("exponent", 1.0), d.get("multiplicity", 1))
    raise ValidationError(f"unknown field kind {kind!r}")


def build_subject(d: dict, n: int | None):
    return build_map(d, n) if is_map_config(d) else build_field(d, n)


def build_phi(d: dict):
    kind = d["kind"]
    if kind == "Power":
        return Power(d["p"])
    if kind == "PowerLogPhi":
        return PowerLogPhi(d["p"], d["s"])
    if kind == "TabulatedPhi":
        return TabulatedPhi(tuple(d["knots"]), tuple(d["values"]))
    raise ValidationError(f"unknown gauge kind {kind!r}")
