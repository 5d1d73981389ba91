"""JSON records for time functions, generators and solution families.

Generator record::

    {"algebra": "bplane" | "fplane" | "sphere0" | "sphereOmega",
     "coeffs": {...}, "f": ..., "g": ..., "h": ..., "omega": ...}

Time-function slots accept a number, an expression in ``t`` (for example
``"t**2 + exp(-t)"``) or the term list written by
:meth:`TimeFunction.to_json`.
"""

from __future__ import annotations

import json
import math

import numpy as np
import sympy as sp

from .exceptions import ConfigError
from .generators import BPLANE, FPLANE, SPHERE0, SPHERE_OMEGA, PlaneGenerator, SphereGenerator
from .timefn import TimeFunction, as_timefn

_COEFFS = {
    BPLANE: ("aD", "at", "ay"),
    FPLANE: ("aD1", "aD2", "aJ", "aJt", "at"),
    SPHERE0: ("aD", "at", "a1", "a2", "a3"),
    SPHERE_OMEGA: ("aD", "at", "a1", "a2", "a3"),
}
_FUNCTIONS = {BPLANE: ("f", "g"), FPLANE: ("f", "h", "g"), SPHERE0: ("g",), SPHERE_OMEGA: ("g",)}


def timefn_from_json(data) -> TimeFunction:
    try:
        return as_timefn(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid time function {data!r}: {exc}") from exc


def generator_to_json(v) -> dict:
    alg = v.algebra
    if alg == BPLANE:
        coeffs = {"aD": v.aD, "at": v.at, "ay": v.ay}
    elif alg == FPLANE:
        coeffs = {k: getattr(v, k) for k in _COEFFS[FPLANE]}
    else:
        coeffs = {k: getattr(v, k) for k in _COEFFS[alg]}
    out = {"algebra": alg, "coeffs": coeffs}
    for name in _FUNCTIONS[alg]:
        out[name] = getattr(v, name).to_json()
    if alg == SPHERE_OMEGA:
        out["omega"] = v.omega
    return out


def generator_from_json(data: dict):
    """Build a generator from its record; missing coefficients default to zero."""
    if not isinstance(data, dict):
        raise ConfigError("generator record must be an object")
    alg = data.get("algebra")
    if alg not in _COEFFS:
        raise ConfigError(f"unknown algebra {alg!r}; expected one of {sorted(_COEFFS)}")
    unknown = set(data) - {"algebra", "coeffs", "omega", *_FUNCTIONS[alg]}
    coeffs = data.get("coeffs", {})
    unknown |= {f"coeffs.{k}" for k in set(coeffs) - set(_COEFFS[alg])}
    if unknown:
        raise ConfigError(f"unknown keys for {alg} generator: {sorted(unknown)}")
    c = {k: float(coeffs.get(k, 0.0)) for k in _COEFFS[alg]}
    fns = {k: timefn_from_json(data.get(k, 0.0)) for k in _FUNCTIONS[alg]}
    try:
        if alg == BPLANE:
            return PlaneGenerator.beta(c["aD"], c["at"], c["ay"], fns["f"], fns["g"])
        if alg == FPLANE:
            return PlaneGenerator(**c, **fns, flavor=FPLANE)
        omega = float(data.get("omega", 0.0))
        if alg == SPHERE0 and omega:
            raise ConfigError("sphere0 generators have omega = 0")
        if alg == SPHERE_OMEGA and not omega:
            raise ConfigError("sphereOmega generators need a nonzero omega")
        return SphereGenerator(**c, **fns, omega=omega)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def family_from_json(data: dict):
    """``{"id": ..., "params": {...}}``; parameters may also sit next to ``id``."""
    from .solutions import make_family

    if not isinstance(data, dict) or "id" not in data:
        raise ConfigError("family descriptor needs an 'id'")
    params = dict(data.get("params", {}))
    params.update({k: v for k, v in data.items() if k not in ("id", "params")})
    try:
        return make_family(data["id"], params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {data['id']}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def family_to_json(fam) -> dict:
    return {"id": fam.family_id, "params": _plain(fam.params)}


def _plain(obj):
    if isinstance(obj, TimeFunction):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, sp.Basic):
        return float(obj) if obj.is_Number else str(obj)
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return obj


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits.

    Non-finite floats become ``null``.  Key order is preserved, so equal
    inputs give byte-identical output.
    """
    return _encode(_plain(obj), indent, 0)


def _encode(obj, indent, level) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


__all__ = [
    "dumps",
    "family_from_json",
    "family_to_json",
    "generator_from_json",
    "generator_to_json",
    "timefn_from_json",
]
