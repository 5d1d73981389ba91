"""Command-line entry point.

Every subcommand reads one JSON config (``--config PATH`` or inline JSON),
validates it against the schema printed by ``vortsym schema <subcommand>``
and writes its results to ``--out`` (JSON reports and CSV tables).

Exit codes: 0 pass, 1 quantitative failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np
import sympy as sp

from . import classify as cl
from . import simulate as sim
from . import verify as vf
from .exceptions import ConfigError, VortsymError
from .fields import PLANE, SPHERE, Field, base_symbols
from .generators import discrete_symmetry, flow, frame_transform, plane_basis, pushforward, sphere_basis
from .io import dumps, family_from_json, family_to_json, generator_from_json, generator_to_json, timefn_from_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
# accepted coarse/fine residual ratio for a second-order scheme
CONVERGENCE_BAND = (3.5, 4.5)

# ----------------------------------------------------------------------
# schemas
# ----------------------------------------------------------------------

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_TIMEFN = {"type": ["number", "string", "array"]}
_TIMES = {"type": "array", "items": _NUM, "minItems": 1}

_FAMILY = {
    "type": "object",
    "required": ["id"],
    "properties": {"id": {"type": "string"}, "params": {"type": "object"}},
}
_LIFT = {
    "type": "object",
    "required": ["case", "v"],
    "additionalProperties": False,
    "properties": {
        "case": {"enum": list(vf.REDUCED_CASES)},
        "v": {"type": "string"},
        "params": {"type": "object"},
    },
}
_PSI = {
    "type": "object",
    "required": ["expr"],
    "additionalProperties": False,
    "properties": {"expr": {"type": "string"}, "geometry": {"enum": [PLANE, SPHERE]}},
}
_PLANE_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"const": PLANE},
        "x0": _NUM, "x1": _NUM, "nx": _INT, "y0": _NUM, "y1": _NUM, "ny": _INT, "times": _TIMES,
    },
}
_SPHERE_GRID = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"const": SPHERE},
        "nlam": _INT, "nmu": _INT, "delta": _NUM, "times": _TIMES, "radius": _NUM, "omega": _NUM,
        "periodic": {"type": "boolean"}, "lam0": _NUM, "lam1": _NUM,
    },
}
_SOURCE = {
    "family": _FAMILY,
    "lift": _LIFT,
    "psi": _PSI,
}
_GENERATOR = {"type": "object", "required": ["algebra"]}
_BASIS = {
    "type": "object",
    "required": ["basis"],
    "additionalProperties": False,
    "properties": {
        "basis": {"type": "string"},
        "algebra": {"enum": ["bplane", "fplane", "sphere0", "sphereOmega"]},
        "function": _TIMEFN,
        "omega": _NUM,
    },
}

SCHEMAS = {
    "verify": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            **_SOURCE,
            "perturbation": {"type": "string"},
            "grid": {"oneOf": [_PLANE_GRID, _SPHERE_GRID]},
            "beta": _NUM,
            "omega": _NUM,
            "mode": {"enum": [vf.ANALYTIC, vf.FD]},
            "convergence": {"type": "boolean"},
            "tol": _NUM,
        },
        "oneOf": [{"required": ["family"]}, {"required": ["lift"]}, {"required": ["psi"]}],
    },
    "classify": {
        "type": "object",
        "required": ["generator"],
        "additionalProperties": False,
        "properties": {"generator": _GENERATOR, "domain": {"enum": ["t>0", "t<0"]}},
    },
    "adjoint": {
        "type": "object",
        "required": ["v", "eps", "w"],
        "additionalProperties": False,
        "properties": {
            "v": _BASIS,
            "eps": _NUM,
            "w": _GENERATOR,
            "order": {"type": "integer", "minimum": 1},
            "steps": {"type": "integer", "minimum": 1},
            "tol": _NUM,
        },
    },
    "transform": {
        "type": "object",
        "required": ["family"],
        "additionalProperties": False,
        "properties": {
            "family": _FAMILY,
            "flows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["basis", "eps"],
                    "additionalProperties": False,
                    "properties": {"basis": {"type": "string"}, "eps": _NUM, "function": _TIMEFN},
                },
            },
            "discrete": {"type": "array", "items": {"enum": [1, 2]}},
            "frame": {"enum": ["toRest", "toRotating"]},
            "frame_omega": _NUM,
            "grid": {"oneOf": [_PLANE_GRID, _SPHERE_GRID]},
            "tol": _NUM,
        },
    },
    "sample": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            **_SOURCE,
            "grid": {"oneOf": [_PLANE_GRID, _SPHERE_GRID]},
            "random_points": {"type": "integer", "minimum": 1},
            "beta": _NUM,
            "omega": _NUM,
        },
        "oneOf": [{"required": ["family"]}, {"required": ["lift"]}, {"required": ["psi"]}],
    },
    "simulate": {
        "type": "object",
        "required": ["Lx", "Ly", "nx", "ny", "beta", "dt", "steps", "init"],
        "additionalProperties": False,
        "properties": {
            "Lx": _NUM, "Ly": _NUM, "nx": _INT, "ny": _INT, "beta": _NUM, "dt": _NUM,
            "steps": {"type": "integer", "minimum": 0},
            "init": {"oneOf": [_FAMILY, _PSI]},
            "sample_every": {"type": "integer", "minimum": 1},
            "wavevector": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            "snapshots": {"type": "boolean"},
            "tol": _NUM,
        },
    },
}


# ----------------------------------------------------------------------
# config plumbing
# ----------------------------------------------------------------------

def load_config(text_or_path: str | None, subcommand: str) -> dict:
    if text_or_path is None:
        raise ConfigError("--config is required")
    src = text_or_path.strip()
    try:
        if src.startswith("{"):
            cfg = json.loads(src)
        else:
            cfg = json.loads(Path(src).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        jsonschema.validate(cfg, SCHEMAS[subcommand])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    return cfg


def _resolution(text: str | None):
    if text is None:
        return None
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"--resolution expects NX[,NY], got {text!r}") from None
    if len(parts) not in (1, 2) or min(parts) < 4:
        raise ConfigError(f"--resolution expects NX[,NY] with entries >= 4, got {text!r}")
    return (parts[0], parts[-1] if len(parts) == 2 else parts[0])


def _source_field(cfg: dict):
    """Field plus beta/omega defaults from a family, lift or expression."""
    if "family" in cfg:
        fam = family_from_json(cfg["family"])
        return fam.field, fam.beta, fam.omega or 0.0, family_to_json(fam)
    if "lift" in cfg:
        spec = cfg["lift"]
        params = dict(spec.get("params", {}))
        try:
            fld = vf.lift(spec["case"], spec["v"], params)
        except (ValueError, TypeError, sp.SympifyError) as exc:
            raise ConfigError(f"bad lift descriptor: {exc}") from exc
        return fld, params.get("beta", 1.0), 0.0, {"lift": spec}
    spec = cfg["psi"]
    geometry = spec.get("geometry", PLANE)
    names = {str(s): s for s in base_symbols(geometry)}
    names["lam"] = names.get("lambda")
    try:
        expr = sp.sympify(spec["expr"], locals={k: v for k, v in names.items() if v is not None})
    except sp.SympifyError as exc:
        raise ConfigError(f"cannot parse psi: {exc}") from exc
    if expr.free_symbols - set(base_symbols(geometry)):
        raise ConfigError(f"psi may only depend on {[str(s) for s in base_symbols(geometry)]}")
    return Field(expr, geometry, label="psi"), None, 0.0, {"psi": spec}


def _grid(spec: dict | None, geometry: str, resolution, omega: float):
    spec = dict(spec or {})
    kind = spec.pop("kind", geometry)
    if kind != geometry:
        raise ConfigError(f"{kind} grid given for a {geometry} field")
    if geometry == PLANE:
        spec.setdefault("times", [0.0, 0.05, 0.1])
        if resolution:
            spec["nx"], spec["ny"] = resolution
        try:
            return vf.PlaneGrid(**spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    spec.setdefault("times", [0.0, 0.05, 0.1])
    spec.setdefault("omega", omega)
    if resolution:
        spec["nlam"], spec["nmu"] = resolution
    try:
        return vf.SphereGrid(**spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write(out: Path | None, name: str, text: str):
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _emit(args, name: str, payload) -> str:
    text = dumps(payload) + "\n"
    _write(args.out, name, text)
    sys.stdout.write(text)
    return text


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_verify(cfg: dict, args) -> int:
    fld, beta, omega, source = _source_field(cfg)
    if "perturbation" in cfg:
        try:
            extra = sp.sympify(cfg["perturbation"], locals={str(s): s for s in fld.symbols})
        except sp.SympifyError as exc:
            raise ConfigError(f"cannot parse perturbation: {exc}") from exc
        fld = Field(fld.expr + extra, fld.geometry, fld.domain, fld.label + " (perturbed)")
    beta = float(cfg.get("beta", 1.0 if beta is None else beta))
    omega = float(cfg.get("omega", omega))
    grid = _grid(cfg.get("grid"), fld.geometry, args.resolution, omega)
    mode = cfg.get("mode", vf.ANALYTIC)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-9))
    if cfg.get("convergence"):
        kw = {"beta": beta} if fld.geometry == PLANE else {"omega": omega}
        report = vf.fd_convergence(fld, grid, **kw)
    elif fld.geometry == PLANE:
        report = vf.residual_plane(fld, grid, beta=beta, mode=mode)
    else:
        report = vf.residual_sphere(fld, grid, omega=omega, mode=mode)
    if cfg.get("convergence"):
        ratio = report.convergence_ratio
        passed = ratio is not None and CONVERGENCE_BAND[0] <= ratio <= CONVERGENCE_BAND[1]
        criterion = {"convergence_band": list(CONVERGENCE_BAND)}
    else:
        passed = report.max_norm <= tol
        criterion = {"tol": tol}
    _emit(args, "report.json", {"source": source, **criterion, "pass": passed, "report": report.to_json()})
    return EXIT_OK if passed else EXIT_FAIL


def cmd_classify(cfg: dict, args) -> int:
    v = generator_from_json(cfg["generator"])
    report = cl.normalize_1d(v, domain=cfg.get("domain", "t>0"))
    _emit(args, "classification.json", report.to_json())
    return EXIT_OK


def _basis_generator(spec: dict, like):
    name = spec["basis"]
    fn = timefn_from_json(spec["function"]) if "function" in spec else None
    algebra = spec.get("algebra", like.algebra)
    try:
        if algebra in ("bplane", "fplane"):
            return plane_basis(name, fn, flavor=algebra)
        return sphere_basis(name, fn, omega=float(spec.get("omega", getattr(like, "omega", 0.0))))
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_adjoint(cfg: dict, args) -> int:
    w = generator_from_json(cfg["w"])
    v = _basis_generator(cfg["v"], w)
    eps = float(cfg["eps"])
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-6))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cl.AdjointFallbackWarning)
        closed = cl.adjoint_closed(v, eps, w)
    series = cl.adjoint_series(v, eps, w, order=int(cfg.get("order", 12)))
    oracle = cl.adjoint_ode_oracle(v, eps, w, steps=int(cfg.get("steps", 200)))
    domain = _common_domain(v, w)
    results = {"closed": closed, "series": series, "oracle": oracle}
    diffs = {}
    names = list(results)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            diffs[f"{a}-{b}"] = max(cl.distance(results[a], results[b], domain))
    worst = max(diffs.values())
    payload = {
        **{k: generator_to_json(r) for k, r in results.items()},
        "pairwise_difference": diffs,
        "max_pairwise_difference": worst,
        "closed_form_fallback": bool(caught),
        "pass": worst <= tol,
    }
    _emit(args, "adjoint.json", payload)
    return EXIT_OK if worst <= tol else EXIT_FAIL


def _common_domain(*gens):
    for g in gens:
        for fn in g.functions():
            if fn.domain:
                return fn.domain
    return None


def cmd_transform(cfg: dict, args) -> int:
    fam = family_from_json(cfg["family"])
    fld = fam.field
    omega = fam.omega or 0.0
    applied = []
    for spec in cfg.get("flows", []):
        fn = timefn_from_json(spec["function"]) if "function" in spec else None
        try:
            if fld.geometry == PLANE:
                v = plane_basis(spec["basis"], fn)
            else:
                v = sphere_basis(spec["basis"], fn, omega=omega)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        fld = pushforward(flow(v, float(spec["eps"])), fld)
        applied.append(spec)
    for which in cfg.get("discrete", []):
        fld = pushforward(discrete_symmetry(fld.geometry, int(which)), fld)
        applied.append({"discrete": which})
    if "frame" in cfg:
        if fld.geometry != SPHERE:
            raise ConfigError("frame changes apply to sphere families only")
        if cfg["frame"] == "toRest":
            if not omega:
                raise ConfigError("family is already in the rest frame")
            fld, omega = frame_transform(fld, omega, "toRest"), 0.0
        else:
            if omega or "frame_omega" not in cfg:
                raise ConfigError("toRotating needs a rest-frame family and 'frame_omega'")
            omega = float(cfg["frame_omega"])
            fld = frame_transform(fld, omega, "toRotating")
        applied.append({"frame": cfg["frame"], "omega": omega})
    grid = _grid(cfg.get("grid"), fld.geometry, args.resolution, omega)
    if fld.geometry == SPHERE:
        grid = replace(grid, omega=omega)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-9))
    rows = vf.field_table(fld, grid, beta=fam.beta or 1.0, omega=omega)
    _write_table(args, "field.csv", rows, fld.geometry)
    res = float(np.max(np.abs(rows[:, 5]))) if len(rows) else 0.0
    passed = res <= tol
    summary = {"family": family_to_json(fam), "applied": applied, "max_residual": res, "tol": tol, "pass": passed}
    _emit(args, "transform.json", summary)
    return EXIT_OK if passed else EXIT_FAIL


def _write_table(args, name, rows, geometry):
    if args.out is None:
        return
    args.out.mkdir(parents=True, exist_ok=True)
    vf.write_field_csv(args.out / name, rows, geometry)


def cmd_sample(cfg: dict, args) -> int:
    fld, beta, omega, source = _source_field(cfg)
    beta = float(cfg.get("beta", 1.0 if beta is None else beta))
    omega = float(cfg.get("omega", omega))
    grid = _grid(cfg.get("grid"), fld.geometry, args.resolution, omega)
    if "random_points" in cfg:
        rows = _random_rows(fld, grid, int(cfg["random_points"]), args.seed, beta, omega)
    else:
        rows = vf.field_table(fld, grid, beta=beta, omega=omega)
    _write_table(args, "field.csv", rows, fld.geometry)
    _emit(args, "sample.json", {"source": source, "rows": int(len(rows)), "seed": args.seed})
    return EXIT_OK


def _random_rows(fld, grid, n, seed, beta, omega):
    rng = np.random.default_rng(seed)
    times = np.asarray(grid.times)
    t = rng.choice(times, size=n)
    if isinstance(grid, vf.PlaneGrid):
        a = rng.uniform(grid.x0, grid.x1, n)
        b = rng.uniform(grid.y0, grid.y1, n)
        zeta = sp.diff(fld.expr, base_symbols(PLANE)[1], 2) + sp.diff(fld.expr, base_symbols(PLANE)[2], 2)
        res = vf.plane_residual_expr(fld.expr, beta)
    else:
        lam, mu = grid.axes()
        a = rng.uniform(lam[0], lam[-1], n)
        b = rng.uniform(mu[0], mu[-1], n)
        zeta = vf.sphere_vorticity_expr(fld.expr, grid.radius)
        res = vf.sphere_residual_expr(fld.expr, omega, grid.radius)
    fld.check_domain(t, a, b)
    cols = [t, a, b, fld(t, a, b), vf._eval(zeta, fld.symbols, t, a, b), vf._eval(res, fld.symbols, t, a, b)]
    return np.column_stack(cols)


def cmd_simulate(cfg: dict, args) -> int:
    nx, ny = args.resolution or (int(cfg["nx"]), int(cfg["ny"]))
    try:
        grid = sim.PeriodicGrid(float(cfg["Lx"]), float(cfg["Ly"]), nx, ny)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    x, y = grid.mesh()
    init = cfg["init"]
    if "expr" in init:
        fld, _, _, _ = _source_field({"psi": {**init, "geometry": PLANE}})
    else:
        fld = family_from_json(init).field
        if fld.geometry != PLANE:
            raise ConfigError("simulation needs a plane initial condition")
    psi0 = fld(np.zeros_like(x), x, y)
    state = sim.initial_state(psi0, grid, float(cfg["beta"]), float(cfg["dt"]))
    every = int(cfg.get("sample_every", 10))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", sim.CFLWarning)
        state, traj = sim.run(state, int(cfg["steps"]), sample_every=every)
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        with open(args.out / "diagnostics.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "energy", "enstrophy", "mean_zeta"])
            for row in traj.diagnostics_rows():
                w.writerow([format(float(v), ".17g") for v in row])
        if cfg.get("snapshots"):
            _write_snapshots(args.out / "snapshots.csv", traj)
    e0, ens0 = traj.energy[0], traj.enstrophy[0]
    summary = {
        "t_final": state.t,
        "steps": int(cfg["steps"]),
        "cfl_warnings": len(caught),
        "energy_drift": _rel(traj.energy[-1], e0),
        "enstrophy_drift": _rel(traj.enstrophy[-1], ens0),
    }
    passed = True
    if "wavevector" in cfg:
        k, l = map(float, cfg["wavevector"])
        tol = args.tol if args.tol is not None else float(cfg.get("tol", 0.02))
        measured = sim.measure_phase_speed(traj, (k, l))
        expected = sim.rossby_phase_speed(k, l, float(cfg["beta"]))
        rel = abs(measured - expected) / abs(expected)
        passed = rel <= tol
        summary.update(phase_speed=measured, expected_phase_speed=expected, relative_error=rel, tol=tol, ok=passed)
    _emit(args, "simulate.json", summary)
    return EXIT_OK if passed else EXIT_FAIL


def _rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a - b)


def _write_snapshots(path, traj):
    x, y = traj.grid.mesh()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y", "zeta"])
        for t, z in zip(traj.times, traj.zeta):
            for xi, yi, zi in zip(x.ravel(), y.ravel(), z.ravel()):
                w.writerow([format(float(v), ".17g") for v in (t, xi, yi, zi)])


COMMANDS = {
    "verify": cmd_verify,
    "classify": cmd_classify,
    "adjoint": cmd_adjoint,
    "transform": cmd_transform,
    "sample": cmd_sample,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vortsym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run {name}")
        p.add_argument("--config", help="config JSON file, or inline JSON text")
        p.add_argument("--out", type=Path, help="directory for reports and CSV output")
        p.add_argument("--tol", type=float, help="override the pass/fail tolerance")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
        p.add_argument("--resolution", help="grid override NX[,NY]")
    p = sub.add_parser("schema", help="print the JSON schema of a subcommand")
    p.add_argument("name", choices=sorted(COMMANDS))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "schema":
        sys.stdout.write(json.dumps(SCHEMAS[args.name], indent=2) + "\n")
        return EXIT_OK
    try:
        args.resolution = _resolution(args.resolution)
        cfg = load_config(args.config, args.command)
        return COMMANDS[args.command](cfg, args)
    except (VortsymError, ValueError, KeyError, TypeError) as exc:
        # quantitative failures return 1 above; anything raised is a usage problem
        sys.stderr.write(f"vortsym {args.command}: {exc}\n")
        return EXIT_USAGE

if __name__ == "__main__":
    raise SystemExit(main())
