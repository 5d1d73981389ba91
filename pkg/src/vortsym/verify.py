"""Residuals of the vorticity equations, reduced equations, lifts and the
Klein–Gordon change of variables.

Plane:   R = zeta_t + psi_x zeta_y - psi_y zeta_x + beta psi_x,  zeta = psi_xx + psi_yy
Sphere:  R = zeta_t + (psi_lam zeta_mu - psi_mu zeta_lam)/R^2 + 2 Omega psi_lam / R^2,
         zeta = (psi_lamlam/(1 - mu^2) + ((1 - mu^2) psi_mu)_mu) / R^2

Two derivative modes are offered.  ``analytic`` differentiates the symbolic
stream function exactly.  ``fd`` samples psi on the grid, forms zeta with a
second-order Laplacian and differences zeta again (2-cell margin); zeta_t
uses central differences over the time samples.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import sympy as sp
from scipy.integrate import quad
from scipy.optimize import brentq

from .exceptions import DomainError
from .fields import LAM, MU, PLANE, SPHERE, T, X, Y, Field, compile_expr, numeric_function
from .timefn import TimeFunction, as_timefn

ANALYTIC = "analytic"
FD = "fd"

BETA_EARTH = 1.6e-11
OMEGA_EARTH = 7.292e-5

P_, Q_ = sp.symbols("p q", real=True)
PHI = sp.Symbol("phi", real=True)


# ----------------------------------------------------------------------
# grids and reports
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneGrid:
    """Uniform rectangle in (x, y) sampled at the given times (endpoints included)."""

    x0: float = -1.0
    x1: float = 1.0
    nx: int = 33
    y0: float = -1.0
    y1: float = 1.0
    ny: int = 33
    times: tuple = (0.0,)

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError("grids need at least 8 points per direction")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def axes(self):
        return np.linspace(self.x0, self.x1, self.nx), np.linspace(self.y0, self.y1, self.ny)

    def mesh(self):
        """Arrays of shape (n_times, nx, ny)."""
        xs, ys = self.axes()
        return np.meshgrid(np.asarray(self.times), xs, ys, indexing="ij")

    def refined(self) -> "PlaneGrid":
        """Halve the spacing in x, y and between time samples."""
        return PlaneGrid(self.x0, self.x1, 2 * self.nx - 1, self.y0, self.y1, 2 * self.ny - 1, _refine_times(self.times))


@dataclass(frozen=True)
class SphereGrid:
    """Longitude-latitude grid; ``mu`` covers ``[-1 + delta, 1 - delta]``.

    With ``periodic`` the ``nlam`` longitudes are uniform on ``[0, 2 pi)``;
    otherwise they cover ``[lam0, lam1]`` with both ends included.
    """

    nlam: int = 64
    nmu: int = 32
    delta: float = 1e-2
    times: tuple = (0.0,)
    radius: float = 1.0
    omega: float = 0.0
    periodic: bool = True
    lam0: float = 0.0
    lam1: float = 2 * math.pi

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("pole exclusion delta must be positive")
        if self.nlam < 8 or self.nmu < 8:
            raise ValueError("grids need at least 8 points per direction")
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    def axes(self):
        if self.periodic:
            lam = np.arange(self.nlam) * (2 * math.pi / self.nlam)
        else:
            lam = np.linspace(self.lam0, self.lam1, self.nlam)
        mu = np.linspace(-1 + self.delta, 1 - self.delta, self.nmu)
        return lam, mu

    @property
    def hlam(self) -> float:
        lam, _ = self.axes()
        return float(lam[1] - lam[0])

    @property
    def hmu(self) -> float:
        _, mu = self.axes()
        return float(mu[1] - mu[0])

    def mesh(self):
        lam, mu = self.axes()
        return np.meshgrid(np.asarray(self.times), lam, mu, indexing="ij")

    def refined(self) -> "SphereGrid":
        nlam = 2 * self.nlam if self.periodic else 2 * self.nlam - 1
        return SphereGrid(nlam, 2 * self.nmu - 1, self.delta, _refine_times(self.times), self.radius,
                          self.omega, self.periodic, self.lam0, self.lam1)


def _refine_times(times):
    ts = np.asarray(times, float)
    if ts.size < 2:
        return tuple(ts)
    mid = 0.5 * (ts[1:] + ts[:-1])
    out = np.empty(2 * ts.size - 1)
    out[0::2], out[1::2] = ts, mid
    return tuple(out)


@dataclass
class ResidualReport:
    max_norm: float
    l2_norm: float
    mode: str
    grid: dict
    npoints: int
    convergence_ratio: float | None = None
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "max": self.max_norm,
            "l2": self.l2_norm,
            "mode": self.mode,
            "grid": self.grid,
            "npoints": self.npoints,
            "convergence_ratio": self.convergence_ratio,
            **({"extras": self.extras} if self.extras else {}),
        }


def _norms(res: np.ndarray) -> tuple[float, float]:
    r = np.asarray(res, float).ravel()
    if r.size == 0:
        raise ValueError("no interior points to evaluate")
    if not np.all(np.isfinite(r)):
        return math.inf, math.inf
    # compensated summation keeps the L2 norm independent of evaluation order
    return float(np.max(np.abs(r))), math.sqrt(math.fsum(r * r) / r.size)


def _report(res, mode, grid, **extras) -> ResidualReport:
    mx, l2 = _norms(res)
    return ResidualReport(mx, l2, mode, _grid_meta(grid), int(np.size(res)), extras=extras)


def _grid_meta(grid) -> dict:
    meta = asdict(grid)
    meta["kind"] = type(grid).__name__
    meta["times"] = list(grid.times)
    return meta


def _as_field(psi, geometry) -> Field:
    if hasattr(psi, "field"):
        psi = psi.field
    if isinstance(psi, Field):
        if psi.geometry != geometry:
            raise ValueError(f"expected a {geometry} field, got {psi.geometry}")
        return psi
    return Field(sp.sympify(psi), geometry)


def _eval(expr, symbols, *arrays):
    fn = compile_expr(expr, symbols)
    shape = np.broadcast(*arrays).shape
    return np.broadcast_to(np.asarray(fn(*arrays), float), shape)


DEFAULT_TIMES = (0.0, 0.05, 0.1)


def default_grid(family):
    """Grid on which a catalogued family is checked by default.

    Plane families use 33 x 33 points on [-1, 1]^2 (SinCubed moves to the
    right half-plane it lives on); sphere families use 64 x 32 points with the
    family's own pole margin, and a single longitude patch for the
    non-periodic zonal wave.
    """
    fid = family.family_id
    if family.geometry == PLANE:
        if fid == "SinCubed":
            return PlaneGrid(0.1, 1.5, 33, -1.0, 1.0, 33, DEFAULT_TIMES)
        return PlaneGrid(times=DEFAULT_TIMES)
    delta = max(1e-2, float(family.params.get("delta", 0.0)))
    omega = float(family.omega or 0.0)
    if fid == "SphereZonalWave":
        return SphereGrid(33, 32, delta, DEFAULT_TIMES, omega=omega, periodic=False, lam0=0.0, lam1=math.pi)
    return SphereGrid(64, 32, delta, DEFAULT_TIMES, omega=omega)


def family_residual(family, grid=None, mode: str = ANALYTIC) -> ResidualReport:
    """Residual of a catalogued family on ``grid`` (default: :func:`default_grid`)."""
    grid = default_grid(family) if grid is None else grid
    if family.geometry == PLANE:
        return residual_plane(family.field, grid, beta=family.beta, mode=mode)
    return residual_sphere(family.field, grid, omega=family.omega or 0.0, mode=mode)


# ----------------------------------------------------------------------
# full equations
# ----------------------------------------------------------------------

def plane_residual_expr(psi_expr, beta) -> sp.Expr:
    zeta = sp.diff(psi_expr, X, 2) + sp.diff(psi_expr, Y, 2)
    return (
        sp.diff(zeta, T)
        + sp.diff(psi_expr, X) * sp.diff(zeta, Y)
        - sp.diff(psi_expr, Y) * sp.diff(zeta, X)
        + beta * sp.diff(psi_expr, X)
    )


def sphere_vorticity_expr(psi_expr, radius=1.0) -> sp.Expr:
    q = 1 - MU**2
    return (sp.diff(psi_expr, LAM, 2) / q + sp.diff(q * sp.diff(psi_expr, MU), MU)) / radius**2


def sphere_residual_expr(psi_expr, omega, radius=1.0) -> sp.Expr:
    zeta = sphere_vorticity_expr(psi_expr, radius)
    pl, pm = sp.diff(psi_expr, LAM), sp.diff(psi_expr, MU)
    return (
        sp.diff(zeta, T)
        + (pl * sp.diff(zeta, MU) - pm * sp.diff(zeta, LAM)) / radius**2
        + 2 * omega * pl / radius**2
    )


def _terms_analytic(field: Field, parts, *arrays):
    """Evaluate a list of derivative expressions on the mesh."""
    field.check_domain(*arrays)
    return [_eval(e, field.symbols, *arrays) for e in parts]


def residual_plane(psi, grid: PlaneGrid, beta: float = 1.0, mode: str = ANALYTIC) -> ResidualReport:
    """Residual of the beta-plane equation on ``grid``."""
    fld = _as_field(psi, PLANE)
    if mode == ANALYTIC:
        t, x, y = grid.mesh()
        e = fld.expr
        zeta = sp.diff(e, X, 2) + sp.diff(e, Y, 2)
        parts = [sp.diff(zeta, T), sp.diff(e, X), sp.diff(zeta, Y), sp.diff(e, Y), sp.diff(zeta, X)]
        zt, px, zy, py, zx = _terms_analytic(fld, parts, t, x, y)
        res = zt + px * zy - py * zx + beta * px
        return _report(res, mode, grid)
    if mode == FD:
        return _report(_interior(_plane_fd(fld, grid, beta)), mode, grid)
    raise ValueError(f"unknown mode {mode!r}")


def _central_times(times):
    ts = np.asarray(times, float)
    if ts.size < 3:
        raise ValueError("finite-difference mode needs at least 3 time samples")
    dt = np.diff(ts)
    if not np.allclose(dt, dt[0], rtol=1e-12, atol=0):
        raise ValueError("finite-difference mode needs uniformly spaced times")
    return float(dt[0])


def _plane_fd(fld: Field, grid: PlaneGrid, beta: float) -> np.ndarray:
    """Residual on the full mesh; NaN where the stencils do not fit."""
    dt = _central_times(grid.times)
    t, x, y = grid.mesh()
    psi = fld(t, x, y)
    hx, hy = grid.hx, grid.hy

    def dx(f):
        out = np.full_like(f, np.nan)
        out[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * hx)
        return out

    def dy(f):
        out = np.full_like(f, np.nan)
        out[:, :, 1:-1] = (f[:, :, 2:] - f[:, :, :-2]) / (2 * hy)
        return out

    zeta = np.full_like(psi, np.nan)
    zeta[:, 1:-1, 1:-1] = (
        (psi[:, 2:, 1:-1] - 2 * psi[:, 1:-1, 1:-1] + psi[:, :-2, 1:-1]) / hx**2
        + (psi[:, 1:-1, 2:] - 2 * psi[:, 1:-1, 1:-1] + psi[:, 1:-1, :-2]) / hy**2
    )
    zt = _dt_central(zeta, dt)
    px = dx(psi)
    return zt + px * dy(zeta) - dy(psi) * dx(zeta) + beta * px


def _dt_central(f, dt):
    out = np.full_like(f, np.nan)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * dt)
    return out


def _interior(res: np.ndarray) -> np.ndarray:
    # stencil margins are NaN; the field itself is finite on admissible grids
    return res[~np.isnan(res)]


def residual_sphere(psi, grid: SphereGrid, omega: float | None = None, radius: float | None = None,
                    mode: str = ANALYTIC) -> ResidualReport:
    """Residual of the spherical equation on ``grid`` (defaults from the grid)."""
    fld = _as_field(psi, SPHERE)
    omega = grid.omega if omega is None else float(omega)
    radius = grid.radius if radius is None else float(radius)
    if mode == ANALYTIC:
        t, lam, mu = grid.mesh()
        e = fld.expr
        zeta = sphere_vorticity_expr(e, radius)
        parts = [sp.diff(zeta, T), sp.diff(e, LAM), sp.diff(zeta, MU), sp.diff(e, MU), sp.diff(zeta, LAM)]
        zt, pl, zm, pm, zl = _terms_analytic(fld, parts, t, lam, mu)
        res = zt + (pl * zm - pm * zl) / radius**2 + 2 * omega * pl / radius**2
        return _report(res, mode, grid, omega=omega, radius=radius)
    if mode == FD:
        res = _interior(_sphere_fd(fld, grid, omega, radius))
        return _report(res, mode, grid, omega=omega, radius=radius)
    raise ValueError(f"unknown mode {mode!r}")


def _sphere_fd(fld: Field, grid: SphereGrid, omega: float, radius: float) -> np.ndarray:
    dt = _central_times(grid.times)
    t, lam, mu = grid.mesh()
    psi = fld(t, lam, mu)
    hl, hm = grid.hlam, grid.hmu
    mu1 = mu[0, 0, :]
    qh = 1 - (0.5 * (mu1[1:] + mu1[:-1])) ** 2  # (1 - mu^2) at half points
    q = 1 - mu1**2

    if grid.periodic:
        def dl(f):
            return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * hl)

        def dll(f):
            return (np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1)) / hl**2
    else:
        def dl(f):
            out = np.full_like(f, np.nan)
            out[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * hl)
            return out

        def dll(f):
            out = np.full_like(f, np.nan)
            out[:, 1:-1] = (f[:, 2:] - 2 * f[:, 1:-1] + f[:, :-2]) / hl**2
            return out

    def dm(f):
        out = np.full_like(f, np.nan)
        out[:, :, 1:-1] = (f[:, :, 2:] - f[:, :, :-2]) / (2 * hm)
        return out

    flux = qh * (psi[:, :, 1:] - psi[:, :, :-1]) / hm
    lap_mu = np.full_like(psi, np.nan)
    lap_mu[:, :, 1:-1] = (flux[:, :, 1:] - flux[:, :, :-1]) / hm
    zeta = (dll(psi) / q + lap_mu) / radius**2
    zt = _dt_central(zeta, dt)
    pl, pm, zl, zm = dl(psi), dm(psi), dl(zeta), dm(zeta)
    return zt + (pl * zm - pm * zl) / radius**2 + 2 * omega * pl / radius**2


def fd_convergence(psi, grid, **kwargs) -> ResidualReport:
    """FD residual on ``grid`` and on its refinement, compared on shared nodes.

    The ratio is ``max|R_coarse| / max|R_fine|`` over the coarse interior
    points, which are also nodes of the refined grid, so both norms measure
    the same physical points.
    """
    plane = isinstance(grid, PlaneGrid)
    fld = _as_field(psi, PLANE if plane else SPHERE)
    fine_grid = grid.refined()
    if plane:
        beta = kwargs.get("beta", 1.0)
        coarse = _plane_fd(fld, grid, beta)
        fine = _plane_fd(fld, fine_grid, beta)
        extras = {}
    else:
        omega = grid.omega if kwargs.get("omega") is None else float(kwargs["omega"])
        radius = grid.radius if kwargs.get("radius") is None else float(kwargs["radius"])
        coarse = _sphere_fd(fld, grid, omega, radius)
        fine = _sphere_fd(fld, fine_grid, omega, radius)
        extras = {"omega": omega, "radius": radius}
    shared = fine[::2, ::2, ::2]
    mask = np.isfinite(coarse)
    report = _report(coarse[mask], FD, grid, **extras)
    fine_max, _ = _norms(shared[mask])
    report.extras["fine_max"] = fine_max
    if fine_max > 0:
        report.convergence_ratio = report.max_norm / fine_max
    elif report.max_norm == 0:
        # both grids reproduce the field exactly (polynomials of low degree)
        report.convergence_ratio = math.nan
    else:
        report.convergence_ratio = math.inf
    return report


# ----------------------------------------------------------------------
# reduced equations and lifts
# ----------------------------------------------------------------------

REDUCED_CASES = ("P1", "P2", "P3", "P4", "P2D", "S1", "S2", "S3", "S2D")

_REQUIRED = {
    "P1": ("beta",),
    "P2": ("beta", "c"),
    "P3": ("beta", "f"),
    "P4": ("beta", "f", "g"),
    "P2D": ("beta",),
    "S1": ("a",),
    "S2": ("a",),
    "S3": ("g",),
    "S2D": ("b",),
}


def _params(case_id, params):
    if case_id not in _REQUIRED:
        raise ValueError(f"unknown reduction case {case_id!r}; known: {REDUCED_CASES}")
    params = dict(params or {})
    missing = [k for k in _REQUIRED[case_id] if k not in params]
    if missing:
        raise ValueError(f"case {case_id} needs parameters {missing}")
    for k in ("f", "g"):
        if k in params:
            params[k] = as_timefn(params[k]) if not isinstance(params[k], list) else TimeFunction.from_json(params[k])
    return params


def reduced_variables(case_id: str):
    """Symbols of the reduced problem."""
    if case_id == "P2D":
        return (PHI,)
    if case_id == "S2D":
        return (MU,)
    return (P_, Q_)


def reduced_residual_expr(case_id: str, v, params) -> sp.Expr:
    """Left-hand side of the reduced equation for the reduced solution ``v``."""
    prm = _params(case_id, params)
    v = _reduced_expr(v, case_id)
    p, q = P_, Q_
    if case_id in ("P1", "P2"):
        w = sp.diff(v, p, 2) + sp.diff(v, q, 2)
        beta = prm["beta"]
        jac = sp.diff(v, p) * sp.diff(w, q) - sp.diff(v, q) * sp.diff(w, p)
        if case_id == "P1":
            return -w + p * sp.diff(w, p) + q * sp.diff(w, q) + jac + beta * sp.diff(v, p)
        return -prm["c"] * sp.diff(w, q) + jac + beta * sp.diff(v, p)
    if case_id == "P3":
        f = prm["f"].to_sympy(q)
        w = sp.diff(v, p, 2)
        return (1 + f**2) * sp.diff(w, q) + 2 * f * sp.diff(f, q) * w + prm["beta"] * sp.diff(v, p) - sp.diff(f, q, 2)
    if case_id == "P4":
        f, g = prm["f"].to_sympy(q), prm["g"].to_sympy(q)
        w = sp.diff(v, p, 2)
        drift = g / f - sp.diff(f, q) / f * p
        return sp.diff(w, q) + drift * sp.diff(w, p) + prm["beta"] * drift
    if case_id == "P2D":
        w = sp.diff(v, PHI, 2) + 9 * v
        a = w + prm["beta"] * sp.sin(PHI)
        return v * sp.diff(a, PHI) - sp.diff(v, PHI) * a / 3
    if case_id in ("S1", "S2"):
        w = sp.diff(v, p, 2) / (1 - q**2) + sp.diff((1 - q**2) * sp.diff(v, q), q)
        a = prm["a"]
        if case_id == "S1":
            return w + a * sp.diff(w, p) - sp.diff(v, p) * sp.diff(w, q) + sp.diff(v, q) * sp.diff(w, p)
        u = a * q + v
        return -sp.diff(u, q) * sp.diff(w, p) + sp.diff(u, p) * sp.diff(w, q)
    if case_id == "S3":
        g = prm["g"].to_sympy(p)
        w = sp.diff((1 - q**2) * sp.diff(v, q), q)
        return sp.diff(w, p) + g * sp.diff(w, q)
    if case_id == "S2D":
        b = prm["b"]
        w = b**2 / (1 - MU**2) * v + sp.diff((1 - MU**2) * sp.diff(v, MU), MU)
        return v * sp.diff(w, MU) - sp.diff(v, MU) * w
    raise ValueError(case_id)


def _reduced_expr(v, case_id):
    if isinstance(v, str):
        loc = {"p": P_, "q": Q_, "phi": PHI, "mu": MU}
        return sp.sympify(v, locals=loc)
    return sp.sympify(v)


def reduced_residual(case_id: str, v, params, points) -> ResidualReport:
    """Residual of a reduced equation at the reduced-coordinate ``points``.

    ``points`` is a tuple of arrays, ``(p, q)`` or ``(phi,)`` / ``(mu,)`` for
    the two-dimensional cases.
    """
    expr = reduced_residual_expr(case_id, v, params)
    syms = reduced_variables(case_id)
    arrays = tuple(np.asarray(a, float) for a in points)
    res = _eval(expr, syms, *arrays)
    mx, l2 = _norms(res)
    return ResidualReport(mx, l2, ANALYTIC, {"kind": "reduced", "case": case_id}, int(res.size),
                          extras={"values": res})


def reduced_coordinates(case_id: str, params, t, c1, c2):
    """Map full-variable points to the reduced variables of ``case_id``."""
    prm = _params(case_id, params)
    t, c1, c2 = (np.asarray(a, float) for a in (t, c1, c2))
    if case_id == "P1":
        return t * c1, t * c2
    if case_id == "P2":
        return c1, c2 - prm["c"] * t
    if case_id == "P3":
        return c1 - prm["f"](t) * c2, t
    if case_id == "P4":
        return c2, t
    if case_id == "P2D":
        return (np.arctan(c2 / c1),)
    if case_id == "S1":
        return c1 - prm["a"] * np.log(t), c2
    if case_id == "S2":
        return c1 - prm["a"] * t, c2
    if case_id == "S3":
        return t, c2
    if case_id == "S2D":
        return (c2,)
    raise ValueError(case_id)


def lift(case_id: str, v, params) -> Field:
    """Full-variable stream function built from the reduced solution ``v``."""
    prm = _params(case_id, params)
    v = _reduced_expr(v, case_id)
    if case_id == "P1":
        return Field(v.subs({P_: T * X, Q_: T * Y}, simultaneous=True) / T**3, PLANE, _positive_time, "lift P1")
    if case_id == "P2":
        return Field(v.subs({P_: X, Q_: Y - prm["c"] * T}, simultaneous=True), PLANE, label="lift P2")
    if case_id == "P3":
        f = prm["f"].to_sympy(T)
        e = v.subs({P_: X - f * Y, Q_: T}, simultaneous=True) - sp.diff(f, T) * Y**2 / 2
        return Field(e, PLANE, label="lift P3")
    if case_id == "P4":
        f, g = prm["f"].to_sympy(T), prm["g"].to_sympy(T)
        e = v.subs({P_: Y, Q_: T}, simultaneous=True) - sp.diff(f, T) / f * X * Y + g / f * X
        return Field(e, PLANE, label="lift P4")
    if case_id == "P2D":
        e = (X**2 + Y**2) ** sp.Rational(3, 2) * v.subs(PHI, sp.atan(Y / X))
        return Field(e, PLANE, lambda t, x, y: x > 0, "lift P2D")
    if case_id == "S1":
        e = v.subs({P_: LAM - prm["a"] * sp.log(T), Q_: MU}, simultaneous=True) / T
        return Field(e, SPHERE, _positive_time, "lift S1")
    if case_id == "S2":
        return Field(v.subs({P_: LAM - prm["a"] * T, Q_: MU}, simultaneous=True), SPHERE, label="lift S2")
    if case_id == "S3":
        e = v.subs({P_: T, Q_: MU}, simultaneous=True) + prm["g"].to_sympy(T) * LAM
        return Field(e, SPHERE, label="lift S3")
    if case_id == "S2D":
        return Field(sp.exp(prm["b"] * LAM) * v, SPHERE, label="lift S2D")
    raise ValueError(case_id)


def lift_residuals(case_id: str, v, params, t, c1, c2, omega: float = 0.0):
    """Full residual of ``lift(case_id, v)`` and reduced residual at the image points.

    Returns two arrays of the same shape as the broadcast inputs, so the
    lift can be checked pointwise against the reduced equation.
    """
    fld = lift(case_id, v, params)
    t, c1, c2 = np.broadcast_arrays(*(np.asarray(a, float) for a in (t, c1, c2)))
    fld.check_domain(t, c1, c2)
    if fld.geometry == PLANE:
        full_expr = plane_residual_expr(fld.expr, params.get("beta", 1.0))
    else:
        full_expr = sphere_residual_expr(fld.expr, omega)
    full = _eval(full_expr, fld.symbols, t, c1, c2)
    red_expr = reduced_residual_expr(case_id, v, params)
    reduced = _eval(red_expr, reduced_variables(case_id), *reduced_coordinates(case_id, params, t, c1, c2))
    return full, reduced


def _positive_time(t, a, b):
    return t > 0


# ----------------------------------------------------------------------
# Klein–Gordon form of the third plane reduction
# ----------------------------------------------------------------------

PT, QT = sp.symbols("ptil qtil", real=True)


@dataclass(frozen=True, eq=False)
class KGMap:
    """Light-cone variables ``ptil = p``, ``qtil = int_0^q dq / (1 + f^2)``.

    ``forward`` is ``qtil(q)``; ``backward`` is ``q(qtil)``.  Both are sympy
    expressions; when sympy finds no closed form they are numeric functions
    with exact derivative rules.
    """

    f: TimeFunction
    h: TimeFunction
    beta: float
    forward: sp.Expr
    backward: sp.Expr

    def shift_terms(self, p, q):
        """``-f'' p / beta + h / beta + ((1 + f^2) f'')' / beta^2`` in (p, q)."""
        fe = self.f.to_sympy(q)
        f2 = sp.diff(fe, q, 2)
        return -f2 * p / self.beta + self.h.to_sympy(q) / self.beta + sp.diff((1 + fe**2) * f2, q) / self.beta**2


def kg_map(f, h=0.0, beta=1.0) -> KGMap:
    f, h = as_timefn(f), as_timefn(h)
    fe = f.to_sympy(Q_)
    density = 1 / (1 + fe**2)
    fwd = sp.integrate(density, (Q_, 0, Q_))
    if fwd.has(sp.Integral):
        fwd, inv = _numeric_light_cone(density)
        return KGMap(f, h, float(beta), fwd, inv)
    z = sp.Symbol("z", real=True)
    try:
        roots = sp.solve(sp.Eq(fwd.subs(Q_, z), QT), z)
    except Exception:  # sympy's solver fails in assorted ways on transcendental inverses
        roots = []
    if len(roots) == 1:
        inv = roots[0]
    else:
        _, inv = _numeric_light_cone(density)
    return KGMap(f, h, float(beta), fwd, inv)


_LIGHT_CONE_REACH = 1e4


def _numeric_light_cone(density):
    dens = compile_expr(density, (Q_,))

    def fwd_impl(q):
        q = np.asarray(q, float)
        out = np.array([quad(dens, 0.0, float(v), epsabs=1e-14, epsrel=1e-13, limit=200)[0] for v in q.ravel()])
        return out.reshape(q.shape)[()] if q.ndim == 0 else out.reshape(q.shape)

    def inv_impl(qt):
        qt = np.asarray(qt, float)
        out = []
        for val in qt.ravel():
            lo, hi = -1.0, 1.0
            while fwd_impl(lo) > val and lo > -_LIGHT_CONE_REACH:
                lo *= 2
            while fwd_impl(hi) < val and hi < _LIGHT_CONE_REACH:
                hi *= 2
            if not fwd_impl(lo) <= val <= fwd_impl(hi):
                raise DomainError(f"qtil = {val} lies outside the range of the light-cone coordinate")
            out.append(brentq(lambda z: fwd_impl(z) - val, lo, hi, xtol=1e-15, rtol=1e-15))
        out = np.array(out).reshape(qt.shape)
        return out[()] if qt.ndim == 0 else out

    Fwd = numeric_function("LightCone", fwd_impl, lambda i, args: density.subs(Q_, args[0]), 1)
    Inv = numeric_function("LightConeInv", inv_impl, None, 1)
    Inv.fdiff = lambda self, argindex=1: 1 / density.subs(Q_, self)
    return Fwd(Q_), Inv(QT)


def kg_transform(v, f, h=0.0, beta=1.0):
    """Return ``(vtil, map)`` with ``vtil`` a sympy expression in (ptil, qtil).

    ``vtil = (1 + f^2) [v - f'' p/beta + h/beta + ((1 + f^2) f'')'/beta^2]``
    solves ``vtil_{ptil qtil} + beta vtil = 0`` whenever ``v`` solves the
    third plane reduction.
    """
    m = kg_map(f, h, beta)
    v = _reduced_expr(v, "P3")
    fe = m.f.to_sympy(Q_)
    body = (1 + fe**2) * (v + m.shift_terms(P_, Q_))
    return body.subs({P_: PT, Q_: m.backward}, simultaneous=True), m


def kg_inverse(vtil, f, h=0.0, beta=1.0) -> sp.Expr:
    """Reduced solution ``v(p, q)`` from a Klein–Gordon solution ``vtil(ptil, qtil)``."""
    m = kg_map(f, h, beta)
    vt = sp.sympify(vtil, locals={"ptil": PT, "qtil": QT}) if isinstance(vtil, str) else sp.sympify(vtil)
    fe = m.f.to_sympy(Q_)
    return vt.subs({PT: P_, QT: m.forward}, simultaneous=True) / (1 + fe**2) - m.shift_terms(P_, Q_)


def kg_residual_expr(vtil, beta=1.0) -> sp.Expr:
    return sp.diff(vtil, PT, QT) + beta * vtil


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------

def field_table(psi, grid, beta: float = 1.0, omega: float | None = None):
    """Rows ``(t, c1, c2, psi, zeta, residual)`` evaluated analytically."""
    if isinstance(grid, PlaneGrid):
        fld = _as_field(psi, PLANE)
        t, a, b = grid.mesh()
        zeta_e = sp.diff(fld.expr, X, 2) + sp.diff(fld.expr, Y, 2)
        res_e = plane_residual_expr(fld.expr, beta)
    else:
        fld = _as_field(psi, SPHERE)
        t, a, b = grid.mesh()
        om = grid.omega if omega is None else omega
        zeta_e = sphere_vorticity_expr(fld.expr, grid.radius)
        res_e = sphere_residual_expr(fld.expr, om, grid.radius)
    fld.check_domain(t, a, b)
    cols = [t, a, b, fld(t, a, b), _eval(zeta_e, fld.symbols, t, a, b), _eval(res_e, fld.symbols, t, a, b)]
    return np.column_stack([np.ravel(c) for c in cols])


def write_field_csv(path, rows, geometry: str):
    header = ["t", "x", "y"] if geometry == PLANE else ["t", "lambda", "mu"]
    header += ["psi", "zeta", "residual"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(float(v), ".17g") for v in row])


__all__ = [
    "ANALYTIC",
    "BETA_EARTH",
    "DEFAULT_TIMES",
    "FD",
    "KGMap",
    "OMEGA_EARTH",
    "PlaneGrid",
    "REDUCED_CASES",
    "ResidualReport",
    "SphereGrid",
    "default_grid",
    "family_residual",
    "fd_convergence",
    "field_table",
    "kg_inverse",
    "kg_map",
    "kg_residual_expr",
    "kg_transform",
    "lift",
    "lift_residuals",
    "plane_residual_expr",
    "reduced_coordinates",
    "reduced_variables",
    "reduced_residual",
    "reduced_residual_expr",
    "residual_plane",
    "residual_sphere",
    "sphere_residual_expr",
    "sphere_vorticity_expr",
    "write_field_csv",
]
