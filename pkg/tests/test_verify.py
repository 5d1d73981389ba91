import csv
import math

import numpy as np
import pytest
import sympy as sp

from vortsym import solutions as S
from vortsym.exceptions import DomainError
from vortsym.fields import LAM, MU, PLANE, SPHERE, T, Y, Field
from vortsym.generators import flow, frame_transform, plane_basis, sphere_basis
from vortsym.legendre import legendre_sympy
from vortsym.timefn import TimeFunction
from vortsym.verify import (
    FD,
    PlaneGrid,
    SphereGrid,
    default_grid,
    family_residual,
    fd_convergence,
    field_table,
    kg_inverse,
    kg_map,
    kg_residual_expr,
    kg_transform,
    lift,
    lift_residuals,
    reduced_residual,
    reduced_residual_expr,
    residual_plane,
    residual_sphere,
    sphere_residual_expr,
    write_field_csv,
)
from vortsym.verify import PT, QT

P_, Q_ = sp.symbols("p q", real=True)
SMALL_PLANE = PlaneGrid(nx=12, ny=12, times=(0.1, 0.3))


# ----------------------------------------------------------------------
# full residuals
# ----------------------------------------------------------------------

def test_constant_stream_function_has_zero_residual():
    assert residual_plane(sp.Float(2.5), SMALL_PLANE).max_norm == 0.0
    grid = PlaneGrid(times=(0.0, 0.1, 0.2))
    assert residual_plane(sp.Float(2.5), grid, mode=FD).max_norm == 0.0


def test_cubic_steady_analytic():
    assert residual_plane(S.cubic_steady(0.4, -1.0).field, PlaneGrid(times=(0.0, 1.0))).max_norm <= 1e-12


def test_rossby_haurwitz_analytic():
    om = 1.0
    c = -6.0
    fam = S.rossby_haurwitz(A=1.0, n=2, m=1, a=om * (c + 2) / c, omega=om)
    assert residual_sphere(fam.field, SphereGrid(times=(0.0, 0.5), omega=om)).max_norm <= 1e-10


def test_solid_body_rotation_in_rotating_frame():
    grid = SphereGrid(times=(0.0, 1.0), omega=1.3)
    assert residual_sphere(Field(1.3 * MU, SPHERE), grid).max_norm == 0.0


def test_frame_transform_gives_rest_frame_solution():
    om = 1.0
    fam = S.rossby_haurwitz(A=0.7, n=3, m=2, omega=om)
    rest = frame_transform(fam.field, om, "toRest")
    assert residual_sphere(rest, SphereGrid(times=(0.0, 0.4), omega=0.0)).max_norm <= 1e-10


def test_frame_equivalence_pointwise():
    # residual in the rotating frame equals the rest-frame residual at the identified point
    om = 0.8
    fld = Field(sp.sin(LAM - 0.3 * T) * (1 - MU**2) * MU + MU**3 * T, SPHERE)
    rest = frame_transform(fld, om, "toRest")
    rng = np.random.default_rng(3)
    t, lam, mu = rng.uniform(0, 2, 40), rng.uniform(0, 2 * np.pi, 40), rng.uniform(-0.9, 0.9, 40)
    rot_res = sp.lambdify((T, LAM, MU), sphere_residual_expr(fld.expr, om))(t, lam, mu)
    rest_res = sp.lambdify((T, LAM, MU), sphere_residual_expr(rest.expr, 0.0))(t, lam + om * t, mu)
    assert np.max(np.abs(rot_res - rest_res)) <= 1e-10


def test_reports_are_nonnegative_and_serialize():
    rep = residual_plane(S.rossby_wave().field, PlaneGrid(times=(0.0, 0.1, 0.2)), mode=FD)
    assert rep.max_norm >= 0 and rep.l2_norm >= 0 and rep.convergence_ratio is None
    out = rep.to_json()
    assert out["mode"] == FD and out["grid"]["kind"] == "PlaneGrid"


def test_grid_validation():
    with pytest.raises(ValueError):
        SphereGrid(delta=0.0)
    with pytest.raises(ValueError):
        PlaneGrid(nx=4)
    with pytest.raises(ValueError, match="3 time samples"):
        residual_plane(S.rossby_wave().field, PlaneGrid(times=(0.0, 0.1)), mode=FD)
    with pytest.raises(ValueError, match="mode"):
        residual_plane(S.rossby_wave().field, SMALL_PLANE, mode="spectral")


def test_l2_norm_is_independent_of_ordering():
    fam = S.rossby_wave(A=1.0, k=2.0, l=1.0)
    grid = PlaneGrid(times=(0.0, 0.1, 0.2))
    a = residual_plane(fam.field, grid, mode=FD)
    b = residual_plane(fam.field, PlaneGrid(-1.0, 1.0, 33, -1.0, 1.0, 33, (0.0, 0.1, 0.2)), mode=FD)
    assert a.l2_norm == b.l2_norm


# ----------------------------------------------------------------------
# finite-difference convergence
# ----------------------------------------------------------------------

def test_rossby_wave_fd_converges_at_second_order():
    rep = fd_convergence(S.rossby_wave().field, PlaneGrid(times=(0.0, 0.05, 0.1)))
    assert 3.5 <= rep.convergence_ratio <= 4.5


def test_rossby_haurwitz_fd_converges_at_second_order():
    fam = S.rossby_haurwitz(A=1.0, n=2, m=1, omega=1.0)
    rep = fd_convergence(fam.field, SphereGrid(32, 17, delta=0.5, times=(0.0, 0.02, 0.04), omega=1.0))
    assert 3.5 <= rep.convergence_ratio <= 4.5


def test_fd_agrees_with_analytic_on_fine_grid():
    fam = S.rossby_wave(A=1.0, k=1.0, l=1.0)
    grid = PlaneGrid(nx=65, ny=65, times=(0.0, 0.01, 0.02))
    fd = residual_plane(fam.field, grid, mode=FD).max_norm
    assert fd <= 5e-3 and residual_plane(fam.field, grid).max_norm <= 1e-12


def test_polynomial_fd_residual_is_exact():
    rep = fd_convergence(S.cubic_steady(0.0, 0.0).field, PlaneGrid(times=(0.0, 0.05, 0.1)))
    assert rep.max_norm <= 1e-12 and math.isnan(rep.convergence_ratio)


# ----------------------------------------------------------------------
# defaults
# ----------------------------------------------------------------------

def test_default_grids():
    assert default_grid(S.sin_cubed("plus")).x0 > 0
    g = default_grid(S.sphere_zonal_wave(b=0.5, C=-2.0))
    assert not g.periodic and g.lam1 == pytest.approx(np.pi)
    assert default_grid(S.rossby_haurwitz(omega=1.3)).omega == 1.3
    assert default_grid(S.rossby_wave()).times == (0.0, 0.05, 0.1)


def test_family_residual_uses_family_frame():
    fam = S.rossby_haurwitz(omega=1.3)
    assert family_residual(fam).max_norm <= 1e-10
    # evaluated in the wrong frame the wave is no longer a solution
    assert residual_sphere(fam.field, default_grid(fam), omega=0.0).max_norm > 1e-3


# ----------------------------------------------------------------------
# symmetry closure
# ----------------------------------------------------------------------

PLANE_SOLUTIONS = [
    S.rossby_wave(A=1.2, k=1.0, l=2.0, beta=1.0),
    S.case4_plane(F="sin(s)", f="1 + t**2/4", g="cos(t)"),
    S.cubic_steady(c1=0.3, c2=-0.7),
    S.sin_cubed("minus_plus"),
    S.pi_harmonic("x*y + t*x"),
    S.pi_f_profile(F="sin(s)", g1="1 + t**2", g0="t", f1="t", f0=1.0),
    S.pi_chi("t", "t**2", "sin(t)"),
]
PLANE_FLOWS = [("D", None), ("dt", None), ("dy", None), ("X", TimeFunction.poly([0.3, 0, 1])),
               ("Z", TimeFunction.sin(1.2))]


@pytest.mark.parametrize("fam", PLANE_SOLUTIONS, ids=lambda f: f.field.label)
@pytest.mark.parametrize("name,fn", PLANE_FLOWS, ids=[n for n, _ in PLANE_FLOWS])
@pytest.mark.parametrize("eps", [-0.5, 0.5])
def test_plane_symmetry_closure(fam, name, fn, eps):
    moved = flow(plane_basis(name, fn), eps).pushforward(fam.field)
    if fam.family_id == "SinCubed":
        grid = PlaneGrid(0.6, 1.5, 12, -1.0, 1.0, 12, (0.1, 0.3))
    else:
        grid = SMALL_PLANE
    assert residual_plane(moved, grid, beta=fam.beta).max_norm <= 1e-9


SPHERE_FLOWS = ["D", "dt", "J1", "J2", "J3", "Z"]


def _closure_points(v, eps, omega, n=200, reach=0.99):
    """Random points whose preimage under the flow stays at |mu| <= reach."""
    rng = np.random.default_rng(11)
    t = rng.uniform(0.1, 0.6, n)
    lam = rng.uniform(0, 2 * np.pi, n)
    mu = rng.uniform(-0.95, 0.95, n)
    back = flow(v, -eps).apply(t, lam, mu, np.zeros(n))
    keep = np.abs(back[2]) <= reach
    return t[keep], lam[keep], mu[keep]


@pytest.mark.parametrize("omega", [0.0, 1.0])
@pytest.mark.parametrize("name", SPHERE_FLOWS)
@pytest.mark.parametrize("eps", [-0.5, 0.5])
def test_sphere_symmetry_closure(omega, name, eps):
    if name == "D" and omega:
        pytest.skip("time scaling changes the rotation rate")
    fam = S.rossby_haurwitz(A=0.8, n=2, m=1, omega=omega if omega else 1.0, a=0.4)
    fld = fam.field if omega else frame_transform(fam.field, 1.0, "toRest")
    v = sphere_basis(name, TimeFunction.exp(0.5) if name == "Z" else None, omega=omega)
    moved = flow(v, eps).pushforward(fld)
    pts = _closure_points(v, eps, omega)
    assert pts[0].size >= 100
    res = sp.lambdify((T, LAM, MU), sphere_residual_expr(moved.expr, omega), cse=True)(*pts)
    assert np.max(np.abs(np.broadcast_to(res, pts[0].shape))) <= 1e-9


# ----------------------------------------------------------------------
# reduced equations and lifts
# ----------------------------------------------------------------------

LIFT_CASES = {
    "P1": ({"beta": 1.0}, ["sin(p)*q", "p**2*q**2/3", "exp(q/2)*cos(p)", "p*q**3", "p"]),
    "P2": ({"beta": 1.0, "c": 0.4}, ["sin(p + q**2)", "p**3", "cos(p)*q", "exp(p*q/3)", "q**4"]),
    "P3": ({"beta": 1.0, "f": "t"}, ["p**3*q", "sin(p)", "p*exp(q)", "cos(p + q)", "p**2*q**2"]),
    "P4": ({"beta": 1.0, "f": "1 + t**2", "g": "t"}, ["p**4*q", "sin(p)*q", "p**3", "exp(p/2)", "p*q"]),
    "P2D": ({"beta": 1.0}, ["sin(phi)**2", "cos(phi)", "-sin(phi)/8", "phi**2", "sin(3*phi)"]),
    "S1": ({"a": 0.5}, ["cos(p)*q**2", "sin(2*p)*q", "q**3", "p*q", "cos(p)*(1 - q**2)"]),
    "S2": ({"a": 0.5}, ["sin(p)*q**3", "q**2", "cos(p)*q", "sin(p + q)", "q**4*cos(2*p)"]),
    "S3": ({"g": "t"}, ["q**4*p", "sin(p)*q**2", "q**3", "p**2*q", "log(1 - q**2)"]),
    "S2D": ({"b": 0.5}, ["mu**3", "sin(mu)", "mu**2 - 1/3", "exp(mu)", "mu"]),
}


def _lift_points(n=60):
    rng = np.random.default_rng(2)
    return rng.uniform(0.5, 1.5, n), rng.uniform(0.2, 1.0, n), rng.uniform(-0.8, 0.8, n)


@pytest.mark.parametrize("case", sorted(LIFT_CASES))
def test_lift_residual_bounded_by_reduced_residual(case):
    params, candidates = LIFT_CASES[case]
    t, a, b = _lift_points()
    for v in candidates:
        full, red = lift_residuals(case, v, params, t, a, b)
        assert np.max(np.abs(full)) <= 10 * np.max(np.abs(red)) + 1e-12, v


@pytest.mark.parametrize(
    "case,factor",
    [
        ("P1", lambda t, a, b: t**-2),
        ("P2", lambda t, a, b: 1.0),
        ("P3", lambda t, a, b: 1.0),
        ("P4", lambda t, a, b: 1.0),
        ("P2D", lambda t, a, b: 3 * (a**2 + b**2)),
        ("S1", lambda t, a, b: -(t**-2)),
        ("S2", lambda t, a, b: 1.0),
        ("S3", lambda t, a, b: 1.0),
        ("S2D", lambda t, a, b: 0.5 * np.exp(a)),
    ],
)
def test_lift_factor_is_pointwise(case, factor):
    params, candidates = LIFT_CASES[case]
    t, a, b = _lift_points()
    full, red = lift_residuals(case, candidates[0], params, t, a, b)
    assert np.allclose(full, factor(t, a, b) * red, rtol=1e-10, atol=1e-12)


def test_reduced_rossby_wave():
    k, l, beta = 1.0, 1.0, 1.0
    omega = -beta * k / (k**2 + l**2)
    v = sp.sin(k * P_ + l * Q_)
    rng = np.random.default_rng(0)
    pts = (rng.uniform(-3, 3, 50), rng.uniform(-3, 3, 50))
    assert reduced_residual("P2", v, {"beta": beta, "c": omega / l}, pts).max_norm <= 1e-12
    lifted = lift("P2", v, {"beta": beta, "c": omega / l})
    assert sp.simplify(lifted.expr - S.rossby_wave(A=1.0, k=k, l=l, beta=beta).expr) == 0


def test_reduced_s3_trivial():
    pts = (np.linspace(0, 1, 9), np.linspace(-0.9, 0.9, 9))
    assert reduced_residual("S3", "log(1 - q**2)", {"g": 0.0}, pts).max_norm <= 1e-14


def test_reduced_cubic_steady_angular_profile():
    v = -sp.sin(sp.Symbol("phi", real=True)) / 8
    rep = reduced_residual("P2D", v, {"beta": 1.0}, (np.linspace(-1.5, 1.5, 31),))
    assert rep.max_norm <= 1e-10
    lifted = lift("P2D", v, {"beta": 1.0})
    ref = S.cubic_steady(0.0, 0.0, beta=1.0)
    xs, ys = np.linspace(0.2, 1.0, 5), np.linspace(-1.0, 1.0, 5)
    assert np.allclose(lifted(0.0, xs, ys), ref.eval(0.0, xs, ys), atol=1e-14)


def test_lift_p4_cubic():
    fld = lift("P4", "-p**3/6", {"beta": 1.0, "f": 1.0, "g": 0.0})
    assert sp.simplify(fld.expr + Y**3 / 6) == 0
    assert residual_plane(fld, SMALL_PLANE).max_norm == 0.0


def test_lift_s2_matches_rossby_haurwitz():
    n, m, A, a = 3, 2, 0.9, 0.35
    c = -n * (n + 1)
    kappa = -a * c / (c + 2)
    v = A * legendre_sympy(n, m, Q_) * sp.cos(m * P_) + kappa * Q_
    grid = (np.linspace(0, 6, 13), np.linspace(-0.95, 0.95, 13))
    assert reduced_residual("S2", v, {"a": a}, grid).max_norm <= 1e-12
    lifted = lift("S2", v, {"a": a})
    ref = S.rossby_haurwitz(A=A, n=n, m=m, omega=0.0, a=a)
    rng = np.random.default_rng(4)
    pts = rng.uniform(0, 2, 30), rng.uniform(0, 6, 30), rng.uniform(-0.95, 0.95, 30)
    assert np.max(np.abs(lifted(*pts) - ref.eval(*pts))) <= 1e-12


def test_lift_time_domain():
    fld = lift("P1", "p*q", {"beta": 1.0})
    with pytest.raises(DomainError):
        fld.check_domain(np.array([-0.5]), np.array([0.0]), np.array([0.0]))


def test_reduced_errors():
    with pytest.raises(ValueError, match="unknown"):
        reduced_residual_expr("P9", "p", {})
    with pytest.raises(ValueError, match="needs parameters"):
        reduced_residual_expr("P2", "p", {"beta": 1.0})


# ----------------------------------------------------------------------
# Klein-Gordon form
# ----------------------------------------------------------------------

def _kg_wave(k, beta):
    return sp.sin(k * PT + beta / k * QT)


def test_kg_identity_map():
    v = sp.sin(P_) * Q_
    vt, m = kg_transform(v, 0.0)
    assert sp.simplify(m.forward - Q_) == 0
    assert sp.simplify(vt - v.subs({P_: PT, Q_: QT})) == 0


def test_kg_wave_lifts_to_one_dimensional_rossby_wave():
    k, beta = 1.5, 1.0
    v = kg_inverse(_kg_wave(k, beta), 0.0, beta=beta)
    fld = lift("P3", v, {"beta": beta, "f": 0.0})
    ref = S.rossby_wave(A=1.0, k=k, l=0.0, beta=beta)
    assert sp.simplify(fld.expr - ref.expr) == 0


def test_kg_unit_shear_gives_two_dimensional_waves():
    k, beta = 1.0, 1.0
    m = kg_map(1.0, beta=beta)
    assert sp.simplify(m.forward - Q_ / 2) == 0
    v = kg_inverse(_kg_wave(k, beta), 1.0, beta=beta)
    fld = lift("P3", v, {"beta": beta, "f": 1.0})
    ref = S.rossby_wave(A=0.5, k=k, l=-k, beta=beta)
    assert sp.simplify(fld.expr - ref.expr) == 0


def test_kg_zero_lifts_to_solution():
    f, h = "t**2", "t"
    v = kg_inverse(sp.Integer(0), f, h=h)
    fld = lift("P3", v, {"beta": 1.0, "f": f})
    assert residual_plane(fld, SMALL_PLANE).max_norm <= 1e-12


@pytest.mark.parametrize("f,h", [("t", 0.0), ("t", "t"), ("sin(t)", 0.0)])
def test_kg_round_trip(f, h):
    v = P_**3 * Q_ + sp.sin(P_ - Q_)
    vt, _ = kg_transform(v, f, h=h)
    back = kg_inverse(vt, f, h=h)
    rng = np.random.default_rng(6)
    p, q = rng.uniform(-1, 1, 8), rng.uniform(-1, 1, 8)
    got = np.array([float(back.subs({P_: a, Q_: b}).evalf()) for a, b in zip(p, q)])
    ref = np.array([float(v.subs({P_: a, Q_: b})) for a, b in zip(p, q)])
    assert np.max(np.abs(got - ref)) <= 1e-10


def test_kg_solution_lifts_with_shear():
    f, h, k, beta = "t", "t", 1.0, 1.0
    vt = _kg_wave(k, beta)
    assert sp.simplify(kg_residual_expr(vt, beta)) == 0
    v = kg_inverse(vt, f, h=h, beta=beta)
    assert sp.simplify(reduced_residual_expr("P3", v, {"beta": beta, "f": f})) == 0
    fld = lift("P3", v, {"beta": beta, "f": f})
    assert residual_plane(fld, SMALL_PLANE, beta=beta).max_norm <= 1e-10


# ----------------------------------------------------------------------
# tables
# ----------------------------------------------------------------------

def test_field_table_and_csv(tmp_path):
    fam = S.rossby_wave()
    rows = field_table(fam.field, SMALL_PLANE)
    assert rows.shape == (2 * 12 * 12, 6)
    assert np.max(np.abs(rows[:, 5])) <= 1e-12
    assert np.allclose(rows[:, 3], fam.eval(rows[:, 0], rows[:, 1], rows[:, 2]))
    path = tmp_path / "field.csv"
    write_field_csv(path, rows, PLANE)
    with open(path) as fh:
        back = list(csv.reader(fh))
    assert back[0] == ["t", "x", "y", "psi", "zeta", "residual"]
    assert np.array_equal(np.array(back[1:], float), rows)


def test_sphere_field_table_header(tmp_path):
    fam = S.rossby_haurwitz()
    rows = field_table(fam.field, SphereGrid(8, 8, times=(0.0,), omega=1.0))
    path = tmp_path / "s.csv"
    write_field_csv(path, rows, SPHERE)
    assert path.read_text().splitlines()[0] == "t,lambda,mu,psi,zeta,residual"
    assert np.max(np.abs(rows[:, 5])) <= 1e-10
