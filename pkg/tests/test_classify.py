import math
import warnings

import numpy as np
import pytest
from conftest import random_bplane, random_sphere, random_timefn

from vortsym.classify import (
    AdjointFallbackWarning,
    adjoint_closed,
    adjoint_ode_oracle,
    adjoint_series,
    canonical_2d_catalogue,
    closure_check_2d,
    normalize_1d,
    normalize_1d_plane,
    normalize_1d_sphere,
    printed_drift_pattern,
    replay_witness,
)
from vortsym.exceptions import UnsupportedOperation
from vortsym.generators import (
    PlaneGenerator,
    SphereGenerator,
    distance,
    eval_vector_field,
    flow,
    plane_basis,
    sphere_basis,
)
from vortsym.timefn import POS, TimeFunction


def coeff_gap(a, b, domain=None):
    return max(distance(a, b, domain))


def plane_table(rng):
    """Basis elements of the beta-plane algebra with random function slots."""
    return [
        plane_basis("D"),
        plane_basis("dt"),
        plane_basis("dy"),
        plane_basis("X", random_timefn(rng)),
        plane_basis("Z", random_timefn(rng)),
    ]


def sphere_table(rng):
    return [sphere_basis(n) for n in ("D", "dt", "J1", "J2", "J3")] + [sphere_basis("Z", random_timefn(rng))]


# ----------------------------------------------------------------------
# adjoint actions
# ----------------------------------------------------------------------

def test_adjoint_examples():
    got = adjoint_closed(plane_basis("D"), math.log(2), plane_basis("dt"))
    assert coeff_gap(got, plane_basis("dt").scale(2)) <= 1e-14
    # dw/deps = [w, v] gives +J1 here (the sign convention is fixed by the series)
    got = adjoint_closed(sphere_basis("J3"), math.pi / 2, sphere_basis("J2"))
    assert coeff_gap(got, sphere_basis("J1")) <= 1e-15
    w = random_bplane(np.random.default_rng(3), sparse=False)
    assert adjoint_closed(plane_basis("D"), 0.0, w) is w


def test_series_examples():
    got = adjoint_series(plane_basis("dt"), 0.7, plane_basis("D"), order=1)
    assert coeff_gap(got, plane_basis("D") - plane_basis("dt").scale(0.7)) == 0
    eps = 0.3
    got = adjoint_series(sphere_basis("J1"), eps, sphere_basis("J2"), order=8)
    # dw/deps = [w, J1] = -J3 at eps = 0
    ref = sphere_basis("J2").scale(math.cos(eps)) - sphere_basis("J3").scale(math.sin(eps))
    assert coeff_gap(got, ref) <= eps**9 / math.factorial(9)
    w = plane_basis("X", TimeFunction.cos(1.0))
    assert coeff_gap(adjoint_series(plane_basis("Z"), 2.0, w, order=1), w) == 0


def test_ode_oracle_examples():
    got = adjoint_ode_oracle(plane_basis("D"), 1.0, plane_basis("dy"), steps=100)
    assert coeff_gap(got, plane_basis("dy").scale(math.exp(-1))) <= 1e-8
    w = plane_basis("X", TimeFunction.monomial(2))
    assert adjoint_ode_oracle(plane_basis("D"), 0.0, w) is w
    got = adjoint_ode_oracle(plane_basis("dy"), 0.5, w)
    ref = w + plane_basis("Z", TimeFunction.monomial(1, 2.0)).scale(0.5)
    assert coeff_gap(got, ref) <= 1e-8


def test_dy_adjoint_carries_eps_factor():
    w = plane_basis("X", TimeFunction.monomial(3))
    got = adjoint_closed(plane_basis("dy"), 0.25, w)
    assert coeff_gap(got, w + plane_basis("Z", TimeFunction.monomial(2, 0.75))) <= 1e-15


@pytest.mark.parametrize("seed", range(3))
def test_closed_form_matches_ode_oracle(seed):
    rng = np.random.default_rng(seed)
    for v in plane_table(rng):
        eps = rng.uniform(-0.5, 0.5)
        w = random_bplane(rng, sparse=False)
        assert coeff_gap(adjoint_closed(v, eps, w), adjoint_ode_oracle(v, eps, w, steps=200)) <= 1e-6
    for v in sphere_table(rng):
        eps = rng.uniform(-0.5, 0.5)
        w = random_sphere(rng, sparse=False)
        assert coeff_gap(adjoint_closed(v, eps, w), adjoint_ode_oracle(v, eps, w, steps=200)) <= 1e-6


def test_rotation_adjoint_matches_series():
    rng = np.random.default_rng(7)
    for name in ("J1", "J2", "J3"):
        for _ in range(5):
            w = random_sphere(rng, sparse=False)
            got = adjoint_closed(sphere_basis(name), 0.3, w)
            assert coeff_gap(got, adjoint_series(sphere_basis(name), 0.3, w, order=12)) <= 1e-9


def _pushed_field(v, eps, w, pts, sphere, h=1e-5):
    """Push the vector field ``w`` through ``flow(v, eps)`` by a central difference."""
    F = flow(v, eps)
    field = eval_vector_field(w, pts)
    plus = F.apply(*(p + h * c for p, c in zip(pts, field)))
    minus = F.apply(*(p - h * c for p, c in zip(pts, field)))
    out = []
    for i, (a, b) in enumerate(zip(plus, minus)):
        d = np.asarray(a) - np.asarray(b)
        if sphere and i == 1:
            d = (d + np.pi) % (2 * np.pi) - np.pi
        out.append(d / (2 * h))
    return F.apply(*pts), out


@pytest.mark.parametrize("sphere", [False, True])
def test_adjoint_is_pushforward_of_vector_field(sphere):
    rng = np.random.default_rng(11)
    n = 15
    if sphere:
        table, draw = sphere_table(rng), lambda: random_sphere(rng, sparse=False)
        pts = (rng.uniform(0.3, 1.2, n), rng.uniform(0.5, 2.5, n), rng.uniform(-0.6, 0.6, n), rng.uniform(-1, 1, n))
    else:
        table, draw = plane_table(rng), lambda: random_bplane(rng, sparse=False)
        pts = tuple(rng.uniform(-1, 1, n) for _ in range(4))
    for v in table:
        w = draw()
        image, pushed = _pushed_field(v, 0.4, w, pts, sphere)
        direct = eval_vector_field(adjoint_closed(v, 0.4, w), image)
        for a, b in zip(pushed, direct):
            assert np.max(np.abs(a - b)) <= 1e-6


def test_fplane_adjoint_falls_back_with_warning():
    v = plane_basis("J", flavor="fplane")
    w = PlaneGenerator(aD1=1.0, aD2=0.5, flavor="fplane")
    with pytest.warns(AdjointFallbackWarning):
        got = adjoint_closed(v, 0.5, w)
    assert coeff_gap(got, adjoint_ode_oracle(v, 0.5, w)) <= 1e-8


# ----------------------------------------------------------------------
# one-dimensional classification
# ----------------------------------------------------------------------

def test_plane_normalization_examples():
    r = normalize_1d_plane(plane_basis("D").scale(2) + plane_basis("dt").scale(3))
    assert r.class_id == "P-D"
    assert coeff_gap(r.representative, plane_basis("D")) == 0
    assert r.scale == pytest.approx(0.5)
    assert r.steps[0].element == "dt" and r.steps[0].param == pytest.approx(1.5)

    r = normalize_1d_plane(plane_basis("dt") + plane_basis("dy").scale(5))
    assert r.class_id == "P-TY"
    assert coeff_gap(r.representative, plane_basis("dt") + plane_basis("dy")) == 0
    assert r.steps[0].param == pytest.approx(math.log(5) / 2)
    assert r.scale == pytest.approx(math.exp(-math.log(5) / 2))
    assert r.residual <= 1e-12

    v = plane_basis("X", TimeFunction.monomial(1)) + plane_basis("Z")
    r = normalize_1d_plane(v)
    assert r.class_id == "P-XZ" and coeff_gap(r.representative, v) == 0 and not r.steps


def test_negative_drift_uses_reflection():
    r = normalize_1d_plane(plane_basis("dt") - plane_basis("dy").scale(0.2))
    assert r.class_id == "P-TY" and r.steps[-1].element == "reflect_y"
    assert r.residual <= 1e-12


def test_pure_z_goes_to_xz_class():
    r = normalize_1d_plane(plane_basis("Z", TimeFunction.exp(1.0)))
    assert r.class_id == "P-XZ" and not r.representative.f


def test_sphere_normalization_examples():
    r = normalize_1d_sphere(sphere_basis("J2"))
    assert r.class_id == "S-JZ"
    assert coeff_gap(r.representative, sphere_basis("J1")) <= 1e-12
    r = normalize_1d_sphere(sphere_basis("D") + sphere_basis("J3").scale(2))
    assert r.class_id == "S-DJ"
    assert coeff_gap(r.representative, sphere_basis("D") + sphere_basis("J1").scale(2)) <= 1e-12
    v = sphere_basis("Z", TimeFunction.exp(1.0))
    r = normalize_1d_sphere(v)
    assert r.class_id == "S-Z" and coeff_gap(r.representative, v) == 0


def test_sphere_time_class_normalizes_rotation_rate():
    r = normalize_1d_sphere(sphere_basis("dt") + sphere_basis("J2").scale(-3))
    assert r.class_id == "S-TJ"
    assert abs(r.representative.a1) == pytest.approx(1.0)
    assert r.residual <= 1e-12


def test_scaling_class_kills_functions_on_half_line():
    v = plane_basis("D") + plane_basis("X", TimeFunction.cos(1.0)) + plane_basis("Z", TimeFunction.monomial(1))
    r = normalize_1d_plane(v, domain=POS)
    assert r.class_id == "P-D" and r.residual <= 1e-9
    assert r.domain == POS


def test_zero_generator_rejected():
    with pytest.raises(ValueError):
        normalize_1d(PlaneGenerator())
    with pytest.raises(ValueError):
        normalize_1d(SphereGenerator())


def test_kill_quadrature_outside_algebra():
    v = plane_basis("dt") + plane_basis("X", TimeFunction.power(-1.0))
    with pytest.raises(UnsupportedOperation, match="int f dt"):
        normalize_1d_plane(v)


@pytest.mark.parametrize("seed", range(4))
def test_witness_replay(seed):
    rng = np.random.default_rng(50 + seed)
    for _ in range(10):
        for v in (random_bplane(rng), random_sphere(rng)):
            if not np.any(v.scalars()) and not any(v.functions()):
                continue
            r = normalize_1d(v)
            got = replay_witness(v, r.steps, r.scale)
            assert coeff_gap(got, r.representative, r.domain) <= 1e-9


def _random_basis_adjoint(rng, v):
    table = plane_table(rng) if isinstance(v, PlaneGenerator) else sphere_table(rng)
    b = table[rng.integers(len(table))]
    return adjoint_closed(b, rng.choice([-1.0, -0.3, 0.3, 1.0]), v)


@pytest.mark.parametrize("seed", range(3))
def test_class_stable_under_adjoints(seed):
    rng = np.random.default_rng(80 + seed)
    for _ in range(10):
        for v in (random_bplane(rng), random_sphere(rng)):
            if not np.any(v.scalars()) and not any(v.functions()):
                continue
            assert normalize_1d(_random_basis_adjoint(rng, v)).class_id == normalize_1d(v).class_id


REPRESENTATIVES = [
    plane_basis("D"),
    plane_basis("dt"),
    plane_basis("dt") + plane_basis("dy"),
    plane_basis("dy") + plane_basis("X", TimeFunction.sin(1.0)),
    plane_basis("X", TimeFunction.monomial(1)) + plane_basis("Z", TimeFunction.exp(-1.0)),
    sphere_basis("D") + sphere_basis("J1").scale(-0.4),
    sphere_basis("dt") + sphere_basis("J1"),
    sphere_basis("dt") - sphere_basis("J1"),
    sphere_basis("J1") + sphere_basis("Z", TimeFunction.cos(2.0)),
    sphere_basis("Z", TimeFunction.monomial(2)),
]


@pytest.mark.parametrize("rep", REPRESENTATIVES, ids=lambda g: repr(g)[:40])
def test_normalization_idempotent(rep):
    r = normalize_1d(rep)
    assert coeff_gap(r.representative, rep) <= 1e-12


def test_report_json_shape():
    js = normalize_1d(plane_basis("dt") + plane_basis("dy").scale(5)).to_json()
    assert set(js) == {"class", "representative", "witness", "scale", "residual"}
    assert js["witness"][0]["element"] == "D"


# ----------------------------------------------------------------------
# two-dimensional subalgebras
# ----------------------------------------------------------------------

def test_closure_examples():
    res = closure_check_2d(plane_basis("D"), plane_basis("dt"))
    assert res.closed and res.coefficients == pytest.approx((0.0, -1.0), abs=1e-12)
    assert not closure_check_2d(sphere_basis("J1"), sphere_basis("J2")).closed
    res = closure_check_2d(plane_basis("X", TimeFunction.cos(2.0)), plane_basis("Z", TimeFunction.exp(0.5)))
    assert res.closed and res.coefficients == pytest.approx((0.0, 0.0), abs=1e-12)


def test_closure_rejects_dependent_pair():
    with pytest.raises(ValueError):
        closure_check_2d(plane_basis("D"), plane_basis("D").scale(2))


@pytest.mark.parametrize("algebra", ["bplane", "sphere0"])
def test_catalogue_patterns_close(algebra):
    for pattern in canonical_2d_catalogue(algebra):
        v1, v2 = pattern.instantiate()
        assert closure_check_2d(v1, v2, pattern.domain).closed, pattern.name


def test_catalogue_instantiation_examples():
    plane = canonical_2d_catalogue("bplane")
    v1, v2 = plane[0].instantiate()
    assert coeff_gap(v1, plane_basis("D")) == 0 and coeff_gap(v2, plane_basis("dt")) == 0
    sphere = {p.name: p for p in canonical_2d_catalogue("sphere0")}
    res = closure_check_2d(*sphere["<dt, J1 + Z(c)>"].instantiate(c=1.0))
    assert res.closed and np.allclose(res.coefficients, 0)
    pw = {p.name: p for p in plane}["<D, X(|t|^a) + c Z(|t|^(a-2))>"]
    res = closure_check_2d(*pw.instantiate(a=1.0, c=0.0), pw.domain)
    assert res.closed and res.coefficients == pytest.approx((0.0, 2.0), abs=1e-9)


def test_printed_drift_pattern_only_closes_without_drift():
    assert not closure_check_2d(*printed_drift_pattern(0.6, -1.3, 0.25)).closed
    assert closure_check_2d(*printed_drift_pattern(0.0, -1.3, 0.25)).closed
    assert closure_check_2d(*printed_drift_pattern(0.6, 0.0, 0.25)).closed


def test_catalogue_rejects_unknown_algebra():
    with pytest.raises(ValueError):
        canonical_2d_catalogue("fplane")


def test_no_warning_on_beta_plane():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        adjoint_closed(plane_basis("dy"), 0.3, plane_basis("D"))
