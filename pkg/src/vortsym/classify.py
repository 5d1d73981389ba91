"""Adjoint actions and normalization of subalgebras.

Conventions: ``Ad(exp(eps v)) w`` is the Lie series
``sum_n eps^n/n! {v^n, w}`` with ``{v^n, w} = (-1)^n [v, {v^(n-1), w}]``,
equivalently the solution of ``dw/deps = [w, v]``.  The closed forms below
are the exact sums of these series for every basis element of the
beta-plane and sphere algebras.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import UnsupportedOperation
from .generators.algebra import (
    BPLANE,
    FPLANE,
    PlaneGenerator,
    SphereGenerator,
    _same_algebra,
    basis_decomposition,
    commutator,
    distance,
    plane_basis,
    sphere_basis,
)
from .timefn import POS, PowerTerm, Term, TimeFunction, _from_complex, sample_times

REPLAY_TOL = 1e-9
SPAN_TOL = 1e-9
_ZERO = 1e-13


class AdjointFallbackWarning(UserWarning):
    """A closed form was unavailable and the Lie series was summed instead."""


# ----------------------------------------------------------------------
# adjoint actions
# ----------------------------------------------------------------------

def adjoint_series(v, eps: float, w, order: int = 12):
    """Partial sum of the Lie series through ``order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    _same_algebra(v, w)
    term, total = w, w
    for n in range(1, order + 1):
        term = commutator(v, term).scale(-eps / n)
        if _is_exact_zero(term):
            break
        total = total + term
    return total


def adjoint_ode_oracle(v, eps: float, w, steps: int = 200):
    """Classical RK4 integration of ``dw/deps = [w, v]`` from ``w(0) = w``.

    The right-hand side is linear in ``w``, so it is assembled once as a
    matrix over real coordinates (scalar coefficients and the real and
    imaginary parts of every term the flow can reach) and the RK4 steps are
    taken on that coordinate vector.  Powers of ``t`` beyond
    ``max power of w + _ORACLE_EXTRA_POWERS`` are truncated.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    _same_algebra(v, w)
    if eps == 0:
        return w
    coords = _Coordinates(w, v)
    x = coords.vector(w)
    A = coords.matrix
    h = eps / steps
    for _ in range(steps):
        k1 = A @ x
        k2 = A @ (x + k1 * (h / 2))
        k3 = A @ (x + k2 * (h / 2))
        k4 = A @ (x + k3 * h)
        x = x + (k1 + 2 * k2 + 2 * k3 + k4) * (h / 6)
    return coords.generator(x)


_ORACLE_EXTRA_POWERS = 40


def _scalar_basis(like) -> np.ndarray:
    if isinstance(like, PlaneGenerator) and like.flavor == BPLANE:
        # D = D1 - D2 and d_t; d_y lives in the h slot
        return np.array([[1.0, -1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0, 1.0]])
    return np.eye(len(like.scalars()))


def _assemble(like, scalars, functions):
    if isinstance(like, PlaneGenerator):
        return PlaneGenerator(*scalars, *functions, flavor=like.flavor)
    return SphereGenerator(*scalars, *functions, omega=like.omega)


def _term_units(key):
    """Unit functions for the real coordinates attached to a term key."""
    if key[0] == "pow":
        _, alpha, dom = key
        return [TimeFunction(power_terms=[PowerTerm(1.0, alpha, dom)])]
    k, a, b = key
    units = [TimeFunction([Term(1.0, k, a, b, 0.0)])]
    if b:
        units.append(TimeFunction([Term(1.0, k, a, b, math.pi / 2)]))
    return units


def _term_keys(fn: TimeFunction):
    for tm in fn.terms:
        w = tm.complex_coeff()
        yield (tm.power, tm.exprate, tm.oscrate), (w.real, w.imag)
    for pt in fn.power_terms:
        yield ("pow", pt.alpha, pt.domain), (pt.coeff,)


class _Coordinates:
    """Finite real coordinate system closed under ``u -> [u, v]``."""

    def __init__(self, w, v):
        self.like = w
        self.basis = _scalar_basis(w)
        nfun = len(w.functions())
        self.slots = [dict() for _ in range(nfun)]
        self.size = len(self.basis)
        self.max_power = max(
            [tm.power for fn in w.functions() for tm in fn.terms] + [0]
        ) + _ORACLE_EXTRA_POWERS
        columns: dict[int, object] = {}
        pending = [(None, i) for i in range(self.size)]
        for j, fn in enumerate(w.functions()):
            for key, _ in _term_keys(fn):
                pending += self._register(j, key)
        zero = [TimeFunction()] * nfun
        while pending:
            slot, item = pending.pop()
            if slot is None:
                units = [_assemble(w, self.basis[item], zero)]
                index = [item]
            else:
                index = self.slots[slot][item]
                units = []
                for unit in _term_units(item):
                    fns = list(zero)
                    fns[slot] = unit
                    units.append(_assemble(w, np.zeros(len(w.scalars())), fns))
            for i, u in zip(index, units):
                col = commutator(u, v)
                for j, fn in enumerate(col.functions()):
                    for key, _ in _term_keys(fn):
                        pending += self._register(j, key)
                columns[i] = col
        self.matrix = np.zeros((self.size, self.size))
        for i, col in columns.items():
            self.matrix[:, i] = self.vector(col)

    def _register(self, slot, key):
        if key in self.slots[slot] or (key[0] != "pow" and key[0] > self.max_power):
            return []
        n = len(_term_units(key))
        self.slots[slot][key] = list(range(self.size, self.size + n))
        self.size += n
        return [(slot, key)]

    def vector(self, gen) -> np.ndarray:
        x = np.zeros(self.size)
        coef, *_ = np.linalg.lstsq(self.basis.T, gen.scalars(), rcond=None)
        x[: len(self.basis)] = coef
        for j, fn in enumerate(gen.functions()):
            for key, vals in _term_keys(fn):
                idx = self.slots[j].get(key)
                if idx is not None:
                    x[idx] = vals[: len(idx)]
        return x

    def generator(self, x: np.ndarray):
        scalars = x[: len(self.basis)] @ self.basis
        fns = []
        for slot in self.slots:
            terms, powers = [], []
            for key, idx in slot.items():
                if key[0] == "pow":
                    powers.append(PowerTerm(float(x[idx[0]]), key[1], key[2]))
                else:
                    w = complex(x[idx[0]], x[idx[1]] if len(idx) > 1 else 0.0)
                    terms.append(_from_complex(w, *key))
            fns.append(TimeFunction(terms, powers))
        return _assemble(self.like, scalars, fns)


def adjoint_closed(v, eps: float, w):
    """Exact ``Ad(exp(eps v)) w`` for a basis element ``v`` (with coefficient).

    On the f-plane algebra no closed table is implemented; the Lie series
    (order 30) is returned with an :class:`AdjointFallbackWarning`.
    """
    _same_algebra(v, w)
    eps = float(eps)
    parts = basis_decomposition(v)
    if not parts or eps == 0:
        return w
    if len(parts) != 1:
        raise ValueError(f"adjoint_closed needs a single basis element, got {v!r}")
    name, c = parts[0]
    if isinstance(v, PlaneGenerator):
        if v.flavor == FPLANE:
            warnings.warn("no closed-form f-plane adjoint; summing the Lie series", AdjointFallbackWarning)
            return adjoint_series(v, eps, w, order=30)
        return _plane_adjoint(name, c, eps, w)
    return _sphere_adjoint(name, c, eps, w)


def _plane_adjoint(name, c, eps, w: PlaneGenerator) -> PlaneGenerator:
    aD, at, ay, f, g = w.aD, w.at, w.ay, w.f, w.g
    if name == "dt":
        e = eps * c
        return PlaneGenerator.beta(aD, at - e * aD, ay, f.shift(e), g.shift(e))
    if name == "D":
        e = eps * c
        s = math.exp(-e)
        return PlaneGenerator.beta(aD, at / s, ay * s, f.affine_sub(s) * s, g.affine_sub(s) * s**3)
    if name == "dy":
        e = eps * c
        return PlaneGenerator.beta(aD, at, ay + e * aD, f, g + f.derivative() * e)
    if name == "X":
        phi = c * eps
        dphi = phi.derivative()
        df = (phi + dphi.mul_tpow(1)) * aD + dphi * at
        return PlaneGenerator.beta(aD, at, ay, f + df, g - dphi * ay)
    if name == "Z":
        u = c * eps
        du = u.derivative()
        dg = (u * 3.0 + du.mul_tpow(1)) * aD + du * at
        return PlaneGenerator.beta(aD, at, ay, f, g + dg)
    raise ValueError(f"unknown beta-plane basis element {name!r}")


def _rot(axis: int, theta: float) -> np.ndarray:
    """Active rotation by ``theta`` about coordinate axis ``axis`` (0, 1, 2)."""
    c, s = math.cos(theta), math.sin(theta)
    i, j = (axis + 1) % 3, (axis + 2) % 3
    m = np.eye(3)
    m[i, i], m[i, j], m[j, i], m[j, j] = c, -s, s, c
    return m


def _sphere_adjoint(name, c, eps, w: SphereGenerator) -> SphereGenerator:
    if name == "dt":
        e = eps * c
        return w.with_(at=w.at - e * w.aD, g=w.g.shift(e))
    if name == "D":
        e = eps * c
        s = math.exp(-e)
        return w.with_(at=w.at / s, g=w.g.affine_sub(s) * s)
    if name in ("J1", "J2", "J3"):
        # d a / d eps = -e_i x a, i.e. rotation by -eps about axis i
        a = _rot(int(name[1]) - 1, -eps * c) @ w.rotation
        return w.with_(a1=a[0], a2=a[1], a3=a[2])
    if name == "Z":
        u = c * eps
        du = u.derivative()
        return w.with_(g=w.g + (u + du.mul_tpow(1)) * w.aD + du * w.at)
    raise ValueError(f"unknown sphere basis element {name!r}")


def _is_exact_zero(v) -> bool:
    return not np.any(v.scalars()) and not any(v.functions())


# ----------------------------------------------------------------------
# witnesses
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AdjointStep:
    """One step of a witness.

    ``element`` names a basis element (``D``, ``dt``, ``dy``, ``X``, ``Z`` on
    the plane; ``D``, ``dt``, ``J1``..``J3``, ``Z`` on the sphere) or the
    discrete map ``reflect_y`` (t, x, y, psi) -> (t, x, -y, -psi).  For
    ``X``/``Z`` steps ``param`` is the function multiplying the basis element
    (the group parameter is 1); otherwise it is the real group parameter.
    """

    element: str
    param: float | TimeFunction | None
    index: int

    def generator(self, like):
        """Basis generator of this step in the algebra of ``like``."""
        fn = self.param if isinstance(self.param, TimeFunction) else None
        if isinstance(like, PlaneGenerator):
            return plane_basis(self.element, fn)
        return sphere_basis(self.element, fn, omega=like.omega)

    def apply(self, w):
        if self.element == "reflect_y":
            return reflect_y(w)
        eps = 1.0 if isinstance(self.param, TimeFunction) else float(self.param)
        return adjoint_closed(self.generator(w), eps, w)

    def to_json(self):
        p = self.param.to_json() if isinstance(self.param, TimeFunction) else self.param
        return {"element": self.element, "param": p, "index": self.index}


def reflect_y(w: PlaneGenerator) -> PlaneGenerator:
    """Image of a beta-plane generator under (t, x, y, psi) -> (t, x, -y, -psi)."""
    return PlaneGenerator.beta(w.aD, w.at, -w.ay, w.f, -w.g)


@dataclass
class ClassificationReport:
    class_id: str
    representative: object
    steps: list[AdjointStep] = field(default_factory=list)
    scale: float = 1.0
    residual: float = 0.0
    domain: str | None = None

    def to_json(self):
        from .io import generator_to_json

        return {
            "class": self.class_id,
            "representative": generator_to_json(self.representative),
            "witness": [s.to_json() for s in self.steps],
            "scale": self.scale,
            "residual": self.residual,
        }


def replay_witness(v, steps, scale: float):
    """Apply the witness steps in order, then the overall rescaling."""
    for step in steps:
        v = step.apply(v)
    return v.scale(scale)


def _residual(report, v):
    got = replay_witness(v, report.steps, report.scale)
    ds, df = distance(got, report.representative, report.domain)
    return max(ds, df)


class _Recorder:
    def __init__(self, v):
        self.v = v
        self.steps: list[AdjointStep] = []
        self.scale = 1.0

    def ad(self, element, param):
        if isinstance(param, TimeFunction):
            if not param:
                return
        elif param == 0:
            return
        step = AdjointStep(element, param, len(self.steps))
        self.v = step.apply(self.v)
        self.steps.append(step)

    def reflect(self):
        step = AdjointStep("reflect_y", None, len(self.steps))
        self.v = step.apply(self.v)
        self.steps.append(step)

    def rescale(self, c):
        self.scale *= c
        self.v = self.v.scale(c)


def _nonzero(x: float, ref: float = 1.0) -> bool:
    return abs(x) > _ZERO * max(1.0, ref)


def _integral(f: TimeFunction, what: str) -> TimeFunction:
    try:
        return f.antiderivative()
    except UnsupportedOperation as err:
        raise UnsupportedOperation(f"{what}: {err}") from err


def _solve(fn, what: str):
    try:
        return fn()
    except UnsupportedOperation as err:
        raise UnsupportedOperation(f"kill quadrature {what} leaves the function algebra: {err}") from err


def _clean_plane(v: PlaneGenerator, aD=None, at=None, ay=None, f=None, g=None) -> PlaneGenerator:
    """Snap coefficients that the construction makes exact."""
    return PlaneGenerator.beta(
        v.aD if aD is None else aD,
        v.at if at is None else at,
        v.ay if ay is None else ay,
        v.f if f is None else f,
        v.g if g is None else g,
    )


def normalize_1d_plane(v: PlaneGenerator, domain: str = POS) -> ClassificationReport:
    """Map a beta-plane generator to its canonical one-dimensional representative.

    Args:
        v: nonzero beta-plane generator.
        domain: half-line used by the scaling-class kill quadratures, which
            are singular at t = 0.
    """
    if not isinstance(v, PlaneGenerator) or v.flavor != BPLANE:
        raise TypeError("normalize_1d_plane needs a beta-plane generator")
    if _is_exact_zero(v):
        raise ValueError("cannot classify the zero generator")
    rec = _Recorder(v)
    scale = float(np.max(np.abs(v.scalars()))) or 1.0
    dom = None
    if _nonzero(v.aD, scale):
        cls = "P-D"
        rec.rescale(1.0 / v.aD)
        rec.ad("dt", rec.v.at)
        rec.ad("dy", -rec.v.ay)
        rec.v = _clean_plane(rec.v, at=0.0, ay=0.0)
        f = rec.v.f
        if f:
            dom = domain
            phi = _solve(lambda: -_integral(f, "int f dt").mul_tpow(-1, domain), "-t^-1 int f dt")
            rec.ad("X", phi)
        g = rec.v.g
        if g:
            dom = domain
            u = _solve(lambda: -_integral(g.mul_tpow(2), "int t^2 g dt").mul_tpow(-3, domain), "-t^-3 int t^2 g dt")
            rec.ad("Z", u)
        rep = plane_basis("D")
    elif _nonzero(v.at, scale):
        rec.rescale(1.0 / v.at)
        if rec.v.f:
            rec.ad("X", -_integral(rec.v.f, "int f dt"))
        if rec.v.g:
            rec.ad("Z", -_integral(rec.v.g, "int g dt"))
        ay = rec.v.ay
        c = 0.0
        if _nonzero(ay):
            eps = math.log(abs(ay)) / 2
            rec.ad("D", eps)
            rec.rescale(math.exp(-eps))
            if ay < 0:
                rec.reflect()
            c = 1.0
        cls = "P-TY"
        rep = PlaneGenerator.beta(at=1.0, ay=c)
    elif _nonzero(v.ay, scale):
        rec.rescale(1.0 / v.ay)
        if rec.v.g:
            rec.ad("X", _integral(rec.v.g, "int g dt"))
        cls = "P-YX"
        rep = PlaneGenerator.beta(ay=1.0, f=rec.v.f)
    else:
        cls = "P-XZ"
        rep = PlaneGenerator.beta(f=v.f, g=v.g)
    dom = dom or v.f.domain or v.g.domain
    report = ClassificationReport(cls, rep, rec.steps, rec.scale, 0.0, dom)
    report.residual = _residual(report, v)
    return report


def normalize_1d_sphere(v: SphereGenerator, domain: str = POS) -> ClassificationReport:
    """Map a sphere generator to its canonical one-dimensional representative.

    The rotation part is first turned onto the J1 axis, keeping the sign of
    its J1 component, by at most one J1 and one J3 adjoint rotation.
    """
    if not isinstance(v, SphereGenerator):
        raise TypeError("normalize_1d_sphere needs a sphere generator")
    if _is_exact_zero(v):
        raise ValueError("cannot classify the zero generator")
    rec = _Recorder(v)
    a1, a2, a3 = v.rotation
    r = float(np.linalg.norm(v.rotation))
    if _nonzero(a2, r) or _nonzero(a3, r):
        # rotating a by -eps about axis 1 zeroes a3 when eps = atan2(a3, a2)
        rec.ad("J1", math.atan2(a3, a2))
        b1, b2 = rec.v.a1, rec.v.a2
        target = -1.0 if a1 < 0 else 1.0
        rec.ad("J3", math.atan2(target * b2, target * b1))
    r_signed = -r if a1 < 0 else r
    rec.v = rec.v.with_(a1=r_signed, a2=0.0, a3=0.0)
    scale = float(np.max(np.abs(v.scalars()))) or 1.0
    dom = None
    omega = v.omega
    if _nonzero(v.aD, scale):
        rec.rescale(1.0 / v.aD)
        rec.ad("dt", rec.v.at)
        rec.v = rec.v.with_(at=0.0)
        g = rec.v.g
        if g:
            dom = domain
            u = _solve(lambda: -_integral(g, "int g dt").mul_tpow(-1, domain), "-t^-1 int g dt")
            rec.ad("Z", u)
        cls = "S-DJ"
        rep = SphereGenerator(aD=1.0, a1=rec.v.a1, omega=omega)
    elif _nonzero(v.at, scale):
        rec.rescale(1.0 / v.at)
        if rec.v.g:
            rec.ad("Z", -_integral(rec.v.g, "int g dt"))
        a = rec.v.a1
        if _nonzero(a):
            eps = math.log(abs(a))
            rec.ad("D", eps)
            rec.rescale(math.exp(-eps))
            a = math.copysign(1.0, a)
        else:
            a = 0.0
        cls = "S-TJ"
        rep = SphereGenerator(at=1.0, a1=a, omega=omega)
    elif _nonzero(r, scale):
        rec.rescale(1.0 / rec.v.a1)
        cls = "S-JZ"
        rep = SphereGenerator(a1=1.0, g=rec.v.g, omega=omega)
    else:
        cls = "S-Z"
        rep = SphereGenerator(g=v.g, omega=omega)
    dom = dom or v.g.domain
    report = ClassificationReport(cls, rep, rec.steps, rec.scale, 0.0, dom)
    report.residual = _residual(report, v)
    return report


def normalize_1d(v, domain: str = POS) -> ClassificationReport:
    if isinstance(v, PlaneGenerator):
        return normalize_1d_plane(v, domain)
    return normalize_1d_sphere(v, domain)


# ----------------------------------------------------------------------
# two-dimensional subalgebras
# ----------------------------------------------------------------------

@dataclass
class ClosureResult:
    closed: bool
    coefficients: tuple[float, float]
    residual: float
    bracket: object


def _coefficient_vector(v, ts) -> np.ndarray:
    parts = [v.scalars()]
    parts += [np.asarray(fn(ts), dtype=float) for fn in v.functions()]
    return np.concatenate(parts)


def closure_check_2d(v1, v2, domain: str | None = None, tol: float = SPAN_TOL) -> ClosureResult:
    """Decide whether ``[v1, v2]`` lies in ``span{v1, v2}``.

    Scalars and function samples at Chebyshev times form one coefficient
    vector per generator; the bracket is expanded by least squares and the
    relative residual compared with ``tol``.
    """
    _same_algebra(v1, v2)
    dom = domain
    for fn in v1.functions() + v2.functions():
        dom = dom or fn.domain
    ts = sample_times(dom)
    A = np.column_stack([_coefficient_vector(v1, ts), _coefficient_vector(v2, ts)])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= tol * sv[0]:
        raise ValueError("closure_check_2d needs linearly independent generators")
    b = commutator(v1, v2)
    rhs = _coefficient_vector(b, ts)
    coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    res = float(np.max(np.abs(A @ coef - rhs))) / max(1.0, float(np.max(np.abs(A))))
    return ClosureResult(res <= tol, (float(coef[0]), float(coef[1])), res, b)


@dataclass(frozen=True)
class Pattern2D:
    """Parameterized two-dimensional subalgebra.

    ``build(**params)`` returns the pair ``(v1, v2)``; ``defaults`` is a
    parameter choice exercising every slot.
    """

    name: str
    build: object
    defaults: dict
    domain: str | None = None
    note: str = ""

    def instantiate(self, **params):
        merged = {**self.defaults, **params}
        return self.build(**merged)


def _absp(alpha, c=1.0):
    return TimeFunction.power(alpha, c, POS)


def canonical_2d_catalogue(algebra: str) -> list[Pattern2D]:
    """Inequivalent two-dimensional subalgebras as instantiable patterns.

    Power laws ``|t|^a`` live on the positive half-line.  The pair
    ``<dt + b dy, Z(...)>`` is shipped as ``<dt + b dy, Z(exp(a t))>``, the
    form that closes for all ``a, b``.
    """
    B = PlaneGenerator.beta
    if algebra == BPLANE:
        return [
            Pattern2D("<D, dt>", lambda: (B(aD=1), B(at=1)), {}),
            Pattern2D("<D, dy + a X(1)>", lambda a: (B(aD=1), B(ay=1, f=a)), {"a": 0.7}),
            Pattern2D(
                "<D, X(|t|^a) + c Z(|t|^(a-2))>",
                lambda a, c: (B(aD=1), B(f=_absp(a), g=_absp(a - 2, c))),
                {"a": 1.5, "c": 0.4},
                POS,
            ),
            Pattern2D("<D, Z(|t|^(a-2))>", lambda a: (B(aD=1), B(g=_absp(a - 2))), {"a": 0.5}, POS),
            Pattern2D(
                "<dt + b dy, X(e^(at)) + Z((abt+c)e^(at))>",
                lambda a, b, c: (
                    B(at=1, ay=b),
                    B(f=TimeFunction.exp(a), g=TimeFunction.exp(a, a * b, power=1) + TimeFunction.exp(a, c)),
                ),
                {"a": 0.6, "b": -1.3, "c": 0.25},
            ),
            Pattern2D(
                "<dt + b dy, Z(e^(at))>",
                lambda a, b: (B(at=1, ay=b), B(g=TimeFunction.exp(a))),
                {"a": 0.6, "b": -1.3},
            ),
            Pattern2D(
                "<dy + X(f1), X(1) + Z(g2)>",
                lambda f1, g2: (B(ay=1, f=f1), B(f=1.0, g=g2)),
                {"f1": TimeFunction.poly([0.2, 0.0, 1.0]), "g2": TimeFunction.sin(1.1)},
            ),
            Pattern2D(
                "<dy + X(f1), Z(g2)>",
                lambda f1, g2: (B(ay=1, f=f1), B(g=g2)),
                {"f1": TimeFunction.cos(0.8), "g2": TimeFunction.exp(-0.5)},
            ),
            Pattern2D(
                "<X(f1) + Z(g1), X(f2) + Z(g2)>",
                lambda f1, g1, f2, g2: (B(f=f1, g=g1), B(f=f2, g=g2)),
                {
                    "f1": TimeFunction.poly([0, 1]),
                    "g1": TimeFunction.cos(2.0),
                    "f2": TimeFunction.exp(0.3),
                    "g2": TimeFunction.poly([1, 0, -1]),
                },
            ),
        ]
    if algebra in ("sphere0", "sphere"):
        S = SphereGenerator
        return [
            Pattern2D("<D + a J1, dt>", lambda a: (S(aD=1, a1=a), S(at=1)), {"a": 0.8}),
            Pattern2D(
                "<D, J1 + Z(a/t)>",
                lambda a: (S(aD=1), S(a1=1, g=_absp(-1.0, a))),
                {"a": 1.7},
                POS,
            ),
            Pattern2D(
                "<D + a J1, Z(|t|^b)>",
                lambda a, b: (S(aD=1, a1=a), S(g=_absp(b))),
                {"a": -0.6, "b": 1.3},
                POS,
            ),
            Pattern2D("<dt, J1 + Z(c)>", lambda c: (S(at=1), S(a1=1, g=c)), {"c": 1.0}),
            Pattern2D(
                "<dt + c J1, Z(e^(c~ t))>",
                lambda c, ct: (S(at=1, a1=c), S(g=TimeFunction.exp(ct))),
                {"c": 0.0, "ct": 1.0},
            ),
            Pattern2D(
                "<J1 + Z(g1), Z(g2)>",
                lambda g1, g2: (S(a1=1, g=g1), S(g=g2)),
                {"g1": TimeFunction.sin(0.5), "g2": TimeFunction.poly([1, 2])},
            ),
            Pattern2D(
                "<Z(g1), Z(g2)>",
                lambda g1, g2: (S(g=g1), S(g=g2)),
                {"g1": TimeFunction.exp(1.0), "g2": TimeFunction.cos(3.0)},
            ),
        ]
    raise ValueError(f"no 2D catalogue for algebra {algebra!r}")


def printed_drift_pattern(a: float, b: float, c: float):
    """The pair ``<dt + b dy, Z((abt + c) e^(at))>`` with the printed coefficient.

    Closed only when ``a b = 0``; kept to document why the catalogue uses
    ``Z(e^(at))`` instead.
    """
    B = PlaneGenerator.beta
    g = TimeFunction.exp(a, a * b, power=1) + TimeFunction.exp(a, c)
    return B(at=1, ay=b), B(g=g)


__all__ = [
    "AdjointFallbackWarning",
    "AdjointStep",
    "ClassificationReport",
    "ClosureResult",
    "Pattern2D",
    "adjoint_closed",
    "adjoint_ode_oracle",
    "adjoint_series",
    "canonical_2d_catalogue",
    "closure_check_2d",
    "normalize_1d",
    "normalize_1d_plane",
    "normalize_1d_sphere",
    "printed_drift_pattern",
    "reflect_y",
    "replay_witness",
]
