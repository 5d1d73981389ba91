"""Generators of the symmetry algebras and their Lie brackets.

Plane generators are written in the basis of the f-plane algebra

    a_D1 D1 + a_D2 D2 + a_J J + a_Jt J^t + a_t d_t + X(f) + Y(h) + Z(g)

with

    D1  = t d_t - psi d_psi
    D2  = x d_x + y d_y + 2 psi d_psi
    J   = -y d_x + x d_y
    J^t = -t y d_x + t x d_y + (x^2 + y^2)/2 d_psi
    X(f) = f d_x - f' y d_psi
    Y(h) = h d_y + h' x d_psi
    Z(g) = g d_psi

The beta-plane algebra is the subalgebra spanned by D = D1 - D2, d_t,
d_y = Y(1), X(f) and Z(g).

Sphere generators use a_D D + a_t d_t + a_1 J1 + a_2 J2 + a_3 J3 + Z(g) with
D = t d_t - psi d_psi and the rotations J_i of the unit sphere.  A nonzero
``omega`` marks a generator of the rotating-frame algebra; its coefficients
are those of the rest-frame generator it corresponds to under the frame map
lambda -> lambda + omega t, psi -> psi - omega mu.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..exceptions import DomainError, FlavorMismatch
from ..timefn import TimeFunction, as_timefn, sample_times

BPLANE = "bplane"
FPLANE = "fplane"
SPHERE0 = "sphere0"
SPHERE_OMEGA = "sphereOmega"

_ZERO = TimeFunction()


def _tf(x):
    return as_timefn(x)


@dataclass(frozen=True)
class PlaneGenerator:
    """Element of the f-plane algebra, or of its beta-plane subalgebra."""

    aD1: float = 0.0
    aD2: float = 0.0
    aJ: float = 0.0
    aJt: float = 0.0
    at: float = 0.0
    f: TimeFunction = field(default=_ZERO)
    h: TimeFunction = field(default=_ZERO)
    g: TimeFunction = field(default=_ZERO)
    flavor: str = BPLANE

    def __post_init__(self):
        for name in ("aD1", "aD2", "aJ", "aJt", "at"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("f", "h", "g"):
            object.__setattr__(self, name, _tf(getattr(self, name)))
        if self.flavor not in (BPLANE, FPLANE):
            raise ValueError(f"unknown plane flavor {self.flavor!r}")
        if self.flavor == BPLANE:
            if self.aD2 != -self.aD1 or self.aJ or self.aJt or not self.h.is_constant() and self.h:
                raise ValueError(
                    "beta-plane generators need a_D2 = -a_D1, no rotations and constant h"
                )

    @classmethod
    def beta(cls, aD=0.0, at=0.0, ay=0.0, f=0.0, g=0.0) -> "PlaneGenerator":
        """``aD D + at d_t + ay d_y + X(f) + Z(g)`` in the beta-plane algebra."""
        return cls(aD1=aD, aD2=-float(aD), at=at, h=ay, f=f, g=g, flavor=BPLANE)

    @property
    def algebra(self) -> str:
        return self.flavor

    @property
    def aD(self) -> float:
        return self.aD1

    @property
    def ay(self) -> float:
        return self.h.constant_value() if self.h else 0.0

    def scalars(self) -> np.ndarray:
        return np.array([self.aD1, self.aD2, self.aJ, self.aJt, self.at])

    def functions(self) -> tuple:
        return (self.f, self.h, self.g)

    def with_(self, **kw) -> "PlaneGenerator":
        return replace(self, **kw)

    def __add__(self, other):
        _same_algebra(self, other)
        s = self.scalars() + other.scalars()
        return PlaneGenerator(*s, self.f + other.f, self.h + other.h, self.g + other.g, flavor=self.flavor)

    def scale(self, c: float) -> "PlaneGenerator":
        s = self.scalars() * c
        return PlaneGenerator(*s, self.f * c, self.h * c, self.g * c, flavor=self.flavor)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return f"PlaneGenerator[{self.flavor}]({_describe(self)})"


@dataclass(frozen=True)
class SphereGenerator:
    """Element of the sphere algebra in the rest frame (omega=0) or rotating frame."""

    aD: float = 0.0
    at: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    g: TimeFunction = field(default=_ZERO)
    omega: float = 0.0

    def __post_init__(self):
        for name in ("aD", "at", "a1", "a2", "a3", "omega"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "g", _tf(self.g))

    @property
    def algebra(self) -> str:
        return SPHERE0 if self.omega == 0 else SPHERE_OMEGA

    @property
    def rotation(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    def scalars(self) -> np.ndarray:
        return np.array([self.aD, self.at, self.a1, self.a2, self.a3])

    def functions(self) -> tuple:
        return (self.g,)

    def with_(self, **kw) -> "SphereGenerator":
        return replace(self, **kw)

    def __add__(self, other):
        _same_algebra(self, other)
        s = self.scalars() + other.scalars()
        return SphereGenerator(*s, self.g + other.g, omega=self.omega)

    def scale(self, c: float) -> "SphereGenerator":
        s = self.scalars() * c
        return SphereGenerator(*s, self.g * c, omega=self.omega)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return f"SphereGenerator[{self.algebra}]({_describe(self)})"


Generator = PlaneGenerator | SphereGenerator


def _same_algebra(v, w):
    if type(v) is not type(w) or v.algebra != w.algebra or getattr(v, "omega", 0) != getattr(w, "omega", 0):
        raise FlavorMismatch(f"cannot combine {v.algebra} with {w.algebra} generators")


def _describe(v) -> str:
    if isinstance(v, PlaneGenerator) and v.flavor == BPLANE:
        pairs = basis_decomposition(v)
        return " + ".join(f"{c:.6g}*{n}" if n in ("D", "dt", "dy") else f"{n}({c!r})" for n, c in pairs) or "0"
    if isinstance(v, PlaneGenerator):
        names = ("D1", "D2", "J", "Jt", "dt")
        fn = (("X", v.f), ("Y", v.h), ("Z", v.g))
    else:
        names = ("D", "dt", "J1", "J2", "J3")
        fn = (("Z", v.g),)
    parts = [f"{c:.6g}*{n}" for c, n in zip(v.scalars(), names) if c]
    parts += [f"{n}({f!r})" for n, f in fn if f]
    return " + ".join(parts) or "0"


# ----------------------------------------------------------------------
# basis elements
# ----------------------------------------------------------------------

def plane_basis(name: str, fn=None, flavor: str = BPLANE) -> PlaneGenerator:
    """Basis element by name: D, dt, dy, X, Z (beta-plane) or D1, D2, J, Jt, Y (f-plane)."""
    fn = _tf(1.0 if fn is None else fn)
    if name == "D":
        return PlaneGenerator.beta(aD=1.0) if flavor == BPLANE else PlaneGenerator(aD1=1, aD2=-1, flavor=flavor)
    table = {
        "dt": dict(at=1.0),
        "dy": dict(h=_tf(1.0)),
        "X": dict(f=fn),
        "Z": dict(g=fn),
        "D1": dict(aD1=1.0),
        "D2": dict(aD2=1.0),
        "J": dict(aJ=1.0),
        "Jt": dict(aJt=1.0),
        "Y": dict(h=fn),
    }
    if name not in table:
        raise KeyError(f"unknown plane basis element {name!r}")
    return PlaneGenerator(flavor=flavor, **table[name])


def sphere_basis(name: str, fn=None, omega: float = 0.0) -> SphereGenerator:
    """Basis element by name: D, dt, J1, J2, J3, Z."""
    fn = _tf(1.0 if fn is None else fn)
    table = {
        "D": dict(aD=1.0),
        "dt": dict(at=1.0),
        "J1": dict(a1=1.0),
        "J2": dict(a2=1.0),
        "J3": dict(a3=1.0),
        "Z": dict(g=fn),
    }
    if name not in table:
        raise KeyError(f"unknown sphere basis element {name!r}")
    return SphereGenerator(omega=omega, **table[name])


def basis_decomposition(v) -> list[tuple[str, float | TimeFunction]]:
    """Nonzero basis components of ``v`` as ``(name, coefficient)`` pairs."""
    if isinstance(v, PlaneGenerator):
        if v.flavor == BPLANE:
            pairs = [("D", v.aD1), ("dt", v.at), ("dy", v.ay), ("X", v.f), ("Z", v.g)]
        else:
            pairs = [("D1", v.aD1), ("D2", v.aD2), ("J", v.aJ), ("Jt", v.aJt), ("dt", v.at),
                     ("X", v.f), ("Y", v.h), ("Z", v.g)]
    else:
        pairs = [("D", v.aD), ("dt", v.at), ("J1", v.a1), ("J2", v.a2), ("J3", v.a3), ("Z", v.g)]
    return [(n, c) for n, c in pairs if (c if isinstance(c, TimeFunction) else c != 0)]


# ----------------------------------------------------------------------
# brackets
# ----------------------------------------------------------------------

def commutator(v, w):
    """Lie bracket ``[v, w]`` of two generators of the same algebra."""
    _same_algebra(v, w)
    if isinstance(v, PlaneGenerator):
        return _plane_bracket(v, w)
    return _sphere_bracket(v, w)


def _plane_bracket(v: PlaneGenerator, w: PlaneGenerator) -> PlaneGenerator:
    a1, a2, aJ, aK, at = v.scalars()
    b1, b2, bJ, bK, bt = w.scalars()
    f, h, g = v.functions()
    F, H, G = w.functions()
    T = lambda u: u.mul_tpow(1)  # noqa: E731
    d = lambda u: u.derivative()  # noqa: E731

    # [D1, dt] = -dt, [D1, Jt] = Jt, [dt, Jt] = J
    s_t = at * b1 - a1 * bt
    s_Jt = a1 * bK - aK * b1
    s_J = at * bK - aK * bt

    X = (T(d(F)) * a1 - T(d(f)) * b1) + (f * b2 - F * a2) + (d(F) * at - d(f) * bt)
    X = X + (H * aJ - h * bJ) + (T(H) * aK - T(h) * bK)
    Y = (T(d(H)) * a1 - T(d(h)) * b1) + (h * b2 - H * a2) + (d(H) * at - d(h) * bt)
    Y = Y + (f * bJ - F * aJ) + (T(f) * bK - T(F) * aK)
    Z = ((G + T(d(G))) * a1 - (g + T(d(g))) * b1) + (g * (2 * b2) - G * (2 * a2))
    Z = Z + (d(G) * at - d(g) * bt) + d(f.multiply(H) - F.multiply(h))
    if v.flavor == BPLANE:
        # beta-plane brackets keep Y constant; drop rounding residue
        Y = _tf(Y(0.0)) if Y else Y
    return PlaneGenerator(0.0, 0.0, s_J, s_Jt, s_t, X, Y, Z, flavor=v.flavor)


def _sphere_bracket(v: SphereGenerator, w: SphereGenerator) -> SphereGenerator:
    # [dt, D] = dt, [D, Z(g)] = Z(g + t g'), [dt, Z(g)] = Z(g'), [Ji, Jj] = eps_ijk Jk
    s_t = v.at * w.aD - v.aD * w.at
    rot = np.cross(v.rotation, w.rotation)
    G, g = w.g, v.g
    Z = (G + G.derivative().mul_tpow(1)) * v.aD - (g + g.derivative().mul_tpow(1)) * w.aD
    Z = Z + G.derivative() * v.at - g.derivative() * w.at
    return SphereGenerator(0.0, s_t, *rot, Z, omega=v.omega)


# ----------------------------------------------------------------------
# comparisons
# ----------------------------------------------------------------------

def distance(v, w, domain: str | None = None) -> tuple[float, float]:
    """Sup-norm distance between generators: (scalar part, function part)."""
    _same_algebra(v, w)
    ds = float(np.max(np.abs(v.scalars() - w.scalars())))
    dom = domain
    for fn in v.functions() + w.functions():
        dom = dom or fn.domain
    ts = sample_times(dom)
    df = 0.0
    for a, b in zip(v.functions(), w.functions()):
        df = max(df, float(np.max(np.abs(a(ts) - b(ts)))))
    return ds, df


def is_zero(v, tol: float = 0.0, domain: str | None = None) -> bool:
    zero = v.scale(0.0)
    ds, df = distance(v, zero, domain)
    return ds <= tol and df <= tol


# ----------------------------------------------------------------------
# vector fields
# ----------------------------------------------------------------------

def eval_vector_field(v, point):
    """Infinitesimal coefficients of ``v`` at ``point``.

    ``point`` is ``(t, x, y, psi)`` on the plane and ``(t, lambda, mu, psi)``
    on the sphere; entries may be numpy arrays.  Returns the tuple
    ``(xi_t, xi_1, xi_2, xi_psi)``.
    """
    t, c1, c2, psi = (np.asarray(p, dtype=float) for p in point)
    if isinstance(v, PlaneGenerator):
        return _plane_field(v, t, c1, c2, psi)
    if v.omega == 0:
        return _sphere_field(v, t, c1, c2, psi)
    om = v.omega
    xt, xl, xm, xp = _sphere_field(v, t, c1 + om * t, c2, psi - om * c2)
    return xt, xl - om * xt, xm, xp + om * xm


def _plane_field(v, t, x, y, psi):
    f, h, g = v.f(t), v.h(t), v.g(t)
    fp, hp = v.f.derivative()(t), v.h.derivative()(t)
    xi_t = v.aD1 * t + v.at + 0 * x
    xi_x = v.aD2 * x - v.aJ * y - v.aJt * t * y + f
    xi_y = v.aD2 * y + v.aJ * x + v.aJt * t * x + h
    xi_p = (2 * v.aD2 - v.aD1) * psi + 0.5 * v.aJt * (x**2 + y**2) - fp * y + hp * x + g
    return xi_t, xi_x, xi_y, xi_p


def _sphere_field(v, t, lam, mu, psi):
    if (v.a2 or v.a3) and np.any(np.abs(mu) >= 1):
        raise DomainError("J2/J3 are singular at the poles |mu| = 1")
    s = np.sqrt(np.clip(1 - mu**2, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        rl = np.where(s > 0, mu / np.where(s > 0, s, 1.0), 0.0)
    xi_t = v.aD * t + v.at + 0 * lam
    xi_l = v.a1 + rl * (v.a2 * np.sin(lam) + v.a3 * np.cos(lam))
    xi_m = s * (v.a2 * np.cos(lam) - v.a3 * np.sin(lam))
    xi_p = -v.aD * psi + v.g(t) + 0 * lam
    return xi_t, xi_l, xi_m, xi_p


def rotating_frame_basis(name: str, omega: float, fn=None) -> SphereGenerator:
    """Rotating-frame basis element in the conventional coordinates of that frame.

    The rotating-frame time translation ``d_t`` corresponds to the rest-frame
    generator ``d_t + omega J1``; all other basis elements keep their
    coefficients under the frame map.
    """
    v = sphere_basis(name, fn, omega=omega)
    if name == "dt":
        v = v.with_(a1=omega)
    return v


def map_generator_between_frames(v: SphereGenerator, omega: float, direction: str = "toRest") -> SphereGenerator:
    """Push a generator through the frame map.

    ``toRest`` takes a rotating-frame generator (``v.omega == omega``) to the
    rest-frame algebra, ``toRotating`` goes the other way.
    """
    if direction == "toRest":
        if v.omega != omega:
            raise FlavorMismatch(f"generator lives in frame omega={v.omega}, not {omega}")
        return v.with_(omega=0.0)
    if direction == "toRotating":
        if v.omega != 0:
            raise FlavorMismatch("expected a rest-frame generator")
        return v.with_(omega=omega)
    raise ValueError(f"unknown direction {direction!r}")
