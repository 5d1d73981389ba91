"""Finite symmetry transformations and their action on solutions.

Every transformation here is projectable and affine in the stream function,

    (t, c1, c2, psi) -> (T(t, c1, c2), C1(...), C2(...), A psi + B(t, c1, c2)),

so it is stored as sympy expressions for the base map, its inverse, the
constant ``A`` and the shift ``B``.  Push-forwards of :class:`~vortsym.fields.Field`
objects are then plain substitutions and keep exact derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import sympy as sp

from ..fields import PLANE, SPHERE, Field, base_symbols, compile_expr
from ..timefn import TimeFunction
from .algebra import BPLANE, PlaneGenerator, SphereGenerator, basis_decomposition

TWO_PI = 2 * math.pi


@dataclass(frozen=True, eq=False)
class PointTransformation:
    """Invertible point map, affine in psi.

    ``forward`` gives the new base coordinates in terms of the old ones;
    ``inverse`` gives the old base coordinates in terms of the new ones (both
    written with the same three base symbols).  ``psi_shift`` is a function
    of the old base coordinates.
    """

    geometry: str
    forward: tuple
    inverse: tuple
    psi_scale: float = 1.0
    psi_shift: sp.Expr = sp.Integer(0)
    label: str = ""
    epsilon: float | None = None

    @property
    def symbols(self):
        return base_symbols(self.geometry)

    def _sub(self, exprs, images):
        mapping = dict(zip(self.symbols, images))
        return tuple(sp.sympify(e).subs(mapping, simultaneous=True) for e in exprs)

    def apply(self, t, c1, c2, psi):
        """Map points; longitudes are returned in [0, 2 pi)."""
        fwd = getattr(self, "_fwd_cache", None)
        if fwd is None:
            fwd = compile_expr(list(self.forward) + [self.psi_shift], self.symbols)
            object.__setattr__(self, "_fwd_cache", fwd)
        t, c1, c2, psi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, c1, c2, psi)))
        nt, n1, n2, b = (np.broadcast_to(np.asarray(v, float), t.shape) for v in fwd(t, c1, c2))
        if self.geometry == SPHERE:
            n1 = np.mod(n1, TWO_PI)
        return nt, n1, n2, self.psi_scale * psi + b

    def inverse_transform(self) -> "PointTransformation":
        shift = self._sub([self.psi_shift], self.inverse)[0]
        return PointTransformation(
            self.geometry,
            self.inverse,
            self.forward,
            1.0 / self.psi_scale,
            -shift / self.psi_scale,
            f"inverse({self.label})",
            None if self.epsilon is None else -self.epsilon,
        )

    def then(self, other: "PointTransformation") -> "PointTransformation":
        """Composition ``other o self`` (apply self first)."""
        return compose(other, self)

    def pushforward(self, field: Field) -> Field:
        """Image of a solution: psi_new(X) = A psi(base^-1 X) + B(base^-1 X)."""
        if field.geometry != self.geometry:
            raise ValueError("field and transformation live on different geometries")
        old = self.inverse
        mapping = dict(zip(self.symbols, old))
        expr = self.psi_scale * field.expr.subs(mapping, simultaneous=True)
        expr = expr + sp.sympify(self.psi_shift).subs(mapping, simultaneous=True)
        return Field(expr, field.geometry, self._pulled_domain(field), f"{self.label}*({field.label})")

    def _pulled_domain(self, field: Field):
        """Domain of the image: points whose preimage lies in the field's domain."""
        if field.domain is None:
            return None
        back = compile_expr(list(self.inverse), self.symbols)
        inner = field.domain

        def domain(t, a, b):
            ot, oa, ob = back(t, a, b)
            return inner(*np.broadcast_arrays(np.asarray(ot, float), np.asarray(oa, float), np.asarray(ob, float)))

        return domain


def compose(outer: PointTransformation, inner: PointTransformation) -> PointTransformation:
    """``outer o inner``."""
    if outer.geometry != inner.geometry:
        raise ValueError("cannot compose transformations on different geometries")
    fwd = outer._sub(outer.forward, inner.forward)
    inv = inner._sub(inner.inverse, outer.inverse)
    shift = outer.psi_scale * sp.sympify(inner.psi_shift) + outer._sub([outer.psi_shift], inner.forward)[0]
    return PointTransformation(
        outer.geometry, fwd, inv, outer.psi_scale * inner.psi_scale, shift, f"{outer.label}o{inner.label}"
    )


def identity(geometry: str) -> PointTransformation:
    s = base_symbols(geometry)
    return PointTransformation(geometry, s, s, 1.0, sp.Integer(0), "id")


# ----------------------------------------------------------------------
# flows of basis elements
# ----------------------------------------------------------------------

def flow(v, eps: float) -> PointTransformation:
    """One-parameter group ``exp(eps v)`` of a basis generator.

    Accepted are single basis elements with any coefficient, and on the
    f-plane any combination of the two scalings D1 and D2.  Rotating-frame
    sphere flows are conjugated through the frame map.
    """
    if isinstance(v, PlaneGenerator):
        return _plane_flow(v, float(eps))
    if isinstance(v, SphereGenerator):
        if v.omega:
            rest = _sphere_flow(v.with_(omega=0.0), float(eps))
            to_rest = frame_map(v.omega, "toRest")
            out = compose(frame_map(v.omega, "toRotating"), compose(rest, to_rest))
            return PointTransformation(out.geometry, out.forward, out.inverse, out.psi_scale,
                                       out.psi_shift, f"exp({eps}*{v!r})", float(eps))
        return _sphere_flow(v, float(eps))
    raise TypeError(f"not a generator: {v!r}")


def _single(v):
    parts = basis_decomposition(v)
    if len(parts) != 1:
        raise ValueError(f"flow needs a single basis element, got {v!r}")
    return parts[0]


def _plane_flow(v: PlaneGenerator, e: float) -> PointTransformation:
    t, x, y = base_symbols(PLANE)
    label = f"exp({e}*{v!r})"
    parts = basis_decomposition(v)
    names = {n for n, _ in parts}
    if names and names <= {"D", "D1", "D2"}:
        s1, s2 = v.aD1 * e, v.aD2 * e
        fwd = (t * sp.exp(s1), x * sp.exp(s2), y * sp.exp(s2))
        inv = (t * sp.exp(-s1), x * sp.exp(-s2), y * sp.exp(-s2))
        return PointTransformation(PLANE, fwd, inv, math.exp(2 * s2 - s1), sp.Integer(0), label, e)
    name, c = _single(v)
    if isinstance(c, TimeFunction):
        fn = (c * e).to_sympy(t)
        dfn = sp.diff(fn, t)
        if name == "X":
            return PointTransformation(PLANE, (t, x + fn, y), (t, x - fn, y), 1.0, -dfn * y, label, e)
        if name == "Y":
            return PointTransformation(PLANE, (t, x, y + fn), (t, x, y - fn), 1.0, dfn * x, label, e)
        if name == "Z":
            return PointTransformation(PLANE, (t, x, y), (t, x, y), 1.0, fn, label, e)
    a = float(c) * e
    if name == "dt":
        return PointTransformation(PLANE, (t + a, x, y), (t - a, x, y), 1.0, sp.Integer(0), label, e)
    if name == "dy":
        return PointTransformation(PLANE, (t, x, y + a), (t, x, y - a), 1.0, sp.Integer(0), label, e)
    if name == "J":
        ca, sa = math.cos(a), math.sin(a)
        fwd = (t, ca * x - sa * y, sa * x + ca * y)
        inv = (t, ca * x + sa * y, -sa * x + ca * y)
        return PointTransformation(PLANE, fwd, inv, 1.0, sp.Integer(0), label, e)
    if name == "Jt":
        ca, sa = sp.cos(a * t), sp.sin(a * t)
        fwd = (t, ca * x - sa * y, sa * x + ca * y)
        inv = (t, ca * x + sa * y, -sa * x + ca * y)
        return PointTransformation(PLANE, fwd, inv, 1.0, a * (x**2 + y**2) / 2, label, e)
    raise ValueError(f"no closed-form flow for {name}")


def _sphere_flow(v: SphereGenerator, e: float) -> PointTransformation:
    t, lam, mu = base_symbols(SPHERE)
    label = f"exp({e}*{v!r})"
    name, c = _single(v)
    if name == "Z":
        fn = (c * e).to_sympy(t)
        return PointTransformation(SPHERE, (t, lam, mu), (t, lam, mu), 1.0, fn, label, e)
    a = float(c) * e
    if name == "D":
        fwd = (t * sp.exp(a), lam, mu)
        inv = (t * sp.exp(-a), lam, mu)
        return PointTransformation(SPHERE, fwd, inv, math.exp(-a), sp.Integer(0), label, e)
    if name == "dt":
        return PointTransformation(SPHERE, (t + a, lam, mu), (t - a, lam, mu), 1.0, sp.Integer(0), label, e)
    if name == "J1":
        return PointTransformation(SPHERE, (t, lam + a, mu), (t, lam - a, mu), 1.0, sp.Integer(0), label, e)
    if name in ("J2", "J3"):
        return PointTransformation(
            SPHERE, _rotation(name, a), _rotation(name, -a), 1.0, sp.Integer(0), label, e
        )
    raise ValueError(f"no closed-form flow for {name}")


def _rotation(name: str, a: float):
    """Rigid rotation of the embedded unit sphere generated by J2 or J3."""
    t, lam, mu = base_symbols(SPHERE)
    s = sp.sqrt(1 - mu**2)
    X, Y, Z = s * sp.cos(lam), s * sp.sin(lam), mu
    ca, sa = math.cos(a), math.sin(a)
    if name == "J2":
        # J2 moves (X, Z) along (-Z, X)
        X, Z = ca * X - sa * Z, sa * X + ca * Z
    else:
        # J3 moves (Y, Z) along (Z, -Y)
        Y, Z = ca * Y + sa * Z, -sa * Y + ca * Z
    return (t, sp.atan2(Y, X), Z)


# ----------------------------------------------------------------------
# discrete symmetries and frames
# ----------------------------------------------------------------------

def discrete_symmetry(geometry: str, which: int) -> PointTransformation:
    """The two discrete symmetries of each equation.

    Plane: 1 is (t,x,y,psi) -> (-t,-x,y,psi), 2 is (t,x,y,psi) -> (t,x,-y,-psi).
    Sphere: 1 is (t,lam,mu,psi) -> (-t,-lam,mu,psi), 2 is (t,lam,mu,psi) -> (t,lam,-mu,-psi).
    """
    t, a, b = base_symbols(geometry)
    if which == 1:
        m = (-t, -a, b)
        return PointTransformation(geometry, m, m, 1.0, sp.Integer(0), f"{geometry}-discrete-1")
    if which == 2:
        m = (t, a, -b)
        return PointTransformation(geometry, m, m, -1.0, sp.Integer(0), f"{geometry}-discrete-2")
    raise ValueError("discrete symmetry index must be 1 or 2")


def frame_map(omega: float, direction: str = "toRest", radius: float = 1.0) -> PointTransformation:
    """Change between the rotating frame and the rest frame.

    ``toRest``: lambda -> lambda + omega t, psi -> psi - omega R^2 mu.
    """
    t, lam, mu = base_symbols(SPHERE)
    k = omega * radius**2
    if direction == "toRest":
        fwd, inv, shift = (t, lam + omega * t, mu), (t, lam - omega * t, mu), -k * mu
    elif direction == "toRotating":
        fwd, inv, shift = (t, lam - omega * t, mu), (t, lam + omega * t, mu), k * mu
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return PointTransformation(SPHERE, fwd, inv, 1.0, shift, f"frame-{direction}({omega})")


def pushforward(T: PointTransformation, field: Field) -> Field:
    return T.pushforward(field)


def frame_transform(field: Field, omega: float, direction: str = "toRest", radius: float = 1.0) -> Field:
    """Carry a sphere solution between the rotating frame and the rest frame."""
    return frame_map(omega, direction, radius).pushforward(field)


def generator_flavor(v) -> str:
    return v.flavor if isinstance(v, PlaneGenerator) else v.algebra


__all__ = [
    "PointTransformation",
    "compose",
    "identity",
    "flow",
    "discrete_symmetry",
    "frame_map",
    "frame_transform",
    "pushforward",
    "BPLANE",
]
