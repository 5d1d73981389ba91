"""Closed-form exact solutions of the plane and sphere vorticity equations.

Each constructor returns a :class:`SolutionFamily` whose stream function is a
sympy expression, so derivatives of any order are exact.  Two sphere
families involve a quadrature or an ODE profile; they enter the expression as
numeric sympy functions with exact derivative rules.

Profile arguments (``F`` and ``w``) are one-variable expressions in the
symbol ``s`` given as sympy expressions, strings such as ``"sin(s)"``,
numbers, or :class:`~vortsym.timefn.TimeFunction` objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.integrate import quad, solve_ivp

from .fields import LAM, MU, PLANE, SPHERE, T, X, Y, Field, compile_expr, numeric_function
from .legendre import legendre_sympy
from .timefn import TimeFunction, as_timefn

S = sp.Symbol("s", real=True)

QUAD_EPSABS = 1e-10
POLE_MARGIN = 1e-3


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """A member of an exact solution family.

    Attributes:
        family_id: catalogue name, e.g. ``"RossbyWave"``.
        params: constructor parameters as given (after coercion).
        field: the stream function.
        omega: rotation rate of the frame (sphere families only).
        beta: gradient of the Coriolis parameter (plane families only).
        origin: short description of how the family arises.
        numeric: True when evaluation involves quadrature or an ODE solve.
    """

    family_id: str
    params: dict
    field: Field
    omega: float | None = None
    beta: float | None = None
    origin: str = ""
    numeric: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def geometry(self) -> str:
        return self.field.geometry

    @property
    def expr(self) -> sp.Expr:
        return self.field.expr

    def eval(self, t, c1, c2):
        return self.field(t, c1, c2)

    def eval_derivs(self, order, t, c1, c2):
        """Partial derivative with multi-index ``order = (n_t, n_1, n_2)``."""
        return self.field.d(tuple(order), t, c1, c2)

    def __repr__(self):
        return f"SolutionFamily({self.family_id}, {self.params})"


# ----------------------------------------------------------------------
# parameter coercion
# ----------------------------------------------------------------------

def _tf(value) -> TimeFunction:
    if isinstance(value, (list, tuple)):
        return TimeFunction.from_json(list(value))
    return as_timefn(value)


def _profile(value) -> sp.Expr:
    if isinstance(value, TimeFunction):
        return value.to_sympy(S)
    if isinstance(value, str):
        return sp.sympify(value, locals={"s": S})
    return sp.sympify(value).subs(sp.Symbol("s"), S)


def _expr3(value) -> sp.Expr:
    """Expression in (t, x, y), strings allowed."""
    if isinstance(value, str):
        return sp.sympify(value, locals={"t": T, "x": X, "y": Y})
    return sp.sympify(value).subs({sp.Symbol("t"): T, sp.Symbol("x"): X, sp.Symbol("y"): Y})


def _nonvanishing(fn: TimeFunction, window, what: str):
    ts = np.linspace(window[0], window[1], 2001)
    vals = np.abs(fn(ts))
    if np.min(vals) <= 1e-12 * max(1.0, float(np.max(vals))):
        raise ValueError(f"{what} vanishes inside the time window {tuple(window)}")


def _time_window(window):
    lo, hi = float(window[0]), float(window[1])

    def inside(t, a, b):
        return (t >= lo) & (t <= hi)

    return inside


# ----------------------------------------------------------------------
# beta-plane families
# ----------------------------------------------------------------------

def rossby_wave(A=1.0, k=1.0, l=0.0, beta=1.0, phase=0.0) -> SolutionFamily:
    """``A sin(k x + l y - omega t + phase)`` with ``omega = -beta k / (k^2 + l^2)``."""
    A, k, l, beta, phase = map(float, (A, k, l, beta, phase))
    if k == 0 and l == 0:
        raise ValueError("wavevector must be nonzero")
    om = -beta * k / (k * k + l * l)
    expr = A * sp.sin(k * X + l * Y - om * T + phase)
    params = dict(A=A, k=k, l=l, beta=beta, phase=phase)
    return SolutionFamily(
        "RossbyWave", params, Field(expr, PLANE, label="RossbyWave"), beta=beta,
        origin="drift invariant <dt + c dy>, harmonic ansatz", extras={"frequency": om},
    )


def case4_plane(F=0, f=1.0, g=0.0, h1=0.0, h0=0.0, beta=1.0, window=(-2.0, 2.0)) -> SolutionFamily:
    """Invariant solution of ``<X(f) + Z(g)>``.

    ``psi = F(theta)/f^2 - beta y^3/6 + h1 y + h0 - (f'/f) x y + (g/f) x`` with
    ``theta = f y - int g dt``; defined where ``f`` does not vanish.
    """
    f, g, h1, h0 = map(_tf, (f, g, h1, h0))
    beta = float(beta)
    _nonvanishing(f, window, "f")
    Fe = _profile(F)
    fs, gs = f.to_sympy(T), g.to_sympy(T)
    theta = fs * Y - g.antiderivative().to_sympy(T)
    expr = (
        Fe.subs(S, theta) / fs**2
        - beta * Y**3 / 6
        + h1.to_sympy(T) * Y
        + h0.to_sympy(T)
        - sp.diff(fs, T) / fs * X * Y
        + gs / fs * X
    )
    params = dict(F=Fe, f=f, g=g, h1=h1, h0=h0, beta=beta, window=tuple(window))
    return SolutionFamily(
        "Case4Plane", params, Field(expr, PLANE, _time_window(window), "Case4Plane"), beta=beta,
        origin="invariant under X(f) + Z(g), integrated by quadratures",
    )


def cubic_steady(c1=0.0, c2=0.0, beta=1.0) -> SolutionFamily:
    """Steady cubic ``c1 (x^2 - 3y^2) x + c2 (3x^2 - y^2) y - (beta/8)(x^2 + y^2) y``."""
    c1, c2, beta = map(float, (c1, c2, beta))
    expr = c1 * (X**2 - 3 * Y**2) * X + c2 * (3 * X**2 - Y**2) * Y - beta / 8 * (X**2 + Y**2) * Y
    return SolutionFamily(
        "CubicSteady", dict(c1=c1, c2=c2, beta=beta), Field(expr, PLANE, label="CubicSteady"), beta=beta,
        origin="invariant under <D, dt>, linear profile branch",
    )


SIN_CUBED_BRANCHES = {
    "plus": (1.0, 0.0),
    "minus_plus": (-1.0, math.pi / 3),
    "minus_minus": (-1.0, -math.pi / 3),
}


def _right_half(t, x, y):
    return x > 0


def sin_cubed(branch="plus", beta=1.0) -> SolutionFamily:
    """``sign (beta/2) (x^2+y^2)^(3/2) sin^3(arctan(y/x)/3 + shift)`` on ``x > 0``.

    Branches: ``plus`` (sign +1, shift 0), ``minus_plus`` (sign -1, shift +pi/3),
    ``minus_minus`` (sign -1, shift -pi/3).  The arctangent jumps across the
    y axis, so every branch is a solution on the right half-plane only.
    """
    if branch not in SIN_CUBED_BRANCHES:
        raise ValueError(f"unknown branch {branch!r}; choose from {sorted(SIN_CUBED_BRANCHES)}")
    sign, shift = SIN_CUBED_BRANCHES[branch]
    beta = float(beta)
    shift_expr = sp.pi / 3 * int(round(shift / (math.pi / 3)))
    expr = sign * beta / 2 * (X**2 + Y**2) ** sp.Rational(3, 2) * sp.sin(sp.atan(Y / X) / 3 + shift_expr) ** 3
    return SolutionFamily(
        "SinCubed", dict(branch=branch, beta=beta), Field(expr, PLANE, _right_half, f"SinCubed[{branch}]"),
        beta=beta, origin="invariant under <D, dt>, nonlinear profile branch",
    )


def pi_harmonic(Psi="x", eta=0.0, beta=1.0, probe_tol=1e-8) -> SolutionFamily:
    """``Psi - beta y^3/6 + eta y^2/2`` with ``Psi`` harmonic in (x, y).

    The constructor checks the Laplacian of ``Psi`` on a probe grid.
    """
    Pe = _expr3(Psi)
    eta, beta = float(eta), float(beta)
    lap = compile_expr(sp.diff(Pe, X, 2) + sp.diff(Pe, Y, 2), (T, X, Y))
    tt, xx, yy = np.meshgrid([0.0, 0.5, 1.0], np.linspace(-2, 2, 9), np.linspace(-2, 2, 9), indexing="ij")
    bad = np.max(np.abs(np.broadcast_to(np.asarray(lap(tt, xx, yy), float), tt.shape)))
    if not bad <= probe_tol:
        raise ValueError(f"Psi is not harmonic (Laplacian up to {bad:.3g} on the probe grid)")
    expr = Pe - beta * Y**3 / 6 + eta * Y**2 / 2
    return SolutionFamily(
        "PIHarmonic", dict(Psi=Pe, eta=eta, beta=beta), Field(expr, PLANE, label="PIHarmonic"), beta=beta,
        origin="partially invariant under <X(1), Z(g)>, constant absolute vorticity",
    )


def pi_f_profile(F="s**2", g1=1.0, g0=0.0, f1=0.0, f0=0.0, beta=1.0, window=(-2.0, 2.0)) -> SolutionFamily:
    """``F(omega)/g1^2 - beta y^3/6 - ((g1' y + g0')/g1) x + f1 y + f0``, ``omega = g1 y + g0``."""
    g1, g0, f1, f0 = map(_tf, (g1, g0, f1, f0))
    beta = float(beta)
    _nonvanishing(g1, window, "g1")
    Fe = _profile(F)
    a, b = g1.to_sympy(T), g0.to_sympy(T)
    om = a * Y + b
    expr = (
        Fe.subs(S, om) / a**2
        - beta * Y**3 / 6
        - (sp.diff(a, T) * Y + sp.diff(b, T)) / a * X
        + f1.to_sympy(T) * Y
        + f0.to_sympy(T)
    )
    params = dict(F=Fe, g1=g1, g0=g0, f1=f1, f0=f0, beta=beta, window=tuple(window))
    return SolutionFamily(
        "PIFProfile", params, Field(expr, PLANE, _time_window(window), "PIFProfile"), beta=beta,
        origin="partially invariant under <X(1), Z(g)>, varying absolute vorticity",
    )


def pi_chi(chi1=0.0, chi2=0.0, chi3=0.0, beta=1.0) -> SolutionFamily:
    """``-(2 chi1' x + chi2)/beta + chi1 y^2 + chi3 y``."""
    c1, c2, c3 = map(_tf, (chi1, chi2, chi3))
    beta = float(beta)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    a = c1.to_sympy(T)
    expr = -(2 * sp.diff(a, T) * X + c2.to_sympy(T)) / beta + a * Y**2 + c3.to_sympy(T) * Y
    return SolutionFamily(
        "PIChi", dict(chi1=c1, chi2=c2, chi3=c3, beta=beta), Field(expr, PLANE, label="PIChi"), beta=beta,
        origin="partially invariant under <dy, Z(g)>, vorticity linear in x",
    )


# ----------------------------------------------------------------------
# sphere families
# ----------------------------------------------------------------------

def _rh_parameters(n: int, m: int, omega: float, a, zonal):
    c = -n * (n + 1)
    if n == 1:
        # c + 2 = 0: the wave needs a = 0 and the zonal amplitude is free
        a = 0.0 if a is None else float(a)
        if a != 0.0:
            raise ValueError("degree-1 waves require a = 0")
        kappa = -omega if zonal is None else float(zonal)
    else:
        if zonal is not None:
            raise ValueError("the zonal amplitude is fixed by a for degree n >= 2")
        a = omega * (c + 2) / c if a is None else float(a)
        kappa = -a * c / (c + 2)
    return c, a, kappa


def rossby_haurwitz(A=1.0, n=2, m=1, omega=1.0, a=None, phase=0.0, zonal=None) -> SolutionFamily:
    """Rotating-frame wave ``A P_n^m(mu) cos(m(lambda - (a - omega) t) + phase) + kappa mu + omega mu``.

    ``kappa = -a c/(c + 2)`` with ``c = -n(n+1)``; the default
    ``a = omega (c+2)/c`` gives the pure wave travelling at
    ``-2 omega / (n (n+1))``.  For ``n = 1`` the separation constant makes
    ``c + 2 = 0``: then ``a = 0`` is required and ``kappa`` (default
    ``-omega``, the pure-wave limit) is free.
    """
    n, m = int(n), int(m)
    if n < 1 or abs(m) > n:
        raise ValueError("need n >= 1 and |m| <= n")
    A, omega, phase = float(A), float(omega), float(phase)
    c, a, kappa = _rh_parameters(n, m, omega, a, zonal)
    P = legendre_sympy(n, m, MU)
    expr = A * P * sp.cos(m * (LAM - (a - omega) * T) + phase) + (kappa + omega) * MU
    params = dict(A=A, n=n, m=m, omega=omega, a=a, phase=phase)
    extras = {"c": c, "phase_speed": a - omega, "zonal_coefficient": kappa + omega, "kappa": kappa}
    return SolutionFamily(
        "RossbyHaurwitz", params, Field(expr, SPHERE, label=f"RossbyHaurwitz({n},{m})"), omega=omega,
        origin="invariant under <dt + a J1>, linear vorticity profile", extras=extras,
    )


def rossby_haurwitz_superposition(n: int, components: dict, omega=1.0, a=None, zonal=None) -> SolutionFamily:
    """Sum of degree-``n`` waves sharing ``a``; ``components`` maps m to (A, phase)."""
    n = int(n)
    c, a, kappa = _rh_parameters(n, 0, float(omega), a, zonal)
    expr = (kappa + omega) * MU
    for m, (A, ph) in sorted(components.items()):
        if abs(int(m)) > n:
            raise ValueError(f"order {m} exceeds degree {n}")
        expr = expr + float(A) * legendre_sympy(n, int(m), MU) * sp.cos(int(m) * (LAM - (a - omega) * T) + float(ph))
    params = dict(n=n, components=dict(components), omega=float(omega), a=a)
    return SolutionFamily(
        "RossbyHaurwitzSum", params, Field(expr, SPHERE, label=f"RossbyHaurwitzSum(n={n})"), omega=float(omega),
        origin="superposition of same-degree waves", extras={"c": c, "phase_speed": a - omega},
    )


def _pole_window(delta):
    lim = 1 - delta

    def inside(t, lam, mu):
        return np.abs(mu) <= lim

    return inside


def sphere_case3(g=0.0, f=0.0, h=0.0, w="s", omega=0.0, delta=POLE_MARGIN) -> SolutionFamily:
    """Invariant solution of ``<J1 + Z(g)>`` in the rest frame.

    ``psi = g lambda + f + h artanh(mu) + int_0^mu [W(s - G) - W(-G)]/(1 - s^2) ds``
    with ``W`` an antiderivative of the profile ``w`` and ``G = int g dt``.
    Needs a profile whose antiderivative sympy can form; the outer integral
    is evaluated by adaptive quadrature.
    """
    g, f, h = map(_tf, (g, f, h))
    we = _profile(w)
    W = sp.integrate(we, S)
    if W.has(sp.Integral):
        raise ValueError(f"no closed antiderivative for profile {we}")
    tau = sp.Symbol("tau", real=True)
    # derivatives of the profile: level -1 is W, level k >= 0 is w^(k)
    levels = {-1: W}

    def level(k):
        if k not in levels:
            levels[k] = sp.diff(level(k - 1), S)
        return levels[k]

    quad_fns: dict = {}

    def K(k):
        if k in quad_fns:
            return quad_fns[k]
        lk = level(k)
        num = lk.subs(S, S - tau) - lk.subs(S, -tau)
        integrand = compile_expr(num / (1 - S**2), (S, tau))

        def impl(mu, tt):
            mu, tt = np.broadcast_arrays(np.asarray(mu, float), np.asarray(tt, float))
            out = np.empty(mu.shape)
            for idx in np.ndindex(mu.shape):
                out[idx] = quad(integrand, 0.0, float(mu[idx]), args=(float(tt[idx]),),
                                epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)[0]
            return out

        def derivs(argindex, args):
            m_, t_ = args
            if argindex == 1:
                return (lk.subs(S, m_ - t_) - lk.subs(S, -t_)) / (1 - m_**2)
            if argindex == 2:
                return -K(k + 1)(m_, t_)
            raise sp.ArgumentIndexError

        quad_fns[k] = numeric_function(f"SphereQuad{k + 1}", impl, derivs, nargs=2)
        return quad_fns[k]

    G = g.antiderivative().to_sympy(T)
    expr = g.to_sympy(T) * LAM + f.to_sympy(T) + h.to_sympy(T) * sp.atanh(MU) + K(-1)(MU, G)
    params = dict(g=g, f=f, h=h, w=we, omega=float(omega), delta=float(delta))
    fam_field = Field(expr, SPHERE, _pole_window(delta), "SphereCase3")
    if omega:
        from .generators.transforms import frame_transform

        fam_field = frame_transform(fam_field, float(omega), "toRotating")
    return SolutionFamily(
        "SphereCase3", params, fam_field, omega=float(omega),
        origin="invariant under <J1 + Z(g)>, integrated by quadratures", numeric=True,
    )


def sphere_zonal_wave(b=0.5, C=-2.0, v0=1.0, dv0=0.0, delta=POLE_MARGIN) -> SolutionFamily:
    """``exp(b lambda) v(mu)`` with ``((1-mu^2) v')' + b^2 v/(1-mu^2) = C v``.

    The profile is integrated from ``mu = 0`` (``v(0) = v0``, ``v'(0) = dv0``)
    towards both poles with an 8th-order Runge–Kutta scheme and dense output,
    up to ``|mu| = 1 - delta``.  Not periodic in lambda for real ``b``, so the
    family is a solution on a single longitude patch.
    """
    b, C, delta = float(b), float(C), float(delta)
    lim = 1 - delta

    def rhs(mu, y):
        q = 1 - mu * mu
        return [y[1], (2 * mu * y[1] + (C - b * b / q) * y[0]) / q]

    opts = dict(method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    up = solve_ivp(rhs, (0.0, lim), [v0, dv0], **opts)
    down = solve_ivp(rhs, (0.0, -lim), [v0, dv0], **opts)
    if not (up.success and down.success):
        raise RuntimeError("profile integration failed")

    def component(i):
        def impl(mu):
            mu = np.asarray(mu, float)
            flat = mu.ravel()
            out = np.where(flat >= 0, up.sol(np.clip(flat, 0, lim))[i], down.sol(np.clip(flat, -lim, 0))[i])
            return out.reshape(mu.shape)[()] if mu.ndim == 0 else out.reshape(mu.shape)

        return impl

    V0 = numeric_function("ZonalV", component(0), None, nargs=1)

    def d1(argindex, args):
        (m_,) = args
        q = 1 - m_**2
        return (2 * m_ * V1(m_) + (C - b**2 / q) * V0(m_)) / q

    V1 = numeric_function("ZonalDV", component(1), d1, nargs=1)
    V0.fdiff = lambda self, argindex=1: V1(self.args[0])
    expr = sp.exp(b * LAM) * V0(MU)
    params = dict(b=b, C=C, v0=float(v0), dv0=float(dv0), delta=delta)
    return SolutionFamily(
        "SphereZonalWave", params, Field(expr, SPHERE, _pole_window(delta), "SphereZonalWave"), omega=0.0,
        origin="invariant under <D + a J1, dt> with b = -1/a", numeric=True,
    )


# ----------------------------------------------------------------------
# registry
# ----------------------------------------------------------------------

FAMILIES = {
    "RossbyWave": rossby_wave,
    "Case4Plane": case4_plane,
    "CubicSteady": cubic_steady,
    "SinCubed": sin_cubed,
    "PIHarmonic": pi_harmonic,
    "PIFProfile": pi_f_profile,
    "PIChi": pi_chi,
    "RossbyHaurwitz": rossby_haurwitz,
    "SphereCase3": sphere_case3,
    "SphereZonalWave": sphere_zonal_wave,
}


def make_family(family_id: str, params: dict | None = None) -> SolutionFamily:
    """Construct a family by catalogue name."""
    try:
        ctor = FAMILIES[family_id]
    except KeyError:
        raise ValueError(f"unknown family {family_id!r}; known: {sorted(FAMILIES)}") from None
    return ctor(**(params or {}))


def eval_family(family: SolutionFamily, point):
    return family.eval(*point)


def eval_derivs(family: SolutionFamily, point, order):
    return family.eval_derivs(order, *point)


__all__ = [
    "FAMILIES",
    "SIN_CUBED_BRANCHES",
    "SolutionFamily",
    "case4_plane",
    "cubic_steady",
    "eval_derivs",
    "eval_family",
    "make_family",
    "pi_chi",
    "pi_f_profile",
    "pi_harmonic",
    "rossby_haurwitz",
    "rossby_haurwitz_superposition",
    "rossby_wave",
    "sin_cubed",
    "sphere_case3",
    "sphere_zonal_wave",
]
