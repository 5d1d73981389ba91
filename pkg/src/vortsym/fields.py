"""Scalar fields with exact derivatives.

A :class:`Field` wraps a sympy expression in the base coordinates
``(t, x, y)`` or ``(t, lambda, mu)``.  Derivatives are formed symbolically and
compiled with :func:`sympy.lambdify` on first use, so every push-forward,
lift or frame change is exact up to floating point rounding.

Quadrature- or ODE-backed profiles enter the expression as sympy functions
carrying a numeric implementation (``_imp_``) and a symbolic ``fdiff``; see
:func:`numeric_function`.
"""

from __future__ import annotations

import itertools
import threading
from typing import Callable

import numpy as np
import sympy as sp

from .exceptions import DomainError

T = sp.Symbol("t", real=True)
X = sp.Symbol("x", real=True)
Y = sp.Symbol("y", real=True)
LAM = sp.Symbol("lambda", real=True)
MU = sp.Symbol("mu", real=True)

PLANE = "plane"
SPHERE = "sphere"


def base_symbols(geometry: str) -> tuple[sp.Symbol, sp.Symbol, sp.Symbol]:
    if geometry == PLANE:
        return (T, X, Y)
    if geometry == SPHERE:
        return (T, LAM, MU)
    raise ValueError(f"unknown geometry {geometry!r}")


class Field:
    """Stream function (or any scalar) given by a symbolic expression.

    Args:
        expr: sympy expression in the geometry's base symbols.
        geometry: ``"plane"`` or ``"sphere"``.
        domain: optional predicate ``(t, c1, c2) -> bool array`` marking
            admissible points; evaluation elsewhere raises DomainError.
        label: free-form description carried into reports.
    """

    def __init__(self, expr, geometry: str = PLANE, domain: Callable | None = None, label: str = ""):
        self.expr = sp.sympify(expr)
        self.geometry = geometry
        self.symbols = base_symbols(geometry)
        self.domain = domain
        self.label = label
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Field({self.geometry}, {self.label or self.expr})"

    def check_domain(self, t, c1, c2):
        if self.geometry == SPHERE and np.any(np.abs(np.asarray(c2, float)) >= 1):
            raise DomainError("sphere fields are not evaluated at the poles")
        if self.domain is None:
            return
        ok = np.asarray(self.domain(np.asarray(t, float), np.asarray(c1, float), np.asarray(c2, float)))
        if not np.all(ok):
            raise DomainError(f"{self.label or 'field'} evaluated outside its domain")

    def derivative_expr(self, order=(0, 0, 0)) -> sp.Expr:
        args = []
        for sym, n in zip(self.symbols, order):
            if n:
                args += [sym, int(n)]
        return sp.diff(self.expr, *args) if args else self.expr

    def compiled(self, order=(0, 0, 0)) -> Callable:
        key = tuple(int(n) for n in order)
        fn = self._cache.get(key)
        if fn is None:
            with self._lock:
                fn = self._cache.get(key)
                if fn is None:
                    fn = compile_expr(self.derivative_expr(key), self.symbols)
                    self._cache[key] = fn
        return fn

    def d(self, order, t, c1, c2):
        """Mixed partial derivative ``d^(nt+n1+n2) psi / dt^nt dc1^n1 dc2^n2``."""
        self.check_domain(t, c1, c2)
        t, c1, c2 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, c1, c2)))
        return _as_array(self.compiled(order)(t, c1, c2), t.shape)

    def __call__(self, t, c1, c2):
        return self.d((0, 0, 0), t, c1, c2)

    # algebra on fields, mostly for manufactured tests
    def __add__(self, other):
        other_expr = other.expr if isinstance(other, Field) else sp.sympify(other)
        return Field(self.expr + other_expr, self.geometry, self.domain, self.label)

    def __mul__(self, c):
        return Field(self.expr * c, self.geometry, self.domain, self.label)

    __rmul__ = __mul__


def compile_expr(expr, symbols) -> Callable:
    """lambdify with numpy, resolving numeric sympy functions."""
    return sp.lambdify(symbols, expr, modules=["numpy"], cse=True)


def _as_array(val, shape):
    arr = np.asarray(val, dtype=float)
    if arr.shape != shape:
        arr = np.broadcast_to(arr, shape).copy()
    return arr


_FUNC_IDS = itertools.count()


def numeric_function(name: str, impl: Callable, derivs: Callable[[int, tuple], sp.Expr] | None = None, nargs: int = 1):
    """Create a sympy function class backed by a numpy implementation.

    Args:
        name: printable name prefix (a valid identifier); a unique suffix
            is appended so lambdify namespaces never collide.
        impl: vectorized numpy implementation ``impl(*arrays)``.
        derivs: ``derivs(argindex, args)`` returning the symbolic partial
            derivative with respect to the 1-based ``argindex``.
        nargs: number of arguments.
    """

    def fdiff(self, argindex=1):
        if derivs is None:
            raise sp.ArgumentIndexError(self, argindex)
        return derivs(argindex, self.args)

    name = f"{name}_{next(_FUNC_IDS)}"
    cls = type(name, (sp.Function,), {"nargs": nargs, "fdiff": fdiff, "_imp_": staticmethod(impl)})
    return cls

