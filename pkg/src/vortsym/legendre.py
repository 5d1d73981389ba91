"""Associated Legendre functions of the first kind, Condon–Shortley phase included."""

from __future__ import annotations

import math

import numpy as np
import sympy as sp


def _check(n: int, m: int):
    if n < 0:
        raise ValueError("degree n must be nonnegative")
    if abs(m) > n:
        raise ValueError(f"order |m| = {abs(m)} exceeds degree n = {n}")


def legendre_p(n: int, m: int, mu):
    """``P_n^m(mu)`` by forward recurrence in the degree.

    Starts from ``P_m^m = (-1)^m (2m-1)!! (1-mu^2)^(m/2)`` and uses
    ``(l-m) P_l^m = (2l-1) mu P_(l-1)^m - (l+m-1) P_(l-2)^m``.  Negative orders
    follow from ``P_n^(-m) = (-1)^m (n-m)!/(n+m)! P_n^m``.
    """
    n, m = int(n), int(m)
    _check(n, m)
    mu = np.asarray(mu, dtype=float)
    if np.any(np.abs(mu) > 1):
        raise ValueError("legendre_p needs |mu| <= 1")
    if m < 0:
        k = -m
        ratio = (-1) ** k * math.factorial(n - k) / math.factorial(n + k)
        return ratio * legendre_p(n, k, mu)
    pmm = np.ones_like(mu)
    if m:
        s = np.sqrt((1 - mu) * (1 + mu))
        fact = 1.0
        for _ in range(m):
            pmm = -pmm * fact * s
            fact += 2.0
    if n == m:
        return pmm[()] if pmm.ndim == 0 else pmm
    prev, cur = pmm, mu * (2 * m + 1) * pmm
    for ell in range(m + 2, n + 1):
        prev, cur = cur, ((2 * ell - 1) * mu * cur - (ell + m - 1) * prev) / (ell - m)
    return cur[()] if cur.ndim == 0 else cur


def legendre_sympy(n: int, m: int, mu: sp.Symbol) -> sp.Expr:
    """Closed form ``(-1)^m (1-mu^2)^(m/2) d^m P_n / d mu^m`` (Rodrigues based)."""
    n, m = int(n), int(m)
    _check(n, m)
    if m < 0:
        k = -m
        ratio = sp.Integer(-1) ** k * sp.factorial(n - k) / sp.factorial(n + k)
        return ratio * legendre_sympy(n, k, mu)
    base = sp.diff(sp.legendre(n, mu), mu, m) if m else sp.legendre(n, mu)
    return sp.expand((-1) ** m * base) * (1 - mu**2) ** sp.Rational(m, 2)


def degree_from_separation_constant(c: float) -> float:
    """Degree ``n`` with ``n (n + 1) = -c``, i.e. ``(sqrt(1 - 4c) - 1) / 2``."""
    return 0.5 * (math.sqrt(1 - 4 * c) - 1)
