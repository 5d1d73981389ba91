"""Closed algebra of scalar functions of time.

Every function is a finite sum of exponential-polynomial-trigonometric terms

    c * t**k * exp(a*t) * cos(b*t + phase)

plus optional power-law terms ``c * |t|**alpha`` that live on one half-line
(``t>0`` or ``t<0``).  The class is closed under addition, scaling,
differentiation, antidifferentiation and affine substitution of the argument,
which is all the adjoint action of the symmetry algebras requires.

The integer ``k`` may be negative; such terms are singular at ``t = 0`` and
appear when scaling-class kill quadratures divide by powers of ``t``.  They
cannot be shifted in time, and only their polynomial part integrates in
closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import sympy as sp

from .exceptions import DomainError, UnsupportedOperation

POS = "t>0"
NEG = "t<0"
_DOMAINS = (POS, NEG)

# a merged coefficient this small relative to the magnitudes that produced it
# is cancellation noise
_ZERO_TOL = 1e-14
# terms below this fraction of the largest coefficient are dropped outright,
# which keeps repeated products from growing the degree without bound
_NEGLIGIBLE = 1e-22
_RATE_TOL = 1e-12


class Term(NamedTuple):
    coeff: float
    power: int = 0
    exprate: float = 0.0
    oscrate: float = 0.0
    phase: float = 0.0

    @property
    def key(self):
        return (self.power, self.exprate, self.oscrate)

    def complex_coeff(self) -> complex:
        return self.coeff * cmath.exp(1j * self.phase)

    @property
    def rate(self) -> complex:
        return complex(self.exprate, self.oscrate)


@dataclass(frozen=True)
class PowerTerm:
    coeff: float
    alpha: float
    domain: str = POS

    def __post_init__(self):
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown half-line {self.domain!r}")


def _from_complex(w: complex, power: int, a: float, b: float) -> Term:
    """Real part of ``w * t**power * exp((a+ib) t)`` as a term."""
    return Term(abs(w), power, a, b, cmath.phase(w))


class TimeFunction:
    """Immutable element of the exponential-polynomial-trigonometric algebra.

    Instances are normalized on construction: like terms are merged, the
    oscillation rate is made nonnegative and terms with vanishing coefficient
    are dropped, so two equal functions usually share one representation.
    """

    __slots__ = ("terms", "power_terms")

    def __init__(self, terms: Iterable[Term] = (), power_terms: Iterable[PowerTerm] = ()):
        object.__setattr__(self, "terms", _normalize_terms(terms))
        object.__setattr__(self, "power_terms", _normalize_power(power_terms))

    def __setattr__(self, name, value):
        raise AttributeError("TimeFunction is immutable")

    @classmethod
    def _normalized(cls, terms: tuple, power_terms: tuple) -> "TimeFunction":
        """Wrap term tuples that are already in normal form."""
        out = object.__new__(cls)
        object.__setattr__(out, "terms", terms)
        object.__setattr__(out, "power_terms", power_terms)
        return out

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "TimeFunction":
        return cls()

    @classmethod
    def const(cls, c: float) -> "TimeFunction":
        return cls([Term(float(c))])

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "TimeFunction":
        return cls([Term(float(c), int(k))])

    @classmethod
    def poly(cls, coeffs: Sequence[float]) -> "TimeFunction":
        """Polynomial with ``coeffs[k]`` multiplying ``t**k``."""
        return cls([Term(float(c), k) for k, c in enumerate(coeffs)])

    @classmethod
    def exp(cls, a: float, c: float = 1.0, power: int = 0) -> "TimeFunction":
        return cls([Term(float(c), power, float(a))])

    @classmethod
    def cos(cls, b: float, phase: float = 0.0, c: float = 1.0) -> "TimeFunction":
        return cls([Term(float(c), 0, 0.0, float(b), float(phase))])

    @classmethod
    def sin(cls, b: float, c: float = 1.0) -> "TimeFunction":
        return cls([Term(float(c), 0, 0.0, float(b), -math.pi / 2)])

    @classmethod
    def power(cls, alpha: float, c: float = 1.0, domain: str = POS) -> "TimeFunction":
        """``c * |t|**alpha`` restricted to a half-line."""
        return cls(power_terms=[PowerTerm(float(c), float(alpha), domain)])

    @classmethod
    def parse(cls, text: str, domain: str = POS) -> "TimeFunction":
        """Read an expression such as ``"t**2 + 3*exp(-t)*sin(2*t)"``.

        Non-integer or negative powers of ``t`` become power-law terms on
        ``domain``.  Anything outside the algebra raises UnsupportedOperation.
        """
        t = sp.Symbol("t", real=True)
        try:
            expr = sp.sympify(text, locals={"t": t})
        except (sp.SympifyError, TypeError) as exc:
            raise UnsupportedOperation(f"cannot parse {text!r}") from exc
        if expr.free_symbols - {t}:
            raise UnsupportedOperation(f"{text!r} depends on more than t")
        expr = sp.expand(sp.powsimp(sp.expand(expr.rewrite(sp.exp))))
        terms, powers = [], []
        for arg in sp.Add.make_args(expr):
            arg = sp.powsimp(arg)
            w, k, rate = complex(1.0), 0, complex(0.0)
            alpha = None
            for fac in sp.Mul.make_args(arg):
                base, ex = fac.as_base_exp()
                if not fac.has(t):
                    w *= complex(fac)
                elif base == t and ex.is_number:
                    if ex.is_Integer:
                        k += int(ex)
                    else:
                        alpha = float(ex)
                elif isinstance(fac, sp.exp) or base == sp.E:
                    lin = sp.expand(fac.exp if isinstance(fac, sp.exp) else ex)
                    slope, rest = lin.coeff(t, 1), lin.coeff(t, 0)
                    if sp.expand(lin - slope * t - rest) != 0 or slope.has(t):
                        raise UnsupportedOperation(f"{fac} is not an exponential in t")
                    rate += complex(slope)
                    w *= complex(sp.exp(rest))
                else:
                    raise UnsupportedOperation(f"{fac} is outside the time-function algebra")
            if alpha is not None:
                if k or rate or abs(w.imag) > 1e-14 * max(abs(w), 1):
                    raise UnsupportedOperation("power-law terms cannot be multiplied by other factors")
                powers.append(PowerTerm(w.real, alpha + k, domain))
            else:
                terms.append(_from_complex(w, k, rate.real, rate.imag))
        return cls(terms, powers)

    # -- inspection ---------------------------------------------------
    @property
    def domain(self) -> str | None:
        """Half-line on which the function is defined, ``None`` for all of R."""
        return self.power_terms[0].domain if self.power_terms else None

    def is_constant(self) -> bool:
        return not self.power_terms and all(
            tm.key == (0, 0.0, 0.0) for tm in self.terms
        )

    def constant_value(self) -> float:
        if not self.is_constant():
            raise ValueError("function is not constant")
        return sum(tm.coeff for tm in self.terms)

    def is_polynomial(self) -> bool:
        return not self.power_terms and all(
            tm.power >= 0 and tm.exprate == 0.0 and tm.oscrate == 0.0 for tm in self.terms
        )

    def is_singular(self) -> bool:
        """True when some term carries a negative power of t."""
        return any(tm.power < 0 for tm in self.terms)

    def __bool__(self):
        return bool(self.terms or self.power_terms)

    def __repr__(self):
        parts = []
        for tm in self.terms:
            s = f"{tm.coeff:.6g}"
            if tm.power:
                s += f"*t^{tm.power}"
            if tm.exprate:
                s += f"*exp({tm.exprate:.6g}t)"
            if tm.oscrate or tm.phase:
                s += f"*cos({tm.oscrate:.6g}t{tm.phase:+.6g})"
            parts.append(s)
        for pt in self.power_terms:
            parts.append(f"{pt.coeff:.6g}*|t|^{pt.alpha:.6g}[{pt.domain}]")
        return "TimeFunction(" + (" + ".join(parts) or "0") + ")"

    def __eq__(self, other):
        if not isinstance(other, TimeFunction):
            return NotImplemented
        return self.terms == other.terms and self.power_terms == other.power_terms

    def __hash__(self):
        return hash((self.terms, self.power_terms))

    # -- evaluation ---------------------------------------------------
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_singular() and np.any(t == 0):
            raise DomainError("negative power of t evaluated at t = 0")
        out = np.zeros_like(t)
        for tm in self.terms:
            val = tm.coeff * np.ones_like(t)
            if tm.power:
                val = val * t**tm.power
            if tm.exprate:
                val = val * np.exp(tm.exprate * t)
            if tm.oscrate or tm.phase:
                val = val * np.cos(tm.oscrate * t + tm.phase)
            out = out + val
        if self.power_terms:
            self._check_domain(t)
            at = np.abs(t)
            for pt in self.power_terms:
                with np.errstate(divide="ignore"):
                    out = out + pt.coeff * at**pt.alpha
        return out[()] if out.ndim == 0 else out

    def _check_domain(self, t):
        dom = self.domain
        neg_alpha = any(pt.alpha < 0 for pt in self.power_terms)
        bad = t < 0 if dom == POS else t > 0
        if neg_alpha:
            bad = bad | (t == 0)
        if np.any(bad):
            raise DomainError(
                f"power-law term defined on {dom} evaluated outside its half-line"
            )

    # -- linear structure ---------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TimeFunction.const(other)
        if not isinstance(other, TimeFunction):
            return NotImplemented
        _check_compatible(self, other)
        return TimeFunction(self.terms + other.terms, self.power_terms + other.power_terms)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: float) -> "TimeFunction":
        c = float(c)
        if c == 0:
            return TimeFunction()
        if c > 0:
            # positive scaling keeps the normal form
            return TimeFunction._normalized(
                tuple(tm._replace(coeff=tm.coeff * c) for tm in self.terms),
                tuple(PowerTerm(pt.coeff * c, pt.alpha, pt.domain) for pt in self.power_terms),
            )
        return TimeFunction(
            [Term(tm.coeff * c, tm.power, tm.exprate, tm.oscrate, tm.phase) for tm in self.terms],
            [PowerTerm(pt.coeff * c, pt.alpha, pt.domain) for pt in self.power_terms],
        )

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return self.scale(other)
        if not isinstance(other, TimeFunction):
            return NotImplemented
        return self.multiply(other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1.0 / c)

    def multiply(self, other: "TimeFunction") -> "TimeFunction":
        """Pointwise product.

        Products of two exponential-trigonometric terms stay in the algebra;
        a power-law term may only meet plain polynomial terms.
        """
        _check_compatible(self, other)
        terms = []
        for u in self.terms:
            for v in other.terms:
                c = 0.5 * u.coeff * v.coeff
                k = u.power + v.power
                a = u.exprate + v.exprate
                terms.append(Term(c, k, a, u.oscrate + v.oscrate, u.phase + v.phase))
                terms.append(Term(c, k, a, u.oscrate - v.oscrate, u.phase - v.phase))
        powers = []
        dom = self.domain or other.domain
        for pts, tms in ((self.power_terms, other.terms), (other.power_terms, self.terms)):
            for pt in pts:
                for tm in tms:
                    if tm.exprate or tm.oscrate:
                        raise UnsupportedOperation(
                            "product of a power law with an exponential or "
                            "trigonometric term is not representable"
                        )
                    sign = 1.0 if dom == POS else (-1.0) ** tm.power
                    c = tm.coeff * math.cos(tm.phase) * sign
                    powers.append(PowerTerm(pt.coeff * c, pt.alpha + tm.power, dom))
        for p in self.power_terms:
            for q in other.power_terms:
                powers.append(PowerTerm(p.coeff * q.coeff, p.alpha + q.alpha, dom))
        return TimeFunction(terms, powers)

    def mul_tpow(self, n: int, domain: str | None = None) -> "TimeFunction":
        """Multiply by ``t**n`` for integer ``n`` (negative allowed).

        Power-law terms need a half-line, taken from the function itself or
        from ``domain``; the other terms simply shift their integer power.
        """
        n = int(n)
        dom = self.domain or domain
        terms = [Term(tm.coeff, tm.power + n, tm.exprate, tm.oscrate, tm.phase) for tm in self.terms]
        powers = []
        for pt in self.power_terms:
            sign = 1.0 if dom == POS else (-1.0) ** n
            powers.append(PowerTerm(pt.coeff * sign, pt.alpha + n, dom))
        return TimeFunction(terms, powers)

    # -- calculus -----------------------------------------------------
    def derivative(self) -> "TimeFunction":
        terms = []
        for tm in self.terms:
            if tm.power:
                terms.append(Term(tm.coeff * tm.power, tm.power - 1, tm.exprate, tm.oscrate, tm.phase))
            z = tm.rate
            if z:
                terms.append(_from_complex(tm.complex_coeff() * z, tm.power, tm.exprate, tm.oscrate))
        powers = []
        for pt in self.power_terms:
            if pt.alpha == 0:
                continue
            sign = 1.0 if pt.domain == POS else -1.0
            powers.append(PowerTerm(sign * pt.coeff * pt.alpha, pt.alpha - 1, pt.domain))
        return TimeFunction(terms, powers)

    def antiderivative(self) -> "TimeFunction":
        """Antiderivative vanishing at t=0 (at t=+-1 for power-law terms).

        A term ``t**k exp(z t)`` integrates to coefficients of size
        ``1/z**(k+1)``: exact algebraically, but digits are lost as ``z -> 0``.
        Singular terms ``t**k`` with ``k < -1`` integrate without a constant;
        ``1/t`` and singular exponential terms raise UnsupportedOperation.
        """
        terms = []
        for tm in self.terms:
            z = tm.rate
            k = tm.power
            if k < 0:
                if z or k == -1:
                    raise UnsupportedOperation(f"antiderivative of t^{k} exp({z} t) leaves the algebra")
                terms.append(Term(tm.coeff / (k + 1), k + 1, 0.0, 0.0, tm.phase))
                continue
            if not z:
                terms.append(Term(tm.coeff / (k + 1), k + 1, 0.0, 0.0, tm.phase))
                continue
            c0 = tm.complex_coeff()
            fact = 1.0
            for j in range(k + 1):
                if j:
                    fact *= k - j + 1
                w = c0 * (-1) ** j * fact / z ** (j + 1)
                terms.append(_from_complex(w, k - j, tm.exprate, tm.oscrate))
                if j == k:
                    terms.append(Term(-w.real))
        powers = []
        for pt in self.power_terms:
            if pt.alpha == -1:
                raise UnsupportedOperation(
                    f"antiderivative of {pt.coeff}*|t|^-1 is logarithmic"
                )
            sign = 1.0 if pt.domain == POS else -1.0
            c = sign * pt.coeff / (pt.alpha + 1)
            powers.append(PowerTerm(c, pt.alpha + 1, pt.domain))
            terms.append(Term(-c))
        return TimeFunction(terms, powers)

    def affine_sub(self, s: float, delta: float = 0.0) -> "TimeFunction":
        """Return ``t -> f(s*t + delta)``."""
        s, delta = float(s), float(delta)
        if s == 0:
            raise ValueError("affine substitution needs s != 0")
        if (self.power_terms or self.is_singular()) and delta != 0:
            raise UnsupportedOperation(
                "shifting the argument of a term singular at t = 0 is not representable"
            )
        terms = []
        for tm in self.terms:
            a, b = tm.exprate * s, tm.oscrate * s
            phase = tm.phase + tm.oscrate * delta
            c = tm.coeff * math.exp(tm.exprate * delta)
            if tm.power < 0:
                terms.append(Term(c * s**tm.power, tm.power, a, b, phase))
                continue
            for j in range(tm.power + 1):
                cj = c * math.comb(tm.power, j) * s**j * delta ** (tm.power - j)
                if cj:
                    terms.append(Term(cj, j, a, b, phase))
        powers = []
        for pt in self.power_terms:
            dom = pt.domain if s > 0 else (NEG if pt.domain == POS else POS)
            powers.append(PowerTerm(pt.coeff * abs(s) ** pt.alpha, pt.alpha, dom))
        return TimeFunction(terms, powers)

    def shift(self, delta: float) -> "TimeFunction":
        """``t -> f(t - delta)``."""
        return self.affine_sub(1.0, -delta)

    # -- conversions --------------------------------------------------
    def to_sympy(self, t: sp.Symbol) -> sp.Expr:
        expr = sp.Integer(0)
        for tm in self.terms:
            e = sp.Float(tm.coeff) * t**tm.power
            if tm.exprate:
                e = e * sp.exp(sp.Float(tm.exprate) * t)
            if tm.oscrate or tm.phase:
                e = e * sp.cos(sp.Float(tm.oscrate) * t + sp.Float(tm.phase))
            expr = expr + e
        for pt in self.power_terms:
            base = t if pt.domain == POS else -t
            expr = expr + sp.Float(pt.coeff) * base ** sp.Float(pt.alpha)
        return expr

    def to_json(self) -> list[dict]:
        out = [
            {"coeff": tm.coeff, "pow": tm.power, "exp": tm.exprate, "osc": tm.oscrate, "phase": tm.phase}
            for tm in self.terms
        ]
        out += [{"coeff": pt.coeff, "alpha": pt.alpha, "domain": pt.domain} for pt in self.power_terms]
        return out

    @classmethod
    def from_json(cls, data) -> "TimeFunction":
        """Inverse of :meth:`to_json`; a bare number is read as a constant."""
        if isinstance(data, (int, float)):
            return cls.const(data)
        terms, powers = [], []
        for rec in data:
            if "alpha" in rec:
                extra = set(rec) - {"coeff", "alpha", "domain"}
                if extra:
                    raise ValueError(f"unknown power-term keys {sorted(extra)}")
                powers.append(PowerTerm(float(rec["coeff"]), float(rec["alpha"]), rec.get("domain", POS)))
            else:
                extra = set(rec) - {"coeff", "pow", "exp", "osc", "phase"}
                if extra:
                    raise ValueError(f"unknown term keys {sorted(extra)}")
                terms.append(
                    Term(
                        float(rec["coeff"]),
                        int(rec.get("pow", 0)),
                        float(rec.get("exp", 0.0)),
                        float(rec.get("osc", 0.0)),
                        float(rec.get("phase", 0.0)),
                    )
                )
        return cls(terms, powers)


def _check_compatible(f: TimeFunction, g: TimeFunction):
    if f.domain and g.domain and f.domain != g.domain:
        raise DomainError(f"cannot combine functions on {f.domain} and {g.domain}")


def _normalize_terms(terms: Iterable[Term]) -> tuple:
    acc: dict = {}
    mag: dict = {}
    for coeff, power, a, b, phase in terms:
        # rates this small are indistinguishable from zero on any sampled window
        if -_RATE_TOL < a < _RATE_TOL:
            a = 0.0
        if -_RATE_TOL < b < _RATE_TOL:
            b = 0.0
        if b == 0.0:
            w = coeff * math.cos(phase) if phase else coeff
        else:
            if b < 0:
                b, phase = -b, -phase
            w = coeff * cmath.exp(1j * phase) if phase else complex(coeff)
        key = (power, a, b)
        if key in acc:
            acc[key] += w
            mag[key] += abs(w)
        else:
            acc[key] = w
            mag[key] = abs(w)
    if not acc:
        return ()
    floor = _NEGLIGIBLE * max(abs(w) for w in acc.values())
    out = []
    for (k, a, b), w in sorted(acc.items()):
        if w == 0 or abs(w) <= max(_ZERO_TOL * mag[(k, a, b)], floor):
            continue
        if b == 0:
            out.append(Term(float(w.real), int(k), float(a), 0.0, 0.0))
        else:
            out.append(Term(abs(w), int(k), float(a), float(b), cmath.phase(w)))
    return tuple(out)


def _normalize_power(powers: Iterable[PowerTerm]) -> tuple:
    acc: dict = {}
    mag: dict = {}
    doms = set()
    for pt in powers:
        doms.add(pt.domain)
        key = (float(pt.alpha), pt.domain)
        acc[key] = acc.get(key, 0.0) + float(pt.coeff)
        mag[key] = mag.get(key, 0.0) + abs(float(pt.coeff))
    if len(doms) > 1:
        raise DomainError("power-law terms on both half-lines cannot be mixed")
    return tuple(
        PowerTerm(c, alpha, dom)
        for (alpha, dom), c in sorted(acc.items())
        if c != 0 and abs(c) > _ZERO_TOL * mag[(alpha, dom)]
    )


def as_timefn(value) -> TimeFunction:
    """Coerce numbers (and TimeFunctions) to a TimeFunction."""
    if isinstance(value, TimeFunction):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return TimeFunction.const(float(value))
    if isinstance(value, str):
        return TimeFunction.parse(value)
    if isinstance(value, (list, tuple)):
        return TimeFunction.from_json(list(value))
    raise TypeError(f"cannot interpret {value!r} as a function of time")


def sample_times(domain: str | None = None, n: int = 64) -> np.ndarray:
    """Chebyshev nodes used for function comparisons."""
    lo, hi = {None: (-2.0, 2.0), POS: (0.05, 2.0), NEG: (-2.0, -0.05)}[domain]
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[::-1]


def sup_distance(f: TimeFunction, g: TimeFunction, domain: str | None = None) -> float:
    """Max |f - g| over the comparison nodes."""
    dom = domain or f.domain or g.domain
    ts = sample_times(dom)
    return float(np.max(np.abs(f(ts) - g(ts))))
