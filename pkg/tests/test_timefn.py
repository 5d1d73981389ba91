import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from vortsym.exceptions import DomainError, UnsupportedOperation
from vortsym.timefn import NEG, POS, TimeFunction, as_timefn, sample_times, sup_distance

t = sp.Symbol("t", real=True)
TS = np.linspace(-1.5, 1.5, 13)

small = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
# closed-form antiderivatives carry 1/rate**(k+1) factors, so rates are kept O(1)
rates = st.one_of(st.just(0.0), st.floats(0.05, 2.0), st.floats(-2.0, -0.05))


@st.composite
def timefns(draw, max_terms=3):
    terms = []
    for _ in range(draw(st.integers(1, max_terms))):
        kind = draw(st.sampled_from(["poly", "exp", "cos", "sin"]))
        c = draw(small)
        if kind == "poly":
            terms.append(TimeFunction.monomial(draw(st.integers(0, 3)), c))
        elif kind == "exp":
            terms.append(TimeFunction.exp(draw(rates), c, power=draw(st.integers(0, 2))))
        elif kind == "cos":
            terms.append(TimeFunction.cos(draw(rates), draw(small), c))
        else:
            terms.append(TimeFunction.sin(draw(rates), c))
    out = TimeFunction.zero()
    for term in terms:
        out = out + term
    return out


def values_match(f: TimeFunction, expr, ts=TS, tol=1e-10):
    ref = sp.lambdify(t, expr, "numpy")(ts) * np.ones_like(ts)
    return np.max(np.abs(f(ts) - ref)) <= tol * max(1.0, np.max(np.abs(ref)))


def test_constructors_evaluate():
    assert TimeFunction.const(2.5)(0.3) == pytest.approx(2.5)
    assert TimeFunction.monomial(3, 2.0)(1.5) == pytest.approx(2 * 1.5**3)
    assert TimeFunction.poly([1, 0, 3])(2.0) == pytest.approx(13.0)
    assert TimeFunction.exp(0.5, 2.0, power=1)(1.0) == pytest.approx(2 * np.exp(0.5))
    assert TimeFunction.cos(2.0, 0.3)(0.7) == pytest.approx(np.cos(1.4 + 0.3))
    assert TimeFunction.sin(3.0, 1.5)(0.2) == pytest.approx(1.5 * np.sin(0.6))
    assert TimeFunction.power(0.5, 2.0)(4.0) == pytest.approx(4.0)
    assert TimeFunction.power(2.0, 1.0, NEG)(-3.0) == pytest.approx(9.0)


def test_zero_and_constants():
    z = TimeFunction.zero()
    assert not z
    assert z.is_constant() and z.constant_value() == 0
    assert TimeFunction.const(3).is_constant()
    assert not TimeFunction.monomial(1).is_constant()
    assert TimeFunction.poly([1, 2]).is_polynomial()
    assert not TimeFunction.exp(1.0).is_polynomial()


def test_like_terms_merge():
    f = TimeFunction.monomial(2, 1.0) + TimeFunction.monomial(2, -1.0)
    assert not f
    g = TimeFunction.cos(1.0) + TimeFunction.cos(1.0)
    assert len(g.terms) == 1


def test_power_terms_domain_checks():
    f = TimeFunction.power(-1.0)
    assert f.domain == POS
    with pytest.raises(DomainError):
        f(-1.0)
    with pytest.raises(DomainError):
        TimeFunction.power(0.5) + TimeFunction.power(0.5, domain=NEG)


@settings(max_examples=40, deadline=None)
@given(timefns(), timefns(), small)
def test_arithmetic_matches_sympy(f, g, c):
    fe, ge = f.to_sympy(t), g.to_sympy(t)
    assert values_match(f + g, fe + ge)
    assert values_match(f - g, fe - ge)
    assert values_match(f * c, c * fe)
    assert values_match(f.multiply(g), fe * ge, tol=1e-9)


@settings(max_examples=40, deadline=None)
@given(timefns())
def test_derivative_matches_sympy(f):
    assert values_match(f.derivative(), sp.diff(f.to_sympy(t), t), tol=1e-9)


@settings(max_examples=40, deadline=None)
@given(timefns())
def test_antiderivative_is_quadrature_from_zero(f):
    F = f.antiderivative()
    for b in (-1.2, 0.4, 1.1):
        ref, _ = quad(f, 0.0, b, epsabs=1e-13, epsrel=1e-12)
        assert F(b) - F(0.0) == pytest.approx(ref, abs=1e-8 * max(1, abs(ref)))
    assert F(0.0) == pytest.approx(0.0, abs=1e-9 * max(1.0, float(np.max(np.abs(f(TS))))))


def test_power_antiderivative_and_log():
    with pytest.raises(UnsupportedOperation):
        TimeFunction.power(-1.0).antiderivative()
    G = TimeFunction.power(1.5).antiderivative()
    assert G(2.0) - G(1.0) == pytest.approx((2**2.5 - 1) / 2.5)


@settings(max_examples=40, deadline=None)
@given(timefns(), st.floats(0.3, 2.0), small)
def test_affine_substitution(f, s, d):
    g = f.affine_sub(s, d)
    assert values_match(g, f.to_sympy(t).subs(t, s * t + d), tol=1e-9)


def test_shift_is_delay():
    f = TimeFunction.poly([0, 0, 1])
    assert f.shift(0.5)(2.0) == pytest.approx(1.5**2)


def test_mul_tpow():
    f = TimeFunction.exp(0.2)
    assert f.mul_tpow(2)(1.5) == pytest.approx(1.5**2 * np.exp(0.3))
    g = TimeFunction.monomial(1).mul_tpow(-3, POS)
    assert g(2.0) == pytest.approx(0.25)


@settings(max_examples=30, deadline=None)
@given(timefns())
def test_json_round_trip(f):
    g = TimeFunction.from_json(f.to_json())
    assert sup_distance(f, g) <= 1e-12


@pytest.mark.parametrize(
    "text",
    ["t", "3", "t**2 + 3*exp(-t)*sin(2*t)", "cos(t + 1)", "t*exp(2*t)", "sqrt(t) + 1/t**2", "exp(2*t + 1)"],
)
def test_parse_matches_expression(text):
    f = TimeFunction.parse(text)
    ts = np.linspace(0.2, 2.0, 9)
    ref = sp.lambdify(t, sp.sympify(text, locals={"t": t}), "numpy")(ts) * np.ones_like(ts)
    assert np.allclose(f(ts), ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("text", ["log(t)", "x + t", "exp(t**2)", "sin(t)**(1/2)"])
def test_parse_rejects_outside_algebra(text):
    with pytest.raises(UnsupportedOperation):
        TimeFunction.parse(text)


def test_as_timefn_coercions():
    assert as_timefn(2)(0.0) == 2
    assert as_timefn("t**2")(3.0) == pytest.approx(9.0)
    f = TimeFunction.cos(1.0)
    assert as_timefn(f) is f
    with pytest.raises(TypeError):
        as_timefn(object())


def test_sample_times_respect_domain():
    assert np.all(sample_times(POS) > 0)
    assert np.all(sample_times(NEG) < 0)
    assert sample_times().size == 64


def test_immutable():
    f = TimeFunction.const(1)
    with pytest.raises(AttributeError):
        f.terms = ()


def test_negative_powers_of_t():
    f = TimeFunction.cos(1.5, 0.2).mul_tpow(-2)
    assert f.is_singular() and not f.is_polynomial()
    ts = np.array([-1.3, 0.4, 1.7])
    assert np.allclose(f(ts), np.cos(1.5 * ts + 0.2) / ts**2)
    assert values_match(f.derivative(), sp.diff(f.to_sympy(t), t), ts=ts)
    assert values_match(f.affine_sub(-0.7), f.to_sympy(t).subs(t, -0.7 * t), ts=ts)
    with pytest.raises(DomainError):
        f(0.0)
    with pytest.raises(UnsupportedOperation):
        f.shift(0.1)
    with pytest.raises(UnsupportedOperation):
        f.antiderivative()
    G = TimeFunction.monomial(0, 3.0).mul_tpow(-3).antiderivative()
    assert G(2.0) - G(1.0) == pytest.approx(-1.5 * (0.25 - 1.0))


def test_small_terms_survive_unless_cancelled():
    big, tiny = TimeFunction.monomial(0, 1.0), TimeFunction.monomial(5, 1e-17)
    assert len((big + tiny).terms) == 2
    g = TimeFunction.exp(0.3, 0.1)
    assert not (g + g.scale(-1.0 + 1e-16))
