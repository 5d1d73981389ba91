import numpy as np
import pytest
import sympy as sp
from scipy.special import lpmv

from vortsym.legendre import degree_from_separation_constant, legendre_p, legendre_sympy

MU = np.linspace(-0.999, 0.999, 41)


def test_examples():
    assert legendre_p(1, 0, 0.3) == pytest.approx(0.3)
    assert legendre_p(2, 0, 0.5) == pytest.approx(-0.125)
    assert legendre_p(1, 1, 0.6) == pytest.approx(-0.8)


def test_explicit_polynomials_low_degree():
    s = np.sqrt(1 - MU**2)
    table = {
        (2, 1): -3 * MU * s,
        (2, 2): 3 * (1 - MU**2),
        (3, 0): (5 * MU**3 - 3 * MU) / 2,
        (3, 1): -1.5 * (5 * MU**2 - 1) * s,
        (3, 2): 15 * MU * (1 - MU**2),
        (3, 3): -15 * s**3,
        (4, 0): (35 * MU**4 - 30 * MU**2 + 3) / 8,
        (4, 4): 105 * (1 - MU**2) ** 2,
    }
    for (n, m), ref in table.items():
        assert np.max(np.abs(legendre_p(n, m, MU) - ref)) <= 1e-12


@pytest.mark.parametrize("n", range(0, 9))
def test_matches_scipy(n):
    for m in range(-n, n + 1):
        ref = lpmv(m, n, MU)
        assert np.allclose(legendre_p(n, m, MU), ref, rtol=1e-12, atol=1e-12 * max(1.0, np.max(np.abs(ref))))


@pytest.mark.parametrize("n", range(0, 5))
def test_sympy_closed_form_agrees(n):
    mu = sp.Symbol("mu", real=True)
    for m in range(-n, n + 1):
        fn = sp.lambdify(mu, legendre_sympy(n, m, mu), "numpy")
        vals = np.broadcast_to(np.asarray(fn(MU), float), MU.shape)
        assert np.max(np.abs(vals - legendre_p(n, m, MU))) <= 1e-12


def test_rejects_bad_orders():
    with pytest.raises(ValueError):
        legendre_p(2, 3, 0.1)
    with pytest.raises(ValueError):
        legendre_p(-1, 0, 0.1)
    with pytest.raises(ValueError):
        legendre_p(2, 1, 1.5)


def test_degree_from_separation_constant():
    assert degree_from_separation_constant(-2.0) == pytest.approx(1.0)
    for n in range(6):
        assert degree_from_separation_constant(-n * (n + 1)) == pytest.approx(n, abs=1e-12)
