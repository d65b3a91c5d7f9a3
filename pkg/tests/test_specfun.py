import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from sgltrans.specfun import (
    HalfInteger,
    SignedLogReal,
    binom_exact,
    binom_general,
    gamma_half,
    gamma_half_over_sqrtpi_exact,
    hyp1f1,
    hyp2f1_finite,
    hyp2f1_finite_exact,
    laguerre,
    laguerre_coefficients_exact,
    pochhammer,
    sph_bessel,
    sph_harm,
)


def test_half_integer_roundtrip():
    h = HalfInteger.from_value(2.5)
    assert h.twice_value == 5
    assert h.as_fraction() == Fraction(5, 2)
    assert float(h + HalfInteger.from_value(0.5)) == 3.0
    with pytest.raises(ValueError):
        HalfInteger.from_value(0.3)


def test_signed_log_real_arithmetic():
    a = SignedLogReal.from_float(-3.0)
    b = SignedLogReal.from_float(0.5)
    assert float(a * b) == pytest.approx(-1.5, rel=1e-15)
    assert float(a / b) == pytest.approx(-6.0, rel=1e-15)
    assert SignedLogReal.from_float(0.0).is_zero()
    assert float(SignedLogReal.from_float(0.0) * a) == 0.0
    # products far outside double range survive
    big = SignedLogReal(1, 800.0)
    assert float(big / SignedLogReal(1, 799.0)) == pytest.approx(math.e, rel=1e-13)


def test_laguerre_examples():
    half = HalfInteger.from_value(0.5)
    assert laguerre(0, half, 3.7) == 1.0
    assert laguerre(1, half, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert laguerre(2, half, 0.0) == pytest.approx(15 / 8, rel=1e-15)


def test_laguerre_rejects_alpha_below_minus_one():
    with pytest.raises(ValueError):
        laguerre(2, -1.0, 0.3)


@pytest.mark.parametrize("k", range(11))
@pytest.mark.parametrize("l", [0, 3, 8])
def test_laguerre_matches_exact_series(k, l):
    alpha = HalfInteger(2 * l + 1)
    coeffs = laguerre_coefficients_exact(k, alpha)
    for x in (0.0, 0.37, 2.0, 7.5):
        exact = sum(c * Fraction(x) ** j for j, c in enumerate(coeffs))
        assert laguerre(k, alpha, x) == pytest.approx(float(exact), rel=1e-12, abs=1e-12)


def test_laguerre_agrees_with_scipy():
    x = np.linspace(0, 10, 21)
    assert np.allclose(laguerre(6, 2.5, x), special.eval_genlaguerre(6, 2.5, x),
                       rtol=1e-12, atol=1e-12)


def test_sph_harm_examples():
    assert sph_harm(0, 0, 0.3, 1.2) == pytest.approx(1 / math.sqrt(4 * math.pi))
    assert sph_harm(1, 0, 0.0, 0.0) == pytest.approx(math.sqrt(3 / (4 * math.pi)))
    with pytest.raises(ValueError):
        sph_harm(2, 3, 0.1, 0.1)


def test_sph_harm_bound_and_conjugation():
    rng = np.random.default_rng(0)
    for _ in range(200):
        l = int(rng.integers(0, 11))
        m = int(rng.integers(-l, l + 1))
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        y = sph_harm(l, m, theta, phi)
        assert abs(y) <= math.sqrt((2 * l + 1) / (4 * math.pi)) + 1e-14
        assert abs(np.conj(y) - (-1) ** m * sph_harm(l, -m, theta, phi)) <= 1e-14


def test_sph_harm_orthonormal_on_sphere():
    lmax = 10
    x, w = special.roots_legendre(lmax + 1)
    theta = np.arccos(x)
    phi = np.arange(2 * lmax + 2) * 2 * math.pi / (2 * lmax + 2)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(w, np.full(len(phi), 2 * math.pi / len(phi)))
    pairs = [(l, m) for l in range(lmax + 1) for m in range(-l, l + 1)]
    vals = np.array([sph_harm(l, m, tt, pp).ravel() for l, m in pairs])
    gram = (vals * ww.ravel()) @ np.conj(vals).T
    assert np.max(np.abs(gram - np.eye(len(pairs)))) <= 1e-12


def test_sph_harm_matches_scipy():
    theta, phi = 0.83, 2.2
    for l in range(6):
        for m in range(-l, l + 1):
            ref = special.sph_harm_y(l, m, theta, phi)
            assert abs(sph_harm(l, m, theta, phi) - ref) <= 1e-14


def test_sph_bessel_examples():
    assert sph_bessel(0, 0.0) == 1.0
    assert sph_bessel(3, 0.0) == 0.0
    assert abs(sph_bessel(0, math.pi)) <= 1e-16
    assert sph_bessel(1, 2.0) == pytest.approx(math.sin(2) / 4 - math.cos(2) / 2, rel=1e-14)
    with pytest.raises(ValueError):
        sph_bessel(1, -0.5)


def test_sph_bessel_against_scipy():
    xi = np.concatenate([np.linspace(0, 1, 11), np.linspace(1.1, 40, 200)])
    for n in range(16):
        ours = sph_bessel(n, xi)
        ref = special.spherical_jn(n, xi)
        assert np.allclose(ours, ref, rtol=1e-11, atol=1e-14)


def test_sph_bessel_bound():
    rng = np.random.default_rng(3)
    for _ in range(300):
        n = int(rng.integers(0, 11))
        xi = rng.uniform(1e-6, 20.0)
        bound = (math.sqrt(math.pi / (2 * xi)) * 2 * (xi / 2) ** (n + 0.5)
                 / (math.sqrt(math.pi) * math.factorial(n)))
        assert abs(sph_bessel(n, xi)) <= bound * (1 + 1e-12)


def test_gamma_half():
    assert float(gamma_half(0)) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert float(gamma_half(2)) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-15)
    assert float(gamma_half(10)) / float(gamma_half(9)) == pytest.approx(9.5, rel=1e-14)
    assert gamma_half_over_sqrtpi_exact(2) == Fraction(3, 4)
    for n in range(25):
        diff = gamma_half(n + 1).log_magnitude - gamma_half(n).log_magnitude
        assert abs(diff - math.log(n + 0.5)) <= 1e-14
    # beyond that the spacing of doubles near log Gamma exceeds 1e-14
    for n in range(25, 80):
        diff = gamma_half(n + 1).log_magnitude - gamma_half(n).log_magnitude
        assert abs(diff - math.log(n + 0.5)) <= 4 * math.ulp(gamma_half(n + 1).log_magnitude)


def test_pochhammer_and_binomials():
    assert pochhammer(7.3, 0) == 1.0
    assert pochhammer(0, 1) == 0.0
    assert pochhammer(3, 2) == 12.0
    assert pochhammer(-2, 5) == 0.0
    assert binom_general(1.5, 1) == 1.5
    assert binom_general(0, 1) == 0.0
    assert binom_general(-2, 2) == 3.0
    assert binom_exact(Fraction(7, 2), 2) == Fraction(35, 8)


@given(st.integers(1, 12), st.data())
@settings(max_examples=60, deadline=None)
def test_finite_differences_annihilate_low_degree(n, data):
    degree = data.draw(st.integers(0, n - 1))
    coeffs = data.draw(st.lists(st.floats(-10, 10), min_size=degree + 1, max_size=degree + 1))
    terms = [(-1) ** k * math.comb(n, k) * sum(c * k ** i for i, c in enumerate(coeffs))
             for k in range(n + 1)]
    scale = max(1.0, max(abs(t) for t in terms))
    assert abs(math.fsum(terms)) <= 1e-10 * scale


def test_hyp1f1_examples():
    assert hyp1f1(0.7, 2.3, 0.0) == 1.0
    assert hyp1f1(-1, 1.5, 2.0) == pytest.approx(-1 / 3, rel=1e-15)
    assert hyp1f1(0, -3.5, 8.0) == 1.0
    assert hyp1f1(1.2, 2.5, 3.1) == pytest.approx(special.hyp1f1(1.2, 2.5, 3.1), rel=1e-13)
    with pytest.raises(ValueError):
        hyp1f1(1.5, -2, 1.0)
    # terminates before hitting the zero denominator
    assert hyp1f1(-1, -3, 2.0) == pytest.approx(1 + 2 / 3, rel=1e-15)


def test_hyp2f1_finite_examples():
    assert hyp2f1_finite(0, 0, 4) == 1.0
    assert hyp2f1_finite(0, 1, 0) == 0.0
    assert hyp2f1_finite(1, 1, 0) == 0.0


@pytest.mark.parametrize("j", range(5))
@pytest.mark.parametrize("p", range(4))
def test_hyp2f1_finite_is_a_series_coefficient(j, p):
    # coefficient of g^q in (1 + g)^(-j-p) (1 - g)^(-j)
    for q in range(6):
        expected = sum(binom_exact(-j - p, s) * binom_exact(-j, q - s) * (-1) ** (q - s)
                       for s in range(q + 1))
        assert hyp2f1_finite_exact(j, q, p) == expected


def test_hyp2f1_finite_matches_scipy_where_defined():
    # C(-j-p, q) 2F1(j, -q; 1-j-q-p; -1) when the lower parameter is not a pole
    j, q, p = 2, 2, 1
    c = 1 - j - q - p
    series = sum(special.poch(j, s) * special.poch(-q, s) / (special.poch(c, s) * math.factorial(s))
                 * (-1) ** s for s in range(q + 1))
    assert hyp2f1_finite(j, q, p) == pytest.approx(float(binom_exact(-j - p, q)) * series,
                                                   rel=1e-14)
