"""Scalar special functions used by the SGL machinery.

Laguerre polynomials, complex spherical harmonics (Condon-Shortley phase),
spherical Bessel functions, half-integer Gamma values, Pochhammer symbols,
generalized binomials and terminating hypergeometric sums.

Everything here is a pure function.  Functions that take ``x``/``xi``/
``theta`` accept scalars or numpy arrays and broadcast.

A small exact path (``*_exact`` helpers built on :class:`fractions.Fraction`)
is kept for the test suite; it is slow and only meant for low orders.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "HalfInteger",
    "SignedLogReal",
    "laguerre",
    "laguerre_coefficients_exact",
    "sph_harm",
    "sph_bessel",
    "gamma_half",
    "gamma_half_over_sqrtpi_exact",
    "pochhammer",
    "pochhammer_exact",
    "binom_general",
    "binom_exact",
    "hyp1f1",
    "hyp2f1_finite",
    "hyp2f1_finite_exact",
]



@dataclass(frozen=True)
class HalfInteger:
    """A number of the form ``k/2`` with integer ``k``, stored exactly."""

    twice_value: int

    @classmethod
    def from_value(cls, value) -> "HalfInteger":
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise ValueError(f"{value!r} is not an integer or half-odd-integer")
        return cls(int(twice))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self) -> float:
        return self.twice_value / 2.0

    def __add__(self, other):
        if isinstance(other, HalfInteger):
            return HalfInteger(self.twice_value + other.twice_value)
        if isinstance(other, int):
            return HalfInteger(self.twice_value + 2 * other)
        return NotImplemented

    __radd__ = __add__

    def __repr__(self) -> str:
        if self.is_integer:
            return f"HalfInteger({self.twice_value // 2})"
        return f"HalfInteger({self.twice_value}/2)"


@dataclass(frozen=True)
class SignedLogReal:
    """Real number stored as ``sign * exp(log_magnitude)``.

    Used to carry products of Gamma functions, factorials and binomials
    that would overflow a double long before the final term does.
    """

    sign: int
    log_magnitude: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")

    @classmethod
    def from_float(cls, value: float) -> "SignedLogReal":
        if value == 0:
            return cls(0, 0.0)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @classmethod
    def one(cls) -> "SignedLogReal":
        return cls(1, 0.0)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other):
        if not isinstance(other, SignedLogReal):
            other = SignedLogReal.from_float(float(other))
        if self.sign == 0 or other.sign == 0:
            return SignedLogReal(0, 0.0)
        return SignedLogReal(self.sign * other.sign,
                             self.log_magnitude + other.log_magnitude)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SignedLogReal):
            other = SignedLogReal.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("division by SignedLogReal zero")
        if self.sign == 0:
            return SignedLogReal(0, 0.0)
        return SignedLogReal(self.sign * other.sign,
                             self.log_magnitude - other.log_magnitude)

    def __neg__(self):
        return SignedLogReal(-self.sign, self.log_magnitude)

    def __pow__(self, exponent: float):
        if self.sign == 0:
            if exponent <= 0:
                raise ZeroDivisionError("0 raised to a non-positive power")
            return SignedLogReal(0, 0.0)
        if self.sign < 0 and exponent != int(exponent):
            raise ValueError("fractional power of a negative number")
        sign = self.sign if int(exponent) % 2 else 1
        return SignedLogReal(sign, self.log_magnitude * exponent)

    def sqrt(self) -> "SignedLogReal":
        return self ** 0.5

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def _alpha_value(alpha) -> float:
    if isinstance(alpha, HalfInteger):
        return float(alpha)
    return float(alpha)


# ---------------------------------------------------------------------------
# Laguerre polynomials


def laguerre(k: int, alpha, x):
    """Generalized Laguerre polynomial ``L_k^{(alpha)}(x)``.

    Evaluated with the three-term recurrence, which is stable for the
    positive arguments used here; the explicit finite sum lives in
    :func:`laguerre_coefficients_exact`.
    """
    if k < 0:
        raise ValueError("degree k must be non-negative")
    a = _alpha_value(alpha)
    if a <= -1:
        raise ValueError(f"alpha must exceed -1, got {a}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for i in range(k):
        prev, cur = cur, ((2 * i + 1 + a - x) * cur - (i + a) * prev) / (i + 1)
    return cur if cur.ndim else float(cur)


def laguerre_coefficients_exact(k: int, alpha) -> list[Fraction]:
    """Exact monomial coefficients of ``L_k^{(alpha)}`` for rational alpha.

    Coefficient ``j`` is ``(-1)^j binom(k + alpha, k - j) / j!``.
    """
    a = Fraction(alpha.as_fraction() if isinstance(alpha, HalfInteger) else alpha)
    if a <= -1:
        raise ValueError(f"alpha must exceed -1, got {a}")
    return [(-1) ** j * binom_exact(k + a, k - j) / math.factorial(j)
            for j in range(k + 1)]


# ---------------------------------------------------------------------------
# spherical harmonics


def _legendre_normalized(l: int, m: int, cos_t, sin_t):
    """Orthonormal associated Legendre function incl. Condon-Shortley phase, m >= 0."""
    pmm = np.full_like(cos_t, math.sqrt(1.0 / (4 * math.pi)))
    for i in range(1, m + 1):
        pmm = -math.sqrt((2 * i + 1) / (2.0 * i)) * sin_t * pmm
    if l == m:
        return pmm
    p_prev, p_cur = pmm, math.sqrt(2 * m + 3) * cos_t * pmm
    for ll in range(m + 2, l + 1):
        a = math.sqrt((4 * ll * ll - 1) / (ll * ll - m * m))
        b = math.sqrt(((ll - 1) ** 2 - m * m) / (4 * (ll - 1) ** 2 - 1))
        p_prev, p_cur = p_cur, a * (cos_t * p_cur - b * p_prev)
    return p_cur


def sph_harm(l: int, m: int, theta, phi):
    """Orthonormal complex spherical harmonic ``Y_lm(theta, phi)``.

    ``theta`` is the polar angle, ``phi`` the azimuth.  Condon-Shortley
    phase, so ``conj(Y_lm) == (-1)**m * Y_{l,-m}``.
    """
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid spherical harmonic indices l={l}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ma = abs(m)
    p = _legendre_normalized(l, ma, np.cos(theta), np.sin(theta))
    y = p * np.exp(1j * ma * phi)
    if m < 0:
        y = (-1) ** ma * np.conj(y)
    return y if y.ndim else complex(y)


# ---------------------------------------------------------------------------
# spherical Bessel functions


def _sph_bessel_series(n: int, xi):
    # j_n(x) = x^n/(2n+1)!! * sum_k (-x^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    pref = np.ones_like(xi)
    for i in range(1, n + 1):
        pref = pref * xi / (2 * i + 1)
    term = np.ones_like(xi)
    total = np.ones_like(xi)
    h = -0.5 * xi * xi
    for k in range(1, 40):
        term = term * h / (k * (2 * n + 2 * k + 1))
        total = total + term
    return pref * total


def _sph_bessel_upward(n: int, xi):
    j0 = np.sin(xi) / xi
    if n == 0:
        return j0
    j1 = np.sin(xi) / xi ** 2 - np.cos(xi) / xi
    for i in range(1, n):
        j0, j1 = j1, (2 * i + 1) / xi * j1 - j0
    return j1


def _sph_bessel_miller(n: int, xi):
    # downward recurrence normalised by sum_k (2k+1) j_k^2 = 1
    start = n + 20 + int(np.max(xi)) + int(math.sqrt(40 * (n + np.max(xi) + 1)))
    f_next = np.zeros_like(xi)
    f_cur = np.ones_like(xi)
    norm = (2 * start + 1) * f_cur ** 2
    keep = np.zeros_like(xi)
    for k in range(start, 0, -1):
        f_prev = (2 * k + 1) / xi * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        norm = norm + (2 * (k - 1) + 1) * f_cur ** 2
        if k - 1 == n:
            keep = f_cur.copy()
        big = np.abs(f_cur) > 1e100
        if np.any(big):
            scale = np.where(big, 1e-100, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            keep = keep * scale
            norm = norm * scale ** 2
    # sign follows j_0 = sin(x)/x near zero; fix sign by comparing f_0 with sin(x)/x
    sign = np.where(np.sin(xi) / xi * f_cur < 0, -1.0, 1.0)
    small_j0 = np.abs(np.sin(xi) / xi) < 1e-3
    if np.any(small_j0):
        # j_1 = sin/x^2 - cos/x is well away from zero whenever j_0 is tiny
        j1 = np.sin(xi) / xi ** 2 - np.cos(xi) / xi
        sign = np.where(small_j0, np.where(j1 * f_next < 0, -1.0, 1.0), sign)
    return sign * keep / np.sqrt(norm)


def sph_bessel(n: int, xi):
    """Spherical Bessel function of the first kind ``j_n(xi)`` for ``xi >= 0``.

    Continuous at the origin: ``j_0(0) = 1`` and ``j_n(0) = 0`` for n > 0.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("sph_bessel is defined for xi >= 0")
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    out = np.empty_like(xi)
    small = xi < 1.0
    up = (~small) & (xi > n)
    mid = ~(small | up)
    if np.any(small):
        out[small] = _sph_bessel_series(n, xi[small])
    if np.any(up):
        out[up] = _sph_bessel_upward(n, xi[up])
    if np.any(mid):
        out[mid] = _sph_bessel_miller(n, xi[mid])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Gamma, Pochhammer, binomials


def gamma_half(n: int) -> SignedLogReal:
    """``Gamma(n + 1/2) = sqrt(pi) (n+1)_n 4^{-n}`` as a :class:`SignedLogReal`."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return SignedLogReal(1, math.lgamma(n + 0.5))


def gamma_half_over_sqrtpi_exact(n: int) -> Fraction:
    """Exact ``Gamma(n + 1/2) / sqrt(pi)``."""
    return Fraction(pochhammer_exact(n + 1, n), 4 ** n)


def pochhammer(c, k: int) -> float:
    """Rising factorial ``(c)_k = c (c+1) ... (c+k-1)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for i in range(k):
        out *= c + i
        if out == 0:
            return 0.0
    return out


def pochhammer_exact(c, k: int):
    """Exact rising factorial for integer or :class:`Fraction` ``c``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1 if isinstance(c, int) else Fraction(1)
    for i in range(k):
        out *= c + i
    return out


def binom_general(a, k: int) -> float:
    """Generalized binomial ``C(a, k) = a (a-1) ... (a-k+1) / k!``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


def binom_exact(a, k: int) -> Fraction:
    """Exact generalized binomial for rational ``a``; zero for negative ``k``."""
    if k < 0:
        return Fraction(0)
    a = Fraction(a)
    out = Fraction(1)
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


# ---------------------------------------------------------------------------
# hypergeometric sums


def _is_nonpositive_int(v) -> bool:
    return float(v) <= 0 and float(v) == math.floor(float(v))


def hyp1f1(a: float, b: float, z: float, *, max_terms: int = 10_000) -> float:
    """Kummer's function ``1F1(a; b; z)`` by direct summation.

    The series is summed to termination when ``a`` is a non-positive
    integer, otherwise until the relative size of the next term drops
    below 1e-15.
    """
    terminating = _is_nonpositive_int(a)
    if _is_nonpositive_int(b):
        if not (terminating and -a < -b + 1):
            raise ValueError(f"1F1 undefined: b={b} is a non-positive integer")
    if z == 0 or a == 0:
        return 1.0
    term = 1.0
    total = 1.0
    k_stop = int(-a) if terminating else max_terms
    for k in range(k_stop):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if not terminating and abs(term) < 1e-15 * abs(total) and k > abs(z):
            break
    else:
        if not terminating:
            raise ArithmeticError("1F1 series did not converge")
    return total


def hyp2f1_finite_exact(j: int, q: int, p: int) -> Fraction:
    """Exact ``C(-j-p, q) * 2F1(j, -q; 1-j-q-p; -1)``.

    Evaluated as ``(1/q!) sum_s (-1)^s (-q)_s (1-p-q+s-j)_{q-s} (j)_s / s!``,
    which never divides by the (often vanishing) lower Pochhammer symbol.
    This is also the ``g^q`` coefficient of ``(1+g)^(-j-p) (1-g)^(-j)``.
    """
    if min(j, q, p) < 0:
        raise ValueError("j, q, p must be non-negative")
    total = Fraction(0)
    for s in range(q + 1):
        total += Fraction((-1) ** s * pochhammer_exact(-q, s)
                          * pochhammer_exact(1 - p - q + s - j, q - s)
                          * pochhammer_exact(j, s), math.factorial(s))
    return total / math.factorial(q)


def hyp2f1_finite(j: int, q: int, p: int) -> float:
    """Float value of :func:`hyp2f1_finite_exact` (all arithmetic is integer)."""
    return float(hyp2f1_finite_exact(j, q, p))

