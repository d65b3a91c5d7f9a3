"""Closed-form SGL translation matrix elements.

``T[n, n', l, l', |m|](nu) = <T(nu e_z) H_nlm, H_n'l'm>_H`` where
``T(t) f(x) = f(x - t)``.  The element is real, vanishes unless the two
``m`` agree and does not depend on the sign of ``m``.

For ``nu > 0``::

    T = (-1)^(n-l-1) sqrt(pi)/4 N_nl N_n'l' / (n'-l'-1)!
        * sum_k (-1)^k A_k nu^k
          * sum_j (-1)^j / j! C(n - 1/2, n-l-1-j) Gamma(mu+j+1/2) / Gamma(k+3/2) C_j(nu)

with ``mu = n' + (l - l' + k)/2`` and the polynomial ``C_j`` of
:func:`c_poly`.  Only ``k`` with ``l - l' + k`` even contribute.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .sgl import SglIndex, normalization
from .specfun import (
    SignedLogReal,
    binom_exact,
    gamma_half,
    gamma_half_over_sqrtpi_exact,
    hyp2f1_finite,
    hyp2f1_finite_exact,
    pochhammer,
    pochhammer_exact,
)
from .wigner import EulerZYZ, rot_y, rot_z, wigner3j, wigner3j_squared_exact, wigner_d_matrix

__all__ = [
    "Pose",
    "TranslationTable",
    "a_coeff",
    "a_coeff_squared_exact",
    "mu_of",
    "c_poly",
    "c_poly_coefficients_exact",
    "t_element",
    "t_element_signed",
    "t_element_exact",
    "table_keys",
    "build_table",
    "alignment_rotation",
    "coupled_element",
]


# ---------------------------------------------------------------------------
# addition-theorem coefficients


def _check_a_args(l: int, l_p: int, m: int, k: int):
    if l < 0 or l_p < 0 or abs(m) > min(l, l_p):
        raise ValueError(f"need |m| <= min(l, l'), got l={l}, l'={l_p}, m={m}")
    if not abs(l - l_p) <= k <= l + l_p:
        raise ValueError(f"k={k} outside the triangle range [{abs(l - l_p)}, {l + l_p}]")


def a_coeff(l: int, l_p: int, m: int, k: int) -> float:
    """Coupling coefficient ``A_k^{(l l' m)}`` of the spherical Bessel addition theorem.

    ``(-1)^((k-l+l')/2 + m) sqrt((2l+1)(2l'+1)) (2k+1)
    3j(l l' k; 0 0 0) 3j(l l' k; m -m 0)``; exactly zero for odd ``l-l'+k``.
    """
    _check_a_args(l, l_p, m, k)
    if (l - l_p + k) % 2:
        return 0.0
    # even in m once l + l' + k is even; fix the sign so both give identical bits
    m = abs(m)
    w0 = wigner3j(l, l_p, k, 0, 0, 0)
    if w0 == 0.0:
        return 0.0
    wm = wigner3j(l, l_p, k, m, -m, 0)
    sign = -1 if ((k - l + l_p) // 2 + m) % 2 else 1
    return sign * math.sqrt((2 * l + 1) * (2 * l_p + 1)) * (2 * k + 1) * w0 * wm


def a_coeff_squared_exact(l: int, l_p: int, m: int, k: int) -> tuple[int, Fraction]:
    """``A_k`` as ``(sign, A_k**2)`` in exact arithmetic."""
    _check_a_args(l, l_p, m, k)
    if (l - l_p + k) % 2:
        return 0, Fraction(0)
    m = abs(m)
    s0, w0 = wigner3j_squared_exact(l, l_p, k, 0, 0, 0)
    sm, wm = wigner3j_squared_exact(l, l_p, k, m, -m, 0)
    if s0 == 0 or sm == 0:
        return 0, Fraction(0)
    sign = -1 if ((k - l + l_p) // 2 + m) % 2 else 1
    return sign * s0 * sm, (2 * l + 1) * (2 * l_p + 1) * (2 * k + 1) ** 2 * w0 * wm


def mu_of(n_p: int, l: int, l_p: int, k: int) -> int:
    """``mu = n' + (l - l' + k) / 2``; requires ``l - l' + k`` even."""
    if (l - l_p + k) % 2:
        raise ValueError(f"l - l' + k must be even, got {l - l_p + k}")
    return n_p + (l - l_p + k) // 2


# ---------------------------------------------------------------------------
# C_j polynomials


def _check_c_args(n, l, j):
    if not 0 <= j <= n - l - 1:
        raise ValueError(f"j={j} outside [0, n-l-1] for n={n}, l={l}")


def c_poly(n: int, n_p: int, l: int, l_p: int, k: int, j: int, nu: float) -> float:
    """The polynomial ``C_j(nu)`` (in ``nu**2``) of the closed form.

    ``sum_{p=0}^{n-mu} [C(-j-p, q) 2F1(j, -q; 1-j-q-p; -1)]_{q=n-mu-p}
    (-mu+k-j+1)_p / (p! (k+3/2)_p) nu^(2p)``; the empty sum (``n < mu``)
    gives 0.
    """
    mu = mu_of(n_p, l, l_p, k)
    _check_c_args(n, l, j)
    top = n - mu
    terms = []
    for p in range(top + 1):
        h = hyp2f1_finite(j, top - p, p)
        if h == 0.0:
            continue
        terms.append(h * pochhammer(-mu + k - j + 1, p)
                     / (math.factorial(p) * pochhammer(k + 1.5, p)) * nu ** (2 * p))
    return math.fsum(terms)


def c_poly_coefficients_exact(n: int, n_p: int, l: int, l_p: int, k: int,
                              j: int) -> list[Fraction]:
    """Exact coefficients of ``C_j`` as a polynomial in ``nu**2``."""
    mu = mu_of(n_p, l, l_p, k)
    _check_c_args(n, l, j)
    top = n - mu
    out = []
    for p in range(top + 1):
        out.append(hyp2f1_finite_exact(j, top - p, p)
                   * pochhammer_exact(-mu + k - j + 1, p)
                   / (math.factorial(p) * pochhammer_exact(Fraction(2 * k + 3, 2), p)))
    return out


# ---------------------------------------------------------------------------
# translation matrix elements


def _check_t_args(n, n_p, l, l_p, m_abs):
    if n < 1 or n_p < 1 or not 0 <= l < n or not 0 <= l_p < n_p:
        raise ValueError(f"invalid orders n={n}, n'={n_p}, l={l}, l'={l_p}")
    if not 0 <= m_abs <= min(l, l_p):
        raise ValueError(f"m_abs={m_abs} must lie in [0, min(l, l')]")


def _log_gamma_half(n: int) -> float:
    return gamma_half(n).log_magnitude


def _radial_k_terms(n: int, n_p: int, l: int, l_p: int, nu: float) -> dict[int, float]:
    """Everything in the closed form except ``A_k``, one compensated sum per k.

    Each (k, j, p) summand is assembled as a :class:`SignedLogReal` and
    exponentiated once.  Includes the global prefactor and ``(-1)^k nu^k``.
    """
    pref = (SignedLogReal(-1 if (n - l - 1) % 2 else 1, 0.5 * math.log(math.pi) - math.log(4.0))
            * normalization(n, l) * normalization(n_p, l_p)
            / SignedLogReal(1, math.lgamma(n_p - l_p)))
    log_nu = math.log(nu)
    log_gamma_n = _log_gamma_half(n)
    out = {}
    for k in range(abs(l - l_p), l + l_p + 1):
        if (l - l_p + k) % 2:
            continue
        mu = mu_of(n_p, l, l_p, k)
        top = n - mu
        if top < 0:
            continue
        # (-1)^k nu^k / Gamma(k + 3/2)
        k_fac = pref * SignedLogReal(-1 if k % 2 else 1,
                                     k * log_nu - _log_gamma_half(k + 1))
        terms = []
        for j in range(n - l):
            # C(n-1/2, n-l-1-j) = Gamma(n+1/2) / ((n-l-1-j)! Gamma(l+j+3/2))
            j_fac = k_fac * SignedLogReal(
                -1 if j % 2 else 1,
                log_gamma_n - math.lgamma(n - l - j) - _log_gamma_half(l + j + 1)
                - math.lgamma(j + 1) + _log_gamma_half(mu + j))
            for p in range(top + 1):
                h = hyp2f1_finite(j, top - p, p)
                poch = pochhammer(-mu + k - j + 1, p)
                if h == 0.0 or poch == 0.0:
                    continue
                term = j_fac * SignedLogReal.from_float(h * poch) * SignedLogReal(
                    1, 2 * p * log_nu - math.lgamma(p + 1)
                    - math.log(pochhammer(k + 1.5, p)))
                terms.append(float(term))
        out[k] = math.fsum(terms)
    return out


def _combine(k_terms: dict[int, float], l: int, l_p: int, m_abs: int, signed: int) -> float:
    vals = []
    for k, v in k_terms.items():
        a = a_coeff(l, l_p, m_abs, k)
        if a == 0.0:
            continue
        vals.append(a * v * (signed ** k))
    return math.fsum(vals)


def t_element(n: int, n_p: int, l: int, l_p: int, m_abs: int, nu: float) -> float:
    """Translation matrix element for a shift by ``nu > 0`` along +z."""
    _check_t_args(n, n_p, l, l_p, m_abs)
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu} (use t_element_signed for nu < 0)")
    return _combine(_radial_k_terms(n, n_p, l, l_p, nu), l, l_p, m_abs, 1)


def t_element_signed(n: int, n_p: int, l: int, l_p: int, m_abs: int, nu_signed: float) -> float:
    """Translation element for a shift by ``nu_signed`` along z (either sign).

    A shift towards -z multiplies the k-th term by an extra ``(-1)^k``.
    """
    _check_t_args(n, n_p, l, l_p, m_abs)
    if nu_signed == 0:
        raise ValueError("nu_signed must be non-zero")
    sign = 1 if nu_signed > 0 else -1
    return _combine(_radial_k_terms(n, n_p, l, l_p, abs(nu_signed)), l, l_p, m_abs, sign)


def t_element_exact(n: int, n_p: int, l: int, l_p: int, m_abs: int, nu,
                    *, dps: int = 50) -> mpmath.mpf:
    """Closed form evaluated from exact rational coefficients.

    Every factor except square roots is rational; the element is assembled
    as ``sum_k sign_k sqrt(r_k) nu^k P_k(nu^2)`` with exact ``r_k`` and
    ``P_k`` and evaluated with ``dps`` decimal digits.  Slow; intended as a
    test oracle for small orders.
    """
    _check_t_args(n, n_p, l, l_p, m_abs)
    with mpmath.workdps(dps):
        nu_mp = mpmath.mpf(Fraction(nu).numerator) / Fraction(nu).denominator \
            if isinstance(nu, (int, Fraction)) else mpmath.mpf(nu)
        if nu_mp <= 0:
            raise ValueError("nu must be positive")
        # (sqrt(pi)/4 N N')^2 = 4 (n-l-1)! (n'-l'-1)! / (16 g(n) g(n')), g = Gamma(.+1/2)/sqrt(pi)
        pref_sq = Fraction(4 * math.factorial(n - l - 1) * math.factorial(n_p - l_p - 1),
                           16) / (gamma_half_over_sqrtpi_exact(n) * gamma_half_over_sqrtpi_exact(n_p))
        pref_rat = Fraction((-1) ** (n - l - 1), math.factorial(n_p - l_p - 1))
        total = mpmath.mpf(0)
        for k in range(abs(l - l_p), l + l_p + 1):
            a_sign, a_sq = a_coeff_squared_exact(l, l_p, m_abs, k)
            if a_sign == 0:
                continue
            mu = mu_of(n_p, l, l_p, k)
            if n - mu < 0:
                continue
            poly = [Fraction(0)] * (n - mu + 1)
            for j in range(n - l):
                coef = (Fraction((-1) ** j, math.factorial(j))
                        * binom_exact(Fraction(2 * n - 1, 2), n - l - 1 - j)
                        * gamma_half_over_sqrtpi_exact(mu + j)
                        / gamma_half_over_sqrtpi_exact(k + 1))
                for p, c in enumerate(c_poly_coefficients_exact(n, n_p, l, l_p, k, j)):
                    poly[p] += coef * c
            root = mpmath.sqrt(_mpf(pref_sq * a_sq))
            value = sum(_mpf(c) * nu_mp ** (2 * p) for p, c in enumerate(poly))
            total += a_sign * (-1) ** k * _mpf(pref_rat) * root * nu_mp ** k * value
        return +total


def _mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


# ---------------------------------------------------------------------------
# tables


def table_keys(bandwidth: int) -> list[tuple[int, int, int, int, int]]:
    """Sorted keys ``(n, n', l, l', m_abs)`` of a translation table."""
    keys = []
    for n in range(1, bandwidth + 1):
        for n_p in range(1, bandwidth + 1):
            for l in range(n):
                for l_p in range(n_p):
                    for m_abs in range(min(l, l_p) + 1):
                        keys.append((n, n_p, l, l_p, m_abs))
    return keys


@dataclass(frozen=True)
class TranslationTable:
    """All translation elements for one shift ``nu`` and bandwidth ``B``."""

    bandwidth: int
    nu: float
    entries: dict = field(repr=False)

    def __getitem__(self, key) -> float:
        n, n_p, l, l_p, m = key
        m = abs(m)
        if m > min(l, l_p):
            return 0.0
        return self.entries[(n, n_p, l, l_p, m)]

    def __len__(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        """Dense array ``A[n-1, n'-1, l, l', m_abs]`` (zeros where undefined)."""
        b = self.bandwidth
        arr = np.zeros((b, b, b, b, b))
        for (n, n_p, l, l_p, m), v in self.entries.items():
            arr[n - 1, n_p - 1, l, l_p, m] = v
        return arr

    def max_deviation_from_identity(self) -> float:
        worst = 0.0
        for (n, n_p, l, l_p, _), v in self.entries.items():
            target = 1.0 if (n, l) == (n_p, l_p) else 0.0
            worst = max(worst, abs(v - target))
        return worst

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "np", "l", "lp", "m_abs", "nu", "value"])
        nu_txt = format(self.nu, ".17g")
        for key in sorted(self.entries):
            writer.writerow([*key, nu_txt, format(self.entries[key], ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TranslationTable":
        reader = csv.DictReader(io.StringIO(text))
        entries = {}
        nu = None
        for row in reader:
            key = tuple(int(row[c]) for c in ("n", "np", "l", "lp", "m_abs"))
            entries[key] = float(row["value"])
            nu = float(row["nu"])
        if not entries:
            raise ValueError("empty translation table")
        bandwidth = max(max(k[0], k[1]) for k in entries)
        if sorted(entries) != table_keys(bandwidth):
            raise ValueError("translation table is missing entries")
        return cls(bandwidth, nu, entries)


def _table_rows(args) -> list[tuple[tuple, float]]:
    n, l, bandwidth, nu = args
    out = []
    for n_p in range(1, bandwidth + 1):
        for l_p in range(n_p):
            k_terms = _radial_k_terms(n, n_p, l, l_p, nu)
            for m_abs in range(min(l, l_p) + 1):
                out.append(((n, n_p, l, l_p, m_abs), _combine(k_terms, l, l_p, m_abs, 1)))
    return out


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SGL_NUM_THREADS", "1")))
    except ValueError:
        return 1


def build_table(bandwidth: int, nu: float, *, workers: int | None = None) -> TranslationTable:
    """Evaluate every translation element with ``n, n' <= bandwidth``.

    Work is split by ``(n, l)`` across ``workers`` processes (default: the
    ``SGL_NUM_THREADS`` environment variable, else 1).
    """
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    if not nu > 0:
        raise ValueError(f"nu must be positive, got {nu}")
    workers = default_workers() if workers is None else workers
    jobs = [(n, l, bandwidth, float(nu)) for n in range(1, bandwidth + 1) for l in range(n)]
    if workers <= 1:
        chunks = [_table_rows(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_table_rows, jobs))
    entries = {key: value for chunk in chunks for key, value in chunk}
    return TranslationTable(bandwidth, float(nu), dict(sorted(entries.items())))


# ---------------------------------------------------------------------------
# rotation + translation


@dataclass(frozen=True)
class Pose:
    """Rigid motion ``x -> R x + t``; ``t`` stored as length and direction angles."""

    rotation: EulerZYZ = EulerZYZ()
    nu: float = 0.0
    theta_t: float = 0.0
    phi_t: float = 0.0

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("translation length must be non-negative")
        if not 0.0 <= self.theta_t <= math.pi:
            raise ValueError("theta_t must lie in [0, pi]")

    @classmethod
    def from_vector(cls, rotation: EulerZYZ, t) -> "Pose":
        t = np.asarray(t, dtype=float)
        nu = float(np.linalg.norm(t))
        if nu == 0.0:
            return cls(rotation, 0.0, 0.0, 0.0)
        theta = math.acos(max(-1.0, min(1.0, t[2] / nu)))
        phi = math.atan2(t[1], t[0]) % (2 * math.pi)
        return cls(rotation, nu, theta, phi)

    def translation_vector(self) -> np.ndarray:
        st = math.sin(self.theta_t)
        return self.nu * np.array([st * math.cos(self.phi_t), st * math.sin(self.phi_t),
                                   math.cos(self.theta_t)])

    def apply(self, f):
        """The function ``x -> f(R^{-1} (x - t))`` for ``f`` on Cartesian points."""
        rot = self.rotation.as_matrix()
        t = self.translation_vector()
        return lambda xyz: f((np.asarray(xyz) - t) @ rot)


def alignment_rotation(theta_t: float, phi_t: float, twist: float = 0.0) -> np.ndarray:
    """Matrix turning the direction ``(theta_t, phi_t)`` onto +z.

    ``twist`` adds a final turn about z; any value gives a valid alignment.
    """
    return rot_z(twist) @ rot_y(-theta_t) @ rot_z(-phi_t)


def coupled_element(idx: SglIndex, idx_p: SglIndex, pose: Pose,
                    table: TranslationTable | None = None, *, twist: float = 0.0) -> complex:
    """``<T(t) R H_idx, H_idx_p>_H`` for the rigid motion ``pose``.

    Rotates the shift onto +z with an auxiliary rotation ``Q`` and sums
    ``D^l_{m mu}(Q R) conj(D^l'_{m' mu}(Q)) T^(|mu|)(|t|)`` over ``mu``.
    ``table`` may supply the elements for ``|t|``; otherwise they are
    computed directly.
    """
    n, l, m = idx.n, idx.l, idx.m
    n_p, l_p, m_p = idx_p.n, idx_p.l, idx_p.m
    if pose.nu == 0.0:
        if (n, l) != (n_p, l_p):
            return 0j
        return complex(wigner_d_matrix(l, pose.rotation)[m + l, m_p + l])
    if table is not None and not math.isclose(table.nu, pose.nu, rel_tol=1e-12):
        raise ValueError(f"table is for nu={table.nu}, pose has nu={pose.nu}")
    q = alignment_rotation(pose.theta_t, pose.phi_t, twist)
    d_left = wigner_d_matrix(l, EulerZYZ.from_matrix(q @ pose.rotation.as_matrix()))
    d_right = wigner_d_matrix(l_p, EulerZYZ.from_matrix(q))
    k_terms = None if table is not None else _radial_k_terms(n, n_p, l, l_p, pose.nu)
    total = 0j
    for mu in range(-min(l, l_p), min(l, l_p) + 1):
        if table is not None:
            t = table[(n, n_p, l, l_p, abs(mu))]
        else:
            t = _combine(k_terms, l, l_p, abs(mu), 1)
        total += d_left[m + l, mu + l] * np.conj(d_right[m_p + l_p, mu + l_p]) * t
    return complex(total)
