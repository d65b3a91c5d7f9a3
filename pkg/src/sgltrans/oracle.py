"""Brute-force reference computations for the closed forms.

Nothing here uses the closed-form translation code it is meant to check:
translated and rotated basis functions are evaluated directly in Cartesian
coordinates and integrated with tensor Gauss-Hermite rules, Bessel
transforms are integrated numerically, and ``D_pq`` is summed as defined.

The ``suite_*`` functions bundle the checks into :class:`OracleReport`
lists, which is what ``sgltrans verify`` prints.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from . import sgl
from .sgl import SglIndex, basis_matrix, cartesian_to_spherical, hermite_rule, indices
from .specfun import (
    binom_exact,
    binom_general,
    gamma_half,
    gamma_half_over_sqrtpi_exact,
    hyp2f1_finite,
    hyp2f1_finite_exact,
    pochhammer,
    pochhammer_exact,
    sph_bessel,
    sph_harm,
)
from .translate import a_coeff, build_table, mu_of, t_element, t_element_signed
from .wigner import EulerZYZ, wigner_d_matrix

__all__ = [
    "OracleReport",
    "inner_product_h",
    "translation_matrix_numeric",
    "t_element_numeric",
    "rotation_matrix_numeric",
    "rotation_element_numeric",
    "bessel_transform_numeric",
    "inversion_numeric",
    "d_pq",
    "d_pq_exact",
    "addition_theorem_residual",
    "SUITES",
    "run_suites",
]

LOG_CUTOFF = math.log(1e18)


@dataclass
class OracleReport:
    case_id: str
    closed_form: complex | float
    oracle_value: complex | float
    abs_err: float
    rel_err: float
    passed: bool

    @classmethod
    def compare(cls, case_id: str, closed_form, oracle_value, *, rel_tol: float,
                abs_floor: float = 0.0) -> "OracleReport":
        abs_err = float(abs(closed_form - oracle_value))
        scale = abs(oracle_value)
        rel_err = abs_err / scale if scale > 0 else (0.0 if abs_err == 0 else math.inf)
        passed = rel_err <= rel_tol or abs_err <= abs_floor
        return cls(case_id, closed_form, oracle_value, abs_err, rel_err, passed)

    def to_json(self) -> str:
        def num(v):
            v = complex(v)
            return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}

        rel = float(self.rel_err)
        return json.dumps({
            "case_id": self.case_id,
            "closed_form": num(self.closed_form),
            "oracle_value": num(self.oracle_value),
            "abs_err": float(self.abs_err),
            "rel_err": None if math.isinf(rel) else rel,
            "passed": bool(self.passed),
        }, sort_keys=True)


# ---------------------------------------------------------------------------
# Gaussian-weighted inner products


def inner_product_h(f: Callable, g: Callable, points_per_axis: int) -> complex:
    """``int f conj(g) exp(-|x|^2) dx`` by tensor Gauss-Hermite quadrature.

    ``f`` and ``g`` map an ``(N, 3)`` array of Cartesian points to values.
    Exact when ``f conj(g)`` is a polynomial of degree at most
    ``2 * points_per_axis - 1`` in each coordinate.
    """
    rule = hermite_rule(points_per_axis)
    vals = np.asarray(f(rule.nodes)) * np.conj(np.asarray(g(rule.nodes)))
    return complex(np.sum(rule.weights * vals))


def _gram(bandwidth: int, moved_points: np.ndarray, rule) -> np.ndarray:
    moved = basis_matrix(bandwidth, cartesian_to_spherical(moved_points))
    fixed = basis_matrix(bandwidth, cartesian_to_spherical(rule.nodes))
    return (moved * rule.weights) @ np.conj(fixed).T


def translation_matrix_numeric(bandwidth: int, nu_signed: float) -> np.ndarray:
    """All ``<T(nu e_z) H_i, H_j>_H`` for ``n <= bandwidth``, rows/cols in storage order."""
    rule = hermite_rule(2 * bandwidth)
    return _gram(bandwidth, rule.nodes - np.array([0.0, 0.0, nu_signed]), rule)


def t_element_numeric(n: int, n_p: int, l: int, l_p: int, m: int, m_p: int,
                      nu_signed: float) -> complex:
    """Quadrature value of a single translation element (any ``m, m'``)."""
    idx, idx_p = SglIndex(n, l, m), SglIndex(n_p, l_p, m_p)
    shift = np.array([0.0, 0.0, nu_signed])
    return inner_product_h(lambda x: sgl.eval_basis_cartesian(idx, x - shift),
                           lambda x: sgl.eval_basis_cartesian(idx_p, x),
                           2 * max(n, n_p))


def rotation_matrix_numeric(bandwidth: int, euler: EulerZYZ) -> np.ndarray:
    """All ``<R H_i, H_j>_H`` with ``(R f)(x) = f(R^{-1} x)``."""
    rule = hermite_rule(2 * bandwidth)
    rot = euler.as_matrix()
    # rows of nodes @ rot are R^T x = R^{-1} x
    return _gram(bandwidth, rule.nodes @ rot, rule)


def rotation_element_numeric(n: int, l: int, m: int, n_p: int, l_p: int, m_p: int,
                             euler: EulerZYZ) -> complex:
    idx, idx_p = SglIndex(n, l, m), SglIndex(n_p, l_p, m_p)
    rot = euler.as_matrix()
    return inner_product_h(lambda x: sgl.eval_basis_cartesian(idx, x @ rot),
                           lambda x: sgl.eval_basis_cartesian(idx_p, x),
                           2 * max(n, n_p))


# ---------------------------------------------------------------------------
# weighted spherical Bessel transform by direct integration


def _composite_legendre(upper: float, panels: int = 2048, order: int = 8):
    x, w = roots_legendre(order)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def bessel_transform_numeric(n: int, l: int, gamma: float, beta: float) -> float:
    """Weighted spherical Bessel transform of ``N_nl R_nl`` by quadrature.

    The integral is cut where ``exp(-gamma xi^2)`` drops below 1e-18 and
    integrated with a 2048-panel composite Gauss-Legendre rule.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    xi, w = _composite_legendre(math.sqrt(LOG_CUTOFF / gamma))
    f = float(sgl.normalization(n, l)) * sgl.radial(n, l, xi)
    integrand = f * sph_bessel(l, beta * xi) * xi * xi * np.exp(-gamma * xi * xi)
    return math.sqrt(2.0 / math.pi) * float(np.sum(w * integrand))


def inversion_numeric(n: int, l: int, gamma: float, xi: float) -> float:
    """Recover ``R_nl(xi)`` from the closed-form transform by the inversion integral.

    ``exp(gamma xi^2) sqrt(2/pi) int transform(beta) j_l(beta xi) beta^2 dbeta``,
    divided by ``N_nl``; the beta range is cut where the Gaussian factor of
    the transform falls below 1e-18.
    """
    beta, w = _composite_legendre(math.sqrt(4.0 * gamma * LOG_CUTOFF))
    beta = beta[beta > 0]
    w = w[-len(beta):]
    tr = sgl.weighted_bessel_closed(n, l, gamma, beta)
    val = math.exp(gamma * xi * xi) * math.sqrt(2.0 / math.pi) * float(
        np.sum(w * tr * sph_bessel(l, beta * xi) * beta * beta))
    return val / float(sgl.normalization(n, l))


# ---------------------------------------------------------------------------
# D_pq


def _dpq_terms(n, n_p, l, l_p, k, p, q):
    mu = mu_of(n_p, l, l_p, k)
    terms = []
    for j in range(n - l):
        terms.append((-1) ** j / math.factorial(j)
                     * binom_general(n - 0.5, n - l - 1 - j)
                     * float(gamma_half(mu + j))
                     * pochhammer(-mu + k - j + 1, p)
                     * hyp2f1_finite(j, q, p))
    return terms


def d_pq(n: int, n_p: int, l: int, l_p: int, k: int, p: int, q: int,
         *, return_scale: bool = False):
    """Double-series coefficient ``D_pq`` summed over ``j`` in floating point.

    With ``return_scale=True`` also returns the largest term magnitude, the
    natural yardstick for judging a cancelled-to-zero result.
    """
    terms = _dpq_terms(n, n_p, l, l_p, k, p, q)
    value = math.fsum(terms)
    if return_scale:
        return value, max((abs(t) for t in terms), default=0.0)
    return value


def d_pq_exact(n: int, n_p: int, l: int, l_p: int, k: int, p: int, q: int) -> Fraction:
    """``D_pq / sqrt(pi)`` as an exact rational."""
    mu = mu_of(n_p, l, l_p, k)
    total = Fraction(0)
    for j in range(n - l):
        total += (Fraction((-1) ** j, math.factorial(j))
                  * binom_exact(Fraction(2 * n - 1, 2), n - l - 1 - j)
                  * gamma_half_over_sqrtpi_exact(mu + j)
                  * pochhammer_exact(-mu + k - j + 1, p)
                  * hyp2f1_finite_exact(j, q, p))
    return total


# ---------------------------------------------------------------------------
# addition theorem


def addition_theorem_residual(l: int, m: int, beta: float, nu: float, point,
                              l_max: int) -> float:
    """``|j_l(beta r) Y_lm - truncated expansion around x - nu e_z|`` at one point.

    ``point`` is spherical ``[r, theta, phi]`` with ``r > 0``; the expansion
    keeps ``l' <= l_max``.
    """
    r, theta, phi = (float(v) for v in point)
    if r <= 0:
        raise ValueError("point must have r > 0")
    if l_max < l:
        raise ValueError("l_max must be >= l")
    lhs = sph_bessel(l, beta * r) * sph_harm(l, m, theta, phi)
    x = sgl.spherical_to_cartesian([r, theta, phi]) - np.array([0.0, 0.0, nu])
    r2, theta2, phi2 = cartesian_to_spherical(x)
    terms = []
    for l_p in range(abs(m), l_max + 1):
        y = sph_harm(l_p, m, theta2, phi2) * sph_bessel(l_p, beta * r2)
        for k in range(abs(l - l_p), l + l_p + 1):
            a = a_coeff(l, l_p, m, k)
            if a == 0.0:
                continue
            terms.append(a * sph_bessel(k, beta * nu) * y)
    rhs = sum(terms, 0j)
    return float(abs(lhs - rhs))


# ---------------------------------------------------------------------------
# suites


def _sgn(canary: bool) -> float:
    return -1.0 if canary else 1.0


def suite_translation(max_n: int = 4, nus=(0.1, 0.5, 1.0, 2.0), canary=False):
    out = []
    idx = list(indices(max_n))
    for nu in nus:
        numeric = translation_matrix_numeric(max_n, nu)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                if i.m != j.m or i.m < 0:
                    continue
                cf = _sgn(canary) * t_element(i.n, j.n, i.l, j.l, i.m, nu)
                out.append(OracleReport.compare(
                    f"translation/n={i.n},np={j.n},l={i.l},lp={j.l},m={i.m},nu={nu}",
                    cf, numeric[a, b].real, rel_tol=1e-8, abs_floor=1e-12))
    return out


def suite_signed(max_n: int = 4, nus=(0.5, 1.0), canary=False):
    out = []
    idx = list(indices(max_n))
    for nu in nus:
        numeric = translation_matrix_numeric(max_n, -nu)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                if i.m != j.m or i.m < 0:
                    continue
                cf = _sgn(canary) * t_element_signed(i.n, j.n, i.l, j.l, i.m, -nu)
                out.append(OracleReport.compare(
                    f"signed/n={i.n},np={j.n},l={i.l},lp={j.l},m={i.m},nu={-nu}",
                    cf, numeric[a, b].real, rel_tol=1e-10, abs_floor=1e-10))
    return out


def suite_selection(max_n: int = 4, nu: float = 1.0, canary=False):
    out = []
    idx = list(indices(max_n))
    pos = {i: a for a, i in enumerate(idx)}
    numeric = translation_matrix_numeric(max_n, nu)
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            if i.m != j.m:
                out.append(OracleReport.compare(
                    f"selection/m!=mp/{i.n}{i.l}{i.m}-{j.n}{j.l}{j.m}",
                    0.0, numeric[a, b], rel_tol=0.0, abs_floor=1e-12))
            elif i.m > 0:
                flipped = numeric[pos[SglIndex(i.n, i.l, -i.m)], pos[SglIndex(j.n, j.l, -j.m)]]
                out.append(OracleReport.compare(
                    f"selection/sign-m/{i.n}{i.l}{i.m}-{j.n}{j.l}{j.m}",
                    _sgn(canary) * numeric[a, b], flipped, rel_tol=0.0, abs_floor=1e-10))
    return out


def suite_parity(max_l: int = 6, canary=False):
    out = []
    for l in range(max_l + 1):
        for l_p in range(max_l + 1):
            for m in range(min(l, l_p) + 1):
                for k in range(abs(l - l_p), l + l_p + 1):
                    if (l - l_p + k) % 2 == 0:
                        continue
                    val = a_coeff(l, l_p, m, k) + (1.0 if canary else 0.0)
                    out.append(OracleReport.compare(
                        f"parity/l={l},lp={l_p},m={m},k={k}", val, 0.0,
                        rel_tol=0.0, abs_floor=0.0))
    return out


def suite_dpq(max_n: int = 5, canary=False):
    out = []
    for n in range(1, max_n + 1):
        for n_p in range(1, max_n + 1):
            for l in range(n):
                for l_p in range(n_p):
                    for k in range(abs(l - l_p), l + l_p + 1):
                        if (l - l_p + k) % 2:
                            continue
                        mu = mu_of(n_p, l, l_p, k)
                        for p in range(n - mu):
                            for q in range(n - mu - p):
                                val, scale = d_pq(n, n_p, l, l_p, k, p, q, return_scale=True)
                                rel = abs(val) / scale if scale else 0.0
                                if canary:
                                    rel += 1.0
                                out.append(OracleReport(
                                    f"dpq/n={n},np={n_p},l={l},lp={l_p},k={k},p={p},q={q}",
                                    val, 0.0, abs(val), rel, rel <= 1e-9))
    return out


def suite_orthonormality(max_n: int = 5, canary=False):
    rule = sgl.sgl_rule(max_n)
    basis = basis_matrix(max_n, rule.nodes)
    gram = (basis * rule.weights) @ np.conj(basis).T
    target = np.eye(len(gram)) * _sgn(canary)
    err = float(np.max(np.abs(gram - target)))
    return [OracleReport(f"orthonormality/max_n={max_n}", 0.0, err, err, err, err <= 1e-12)]


def suite_rotation(max_n: int = 4, n_rotations: int = 5, seed: int = 7, canary=False):
    out = []
    rng = np.random.default_rng(seed)
    idx = list(indices(max_n))
    for r in range(n_rotations):
        euler = EulerZYZ(rng.uniform(0, 2 * math.pi), math.acos(rng.uniform(-1, 1)),
                         rng.uniform(0, 2 * math.pi))
        numeric = rotation_matrix_numeric(max_n, euler)
        dmats = {l: wigner_d_matrix(l, euler) for l in range(max_n)}
        expected = np.zeros_like(numeric)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                if (i.n, i.l) == (j.n, j.l):
                    expected[a, b] = dmats[i.l][i.m + i.l, j.m + j.l]
        if canary:
            expected = np.conj(expected)
        err = float(np.max(np.abs(numeric - expected)))
        out.append(OracleReport(f"rotation/{r}", 0.0, err, err, err, err <= 1e-10))
    return out


def bessel_sample(count: int = 20, seed: int = 11):
    """Reproducible ``(n, l, gamma, beta)`` tuples for the transform check."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, 5))
        l = int(rng.integers(0, n))
        gamma = float(rng.choice([0.3, 0.7, 1.0]))
        beta = float(rng.uniform(0.05, 4.0))
        out.append((n, l, gamma, beta))
    return out


def suite_bessel(canary=False):
    out = []
    for n, l, gamma, beta in bessel_sample():
        cf = _sgn(canary) * sgl.weighted_bessel_closed(n, l, gamma, beta)
        out.append(OracleReport.compare(
            f"bessel/n={n},l={l},gamma={gamma},beta={beta:.6f}", cf,
            bessel_transform_numeric(n, l, gamma, beta), rel_tol=0.0, abs_floor=1e-8))
    for xi in (0.5, 1.0, 2.0):
        cf = _sgn(canary) * sgl.radial(2, 1, xi)
        out.append(OracleReport.compare(f"inversion/n=2,l=1,gamma=0.5,xi={xi}", cf,
                                        inversion_numeric(2, 1, 0.5, xi),
                                        rel_tol=0.0, abs_floor=1e-6))
    return out


def addition_cases(count: int = 3, seed: int = 5):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        l = int(rng.integers(0, 4))
        m = int(rng.integers(-l, l + 1))
        beta = float(rng.uniform(0.5, 2.0))
        nu = float(rng.uniform(0.2, 1.0))
        point = (float(rng.uniform(0.3, 1.5)), float(rng.uniform(0.1, 3.0)),
                 float(rng.uniform(0, 2 * math.pi)))
        cases.append((l, m, beta, nu, point))
    return cases


def suite_addition(canary=False, noise: float = 1e-13):
    out = []
    for c, (l, m, beta, nu, point) in enumerate(addition_cases()):
        res = [addition_theorem_residual(l, m, beta, nu, point, lm) for lm in (4, 8, 12, 16)]
        if canary:
            res = res[::-1]
        ok = all(b <= a + noise for a, b in zip(res, res[1:]))
        out.append(OracleReport(f"addition/{c}/residuals={['%.3e' % v for v in res]}",
                                res[-1], 0.0, res[-1], res[-1], ok))
    return out


def suite_zero_limit(canary=False):
    table = build_table(4, 1e-6)
    dev = table.max_deviation_from_identity() + (1.0 if canary else 0.0)
    return [OracleReport("zero-limit/B=4,nu=1e-6", dev, 0.0, dev, dev, dev <= 1e-5)]


SUITES = {
    "translation": suite_translation,
    "signed": suite_signed,
    "selection": suite_selection,
    "parity": suite_parity,
    "dpq": suite_dpq,
    "orthonormality": suite_orthonormality,
    "rotation": suite_rotation,
    "bessel": suite_bessel,
    "addition": suite_addition,
    "zero-limit": suite_zero_limit,
}


def run_suites(names=None, *, canary: bool = False, max_n: int | None = None):
    """Run the named suites (all by default) and return the reports."""
    names = list(SUITES) if not names else list(names)
    reports = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        fn = SUITES[name]
        if max_n is not None and name in ("translation", "signed", "selection", "rotation"):
            reports.extend(fn(max_n=max_n, canary=canary))
        else:
            reports.extend(fn(canary=canary))
    return reports
