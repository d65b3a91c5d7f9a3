"""Spherical Gauss-Laguerre basis functions, quadrature rules and naive transforms.

The basis function of orders ``n >= 1``, ``0 <= l < n``, ``|m| <= l`` is

    H_nlm(r, theta, phi) = N_nl * L_{n-l-1}^{(l+1/2)}(r^2) * r^l * Y_lm(theta, phi)

with ``N_nl = sqrt(2 (n-l-1)! / Gamma(n + 1/2))``.  The family is orthonormal
in the space of functions on R^3 with inner product
``<f, g>_H = int f conj(g) exp(-|x|^2) dx``.

Points are passed in spherical coordinates ``[r, theta, phi]`` (last axis of
an array) unless a function name says ``cartesian``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np
from scipy.special import roots_genlaguerre, roots_hermite, roots_legendre

from .specfun import SignedLogReal, binom_general, gamma_half, laguerre, sph_harm

__all__ = [
    "SglIndex",
    "SglSpectrum",
    "QuadratureRule",
    "indices",
    "num_coefficients",
    "normalization",
    "radial",
    "eval_basis",
    "eval_basis_cartesian",
    "basis_matrix",
    "cartesian_to_spherical",
    "spherical_to_cartesian",
    "weighted_bessel_closed",
    "radial_rule",
    "angular_rule",
    "hermite_rule",
    "sgl_rule",
    "forward_transform",
    "synthesize",
]


@dataclass(frozen=True, order=True)
class SglIndex:
    n: int
    l: int
    m: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.l <= self.n - 1 or abs(self.m) > self.l:
            raise ValueError(f"invalid SGL index (n={self.n}, l={self.l}, m={self.m})")


def indices(bandwidth: int) -> Iterator[SglIndex]:
    """All indices with ``n <= bandwidth`` in storage order (n, l, m ascending)."""
    for n in range(1, bandwidth + 1):
        for l in range(n):
            for m in range(-l, l + 1):
                yield SglIndex(n, l, m)


def num_coefficients(bandwidth: int) -> int:
    return bandwidth * (bandwidth + 1) * (2 * bandwidth + 1) // 6


@dataclass(frozen=True)
class SglSpectrum:
    """Coefficients of a bandlimited function, stored as a flat complex array.

    ``coeffs[i]`` belongs to the ``i``-th index of :func:`indices`.
    """

    bandwidth: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.bandwidth < 1:
            raise ValueError("bandwidth must be >= 1")
        arr = np.array(self.coeffs, dtype=complex)
        if arr.shape != (num_coefficients(self.bandwidth),):
            raise ValueError(
                f"bandwidth {self.bandwidth} needs {num_coefficients(self.bandwidth)} "
                f"coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, bandwidth: int) -> "SglSpectrum":
        return cls(bandwidth, np.zeros(num_coefficients(bandwidth), dtype=complex))

    @classmethod
    def unit(cls, bandwidth: int, idx: SglIndex) -> "SglSpectrum":
        c = np.zeros(num_coefficients(bandwidth), dtype=complex)
        c[cls.position(idx)] = 1.0
        return cls(bandwidth, c)

    @classmethod
    def random(cls, bandwidth: int, rng: np.random.Generator) -> "SglSpectrum":
        size = num_coefficients(bandwidth)
        return cls(bandwidth, rng.standard_normal(size) + 1j * rng.standard_normal(size))

    @classmethod
    def from_mapping(cls, bandwidth: int, mapping: dict) -> "SglSpectrum":
        c = np.zeros(num_coefficients(bandwidth), dtype=complex)
        for idx, value in mapping.items():
            if not isinstance(idx, SglIndex):
                idx = SglIndex(*idx)
            if idx.n > bandwidth:
                raise ValueError(f"{idx} exceeds bandwidth {bandwidth}")
            c[cls.position(idx)] = value
        return cls(bandwidth, c)

    @staticmethod
    def position(idx: SglIndex) -> int:
        if not isinstance(idx, SglIndex):
            idx = SglIndex(*idx)
        n, l, m = idx.n, idx.l, idx.m
        return (n - 1) * n * (2 * n - 1) // 6 + l * l + (m + l)

    def __getitem__(self, idx) -> complex:
        if not isinstance(idx, SglIndex):
            idx = SglIndex(*idx)
        if idx.n > self.bandwidth:
            return 0j
        return complex(self.coeffs[self.position(idx)])

    def items(self):
        return zip(indices(self.bandwidth), self.coeffs)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def __add__(self, other: "SglSpectrum") -> "SglSpectrum":
        if other.bandwidth != self.bandwidth:
            raise ValueError("bandwidth mismatch")
        return SglSpectrum(self.bandwidth, self.coeffs + other.coeffs)

    def __mul__(self, scalar) -> "SglSpectrum":
        return SglSpectrum(self.bandwidth, self.coeffs * scalar)

    __rmul__ = __mul__

    # -- JSON ------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "bandwidth": self.bandwidth,
            "coefficients": [
                {"n": i.n, "l": i.l, "m": i.m, "re": float(c.real), "im": float(c.imag)}
                for i, c in self.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1)

    @classmethod
    def from_json_dict(cls, data: dict) -> "SglSpectrum":
        try:
            bandwidth = int(data["bandwidth"])
            entries = data["coefficients"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed spectrum: {exc}") from None
        expected = list(indices(bandwidth))
        if len(entries) != len(expected):
            raise ValueError(
                f"spectrum with bandwidth {bandwidth} needs {len(expected)} "
                f"coefficients, file has {len(entries)}")
        c = np.empty(len(expected), dtype=complex)
        for pos, (idx, entry) in enumerate(zip(expected, entries)):
            got = (entry.get("n"), entry.get("l"), entry.get("m"))
            if got != (idx.n, idx.l, idx.m):
                raise ValueError(f"coefficient {pos}: expected index "
                                 f"{(idx.n, idx.l, idx.m)}, found {got}")
            c[pos] = complex(float(entry["re"]), float(entry["im"]))
        return cls(bandwidth, c)

    @classmethod
    def from_json(cls, text: str) -> "SglSpectrum":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights with a declared exactness degree.

    ``kind`` is one of ``"radial"`` (nodes are ``s = r^2``), ``"angular"``
    (nodes are ``[theta, phi]``), ``"hermite"`` (Cartesian ``[x, y, z]``) or
    ``"sgl"`` (spherical ``[r, theta, phi]``).
    """

    kind: str
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exact_degree: int

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if len(nodes) != len(weights):
            raise ValueError("nodes and weights differ in length")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> complex | float:
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


# ---------------------------------------------------------------------------
# coordinates


def cartesian_to_spherical(xyz) -> np.ndarray:
    xyz = np.asarray(xyz, dtype=float)
    r = np.linalg.norm(xyz, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    theta = np.where(r > 0, np.arccos(np.clip(xyz[..., 2] / safe, -1.0, 1.0)), 0.0)
    phi = np.arctan2(xyz[..., 1], xyz[..., 0])
    return np.stack([r, theta, phi], axis=-1)


def spherical_to_cartesian(rtp) -> np.ndarray:
    rtp = np.asarray(rtp, dtype=float)
    r, t, p = rtp[..., 0], rtp[..., 1], rtp[..., 2]
    return np.stack([r * np.sin(t) * np.cos(p), r * np.sin(t) * np.sin(p), r * np.cos(t)],
                    axis=-1)


# ---------------------------------------------------------------------------
# basis functions


def _check_nl(n: int, l: int):
    if n < 1 or not 0 <= l < n:
        raise ValueError(f"invalid SGL orders n={n}, l={l}")


def normalization(n: int, l: int) -> SignedLogReal:
    """``N_nl = sqrt(2 (n-l-1)! / Gamma(n + 1/2))``."""
    _check_nl(n, l)
    fact = SignedLogReal(1, math.lgamma(n - l))
    return ((SignedLogReal.from_float(2.0) * fact) / gamma_half(n)).sqrt()


def radial(n: int, l: int, r):
    """Unnormalized radial part ``L_{n-l-1}^{(l+1/2)}(r^2) r^l``."""
    _check_nl(n, l)
    r = np.asarray(r, dtype=float)
    out = laguerre(n - l - 1, l + 0.5, r * r) * r ** l
    return out if np.ndim(out) else float(out)


def eval_basis(idx: SglIndex, points):
    """``H_nlm`` at spherical points (array with last axis ``[r, theta, phi]``)."""
    pts = np.asarray(points, dtype=float)
    val = (float(normalization(idx.n, idx.l)) * radial(idx.n, idx.l, pts[..., 0])
           * sph_harm(idx.l, idx.m, pts[..., 1], pts[..., 2]))
    return val if np.ndim(val) else complex(val)


def eval_basis_cartesian(idx: SglIndex, xyz):
    return eval_basis(idx, cartesian_to_spherical(xyz))


def basis_matrix(bandwidth: int, points) -> np.ndarray:
    """Values of every basis function with ``n <= bandwidth`` at the points.

    Returns shape ``(num_coefficients(bandwidth), npoints)``; rows follow the
    storage order.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    r, t, p = pts[:, 0], pts[:, 1], pts[:, 2]
    ylm = {}
    for l in range(bandwidth):
        for m in range(-l, l + 1):
            ylm[l, m] = sph_harm(l, m, t, p)
    out = np.empty((num_coefficients(bandwidth), len(pts)), dtype=complex)
    row = 0
    for n in range(1, bandwidth + 1):
        for l in range(n):
            rad = float(normalization(n, l)) * radial(n, l, r)
            for m in range(-l, l + 1):
                out[row] = rad * ylm[l, m]
                row += 1
    return out


# ---------------------------------------------------------------------------
# weighted spherical Bessel transform of N_nl R_nl, closed forms


def weighted_bessel_closed(n: int, l: int, gamma: float, beta):
    """Closed-form weighted spherical Bessel transform of ``N_nl R_nl``.

    The transform is ``sqrt(2/pi) int_0^inf f(xi) j_l(beta xi) xi^2
    exp(-gamma xi^2) dxi``.  Two branches: ``0 < gamma < 1`` and
    ``gamma == 1``.  In the first, ``(gamma-1)^k L_k(beta^2/(4 gamma (1-gamma)))``
    is expanded term by term so that nothing blows up as gamma approaches 1.
    """
    _check_nl(n, l)
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("beta must be positive")
    k = n - l - 1
    norm = float(normalization(n, l))
    if gamma == 1.0:
        out = (norm / math.factorial(k) * beta ** (2 * n - l - 2)
               * np.exp(-beta * beta / 4.0) * 0.5 ** (2 * n - l - 0.5))
    else:
        x = beta * beta / (4.0 * gamma)
        poly = np.zeros_like(beta)
        for j in range(k + 1):
            poly = poly + (binom_general(k + l + 0.5, k - j) / math.factorial(j)
                           * (gamma - 1.0) ** (k - j) * x ** j)
        out = (norm * gamma ** (-(n + 0.5)) * beta ** l * poly
               * np.exp(-x) * 0.5 ** (l + 1.5))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# quadrature rules


def radial_rule(bandwidth: int) -> QuadratureRule:
    """Gauss rule in ``s = r^2`` for the weight ``s^{1/2} e^{-s}`` on (0, inf).

    ``bandwidth`` nodes; exact for polynomials in ``s`` of degree
    ``2 * bandwidth - 1``, which covers every radial product of two SGL
    functions of equal ``l`` and ``n <= bandwidth``.
    """
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    s, w = roots_genlaguerre(bandwidth, 0.5)
    return QuadratureRule("radial", s, w, 2 * bandwidth - 1)


def angular_rule(bandwidth: int) -> QuadratureRule:
    """Gauss-Legendre in ``cos(theta)`` times ``2 * bandwidth`` uniform azimuths.

    Exact on the sphere for polynomials of degree ``2 * bandwidth - 1``.
    """
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    x, wx = roots_legendre(bandwidth)
    nphi = 2 * bandwidth
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    theta = np.arccos(x)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(wx, np.full(nphi, 2.0 * math.pi / nphi))
    nodes = np.stack([tt.ravel(), pp.ravel()], axis=-1)
    return QuadratureRule("angular", nodes, weights.ravel(), 2 * bandwidth - 1)


def hermite_rule(points_per_axis: int) -> QuadratureRule:
    """Tensor Gauss-Hermite rule on R^3 for the weight ``exp(-|x|^2)``.

    Exact for polynomials of degree ``2 * points_per_axis - 1`` in each
    coordinate.
    """
    if points_per_axis < 1:
        raise ValueError("points_per_axis must be >= 1")
    x, w = roots_hermite(points_per_axis)
    gx, gy, gz = np.meshgrid(x, x, x, indexing="ij")
    wgt = w[:, None, None] * w[None, :, None] * w[None, None, :]
    nodes = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    return QuadratureRule("hermite", nodes, wgt.ravel(), 2 * points_per_axis - 1)


def sgl_rule(bandwidth: int) -> QuadratureRule:
    """Product of :func:`radial_rule` and :func:`angular_rule` on R^3.

    Nodes are spherical ``[r, theta, phi]``; ``sum w f(x)`` approximates
    ``int f(x) exp(-|x|^2) dx`` and is exact for inner products of
    functions with bandwidth ``<= bandwidth``.
    """
    rad = radial_rule(bandwidth)
    ang = angular_rule(bandwidth)
    r = np.sqrt(rad.nodes)
    nodes = np.concatenate(
        [np.repeat(r, len(ang))[:, None], np.tile(ang.nodes, (len(rad), 1))], axis=1)
    # int_0^inf F(r) e^{-r^2} r^2 dr = (1/2) int_0^inf F(sqrt s) s^{1/2} e^{-s} ds
    weights = 0.5 * np.outer(rad.weights, ang.weights).ravel()
    return QuadratureRule("sgl", nodes, weights, 2 * bandwidth - 1)


# ---------------------------------------------------------------------------
# transforms


def forward_transform(f: Callable | np.ndarray, bandwidth: int, *,
                      quad_bandwidth: int | None = None) -> SglSpectrum:
    """SGL coefficients ``<f, H_nlm>_H`` for all ``n <= bandwidth``.

    ``f`` is either a callable taking an ``(N, 3)`` array of spherical points
    or an array of samples on the nodes of ``sgl_rule(quad_bandwidth)``.
    ``quad_bandwidth`` defaults to ``bandwidth`` (exact for bandlimited f);
    raise it for functions of higher polynomial degree.
    """
    qb = bandwidth if quad_bandwidth is None else quad_bandwidth
    if qb < bandwidth:
        raise ValueError("quad_bandwidth must be >= bandwidth")
    rule = sgl_rule(qb)
    if callable(f):
        values = np.asarray(f(rule.nodes), dtype=complex)
    else:
        values = np.asarray(f, dtype=complex)
    if values.shape != (len(rule),):
        raise ValueError(f"expected {len(rule)} samples on the bandwidth-{qb} grid, "
                         f"got shape {values.shape}")
    basis = basis_matrix(bandwidth, rule.nodes)
    return SglSpectrum(bandwidth, np.conj(basis) @ (rule.weights * values))


def synthesize(spectrum: SglSpectrum, points) -> np.ndarray:
    """Evaluate ``sum_nlm c_nlm H_nlm`` at spherical points."""
    pts = np.asarray(points, dtype=float)
    shape = pts.shape[:-1]
    vals = spectrum.coeffs @ basis_matrix(spectrum.bandwidth, pts.reshape(-1, 3))
    return vals.reshape(shape)
