"""Wigner 3j symbols and Wigner-D rotation matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "EulerZYZ",
    "rot_y",
    "rot_z",
    "wigner3j",
    "wigner3j_squared_exact",
    "wigner_small_d",
    "wigner_d_matrix",
]

TWO_PI = 2.0 * math.pi


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class EulerZYZ:
    """Rotation given by z-y-z Euler angles (radians).

    The point rotation is ``Rz(gamma) @ Ry(-beta) @ Rz(alpha)`` (see
    :meth:`as_matrix`): turn by ``alpha`` about z, then by ``-beta`` about
    the fixed y axis, then by ``gamma`` about z.  This is the reading under
    which the function rotation ``(R f)(x) = f(R^{-1} x)`` satisfies
    ``<R Y_lm, Y_lm'> = wigner_d_matrix(l, euler)[m + l, m' + l]``.
    """

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= math.pi + 1e-12:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")

    @classmethod
    def identity(cls) -> "EulerZYZ":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def canonical(cls, alpha: float, beta: float, gamma: float) -> "EulerZYZ":
        """Build with alpha and gamma wrapped into ``[0, 2 pi)``."""
        return cls(alpha % TWO_PI, min(max(beta, 0.0), math.pi), gamma % TWO_PI)

    def as_matrix(self) -> np.ndarray:
        return rot_z(self.gamma) @ rot_y(-self.beta) @ rot_z(self.alpha)

    def inverse(self) -> "EulerZYZ":
        return EulerZYZ.from_matrix(self.as_matrix().T)

    @classmethod
    def from_matrix(cls, rot: np.ndarray) -> "EulerZYZ":
        """Recover the angles from a proper rotation matrix."""
        rot = np.asarray(rot, dtype=float)
        # standard split rot = Rz(a) Ry(b) Rz(c); then
        # Rz(a) Ry(b) Rz(c) = Rz(a + pi) Ry(-b) Rz(c + pi)
        b = math.acos(min(1.0, max(-1.0, rot[2, 2])))
        sin_b = math.sin(b)
        if sin_b > 1e-12:
            a = math.atan2(rot[1, 2], rot[0, 2])
            c = math.atan2(rot[2, 1], -rot[2, 0])
        elif rot[2, 2] > 0:
            a, c = math.atan2(rot[1, 0], rot[0, 0]), 0.0
        else:
            a, c = math.atan2(-rot[1, 0], -rot[0, 0]), 0.0
        return cls.canonical(c + math.pi, b, a + math.pi)


# ---------------------------------------------------------------------------
# 3j symbols


def _triangle_ok(l1: int, l2: int, l3: int) -> bool:
    return abs(l1 - l2) <= l3 <= l1 + l2


def _check_m(l1, l2, l3, m1, m2, m3):
    for l, m in ((l1, m1), (l2, m2), (l3, m3)):
        if l < 0 or abs(m) > l:
            raise ValueError(f"invalid angular momentum pair l={l}, m={m}")


def _racah_range(l1, l2, l3, m1, m2):
    t_min = max(0, l2 - l3 - m1, l1 - l3 + m2)
    t_max = min(l1 + l2 - l3, l1 - m1, l2 + m2)
    return t_min, t_max


def wigner3j(l1: int, l2: int, l3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol for integer arguments via Racah's single sum.

    Factorial products are handled in log space.  Exact zeros are returned
    for violated selection rules.
    """
    _check_m(l1, l2, l3, m1, m2, m3)
    if m1 + m2 + m3 != 0 or not _triangle_ok(l1, l2, l3):
        return 0.0
    if m1 == m2 == m3 == 0 and (l1 + l2 + l3) % 2:
        return 0.0
    lg = math.lgamma
    log_pref = 0.5 * (
        lg(l1 + l2 - l3 + 1) + lg(l1 - l2 + l3 + 1) + lg(-l1 + l2 + l3 + 1)
        - lg(l1 + l2 + l3 + 2)
        + lg(l1 + m1 + 1) + lg(l1 - m1 + 1) + lg(l2 + m2 + 1)
        + lg(l2 - m2 + 1) + lg(l3 + m3 + 1) + lg(l3 - m3 + 1)
    )
    t_min, t_max = _racah_range(l1, l2, l3, m1, m2)
    terms = []
    for t in range(t_min, t_max + 1):
        log_den = (lg(t + 1) + lg(l3 - l2 + t + m1 + 1) + lg(l3 - l1 + t - m2 + 1)
                   + lg(l1 + l2 - l3 - t + 1) + lg(l1 - t - m1 + 1) + lg(l2 - t + m2 + 1))
        terms.append((-1) ** t * math.exp(log_pref - log_den))
    phase = -1 if (l1 - l2 - m3) % 2 else 1
    return phase * math.fsum(terms)


def wigner3j_squared_exact(l1: int, l2: int, l3: int,
                           m1: int, m2: int, m3: int) -> tuple[int, Fraction]:
    """Exact 3j symbol as ``(sign, value**2)`` in rational arithmetic."""
    _check_m(l1, l2, l3, m1, m2, m3)
    if m1 + m2 + m3 != 0 or not _triangle_ok(l1, l2, l3):
        return 0, Fraction(0)
    f = math.factorial
    pref = Fraction(
        f(l1 + l2 - l3) * f(l1 - l2 + l3) * f(-l1 + l2 + l3)
        * f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2) * f(l3 + m3) * f(l3 - m3),
        f(l1 + l2 + l3 + 1),
    )
    t_min, t_max = _racah_range(l1, l2, l3, m1, m2)
    total = Fraction(0)
    for t in range(t_min, t_max + 1):
        den = (f(t) * f(l3 - l2 + t + m1) * f(l3 - l1 + t - m2)
               * f(l1 + l2 - l3 - t) * f(l1 - t - m1) * f(l2 - t + m2))
        total += Fraction((-1) ** t, den)
    if total == 0:
        return 0, Fraction(0)
    phase = -1 if (l1 - l2 - m3) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return sign, pref * total * total


# ---------------------------------------------------------------------------
# rotation matrices


def wigner_small_d(l: int, beta: float) -> np.ndarray:
    """Real matrix ``d^l_{mm'}(beta)``, rows/cols indexed by ``m + l``.

    Wigner's factorial sum; ``d^1_{1,0}(beta) = -sin(beta)/sqrt(2)``.
    """
    size = 2 * l + 1
    out = np.zeros((size, size))
    c, s = math.cos(beta / 2.0), math.sin(beta / 2.0)
    lf = [math.lgamma(i + 1) for i in range(2 * l + 2)]
    for mp in range(-l, l + 1):
        for m in range(-l, l + 1):
            log_root = 0.5 * (lf[l + mp] + lf[l - mp] + lf[l + m] + lf[l - m])
            acc = []
            for k in range(max(0, m - mp), min(l + m, l - mp) + 1):
                pc = 2 * l + m - mp - 2 * k
                ps = mp - m + 2 * k
                val = c ** pc * s ** ps
                if val == 0.0:
                    continue
                log_den = lf[l + m - k] + lf[k] + lf[mp - m + k] + lf[l - mp - k]
                sign = -1 if (mp - m + k) % 2 else 1
                acc.append(sign * math.exp(log_root - log_den) * val)
            out[mp + l, m + l] = math.fsum(acc)
    return out


def wigner_d_matrix(l: int, euler: EulerZYZ) -> np.ndarray:
    """Complex ``(2l+1) x (2l+1)`` matrix ``D^l_{mm'} = e^{-i m alpha} d^l_{mm'}(beta) e^{-i m' gamma}``."""
    ms = np.arange(-l, l + 1)
    left = np.exp(-1j * ms * euler.alpha)
    right = np.exp(-1j * ms * euler.gamma)
    return left[:, None] * wigner_small_d(l, euler.beta) * right[None, :]
