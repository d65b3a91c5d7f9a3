import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgltrans.wigner import (
    EulerZYZ,
    wigner3j,
    wigner3j_squared_exact,
    wigner_d_matrix,
    wigner_small_d,
)

angles = st.tuples(st.floats(0, 2 * math.pi, exclude_max=True), st.floats(0, math.pi),
                   st.floats(0, 2 * math.pi, exclude_max=True))


def test_wigner3j_examples():
    assert wigner3j(0, 0, 0, 0, 0, 0) == 1.0
    assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0
    assert wigner3j(1, 1, 2, 0, 0, 0) == pytest.approx(math.sqrt(2 / 15), rel=1e-15)
    assert wigner3j_squared_exact(1, 1, 2, 0, 0, 0) == (1, Fraction(2, 15))


def test_wigner3j_selection_rules_are_exact():
    assert wigner3j(2, 1, 1, 1, 0, 0) == 0.0
    assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0
    with pytest.raises(ValueError):
        wigner3j(1, 1, 1, 2, 0, -2)


def test_wigner3j_matches_exact_rationals():
    for l1 in range(7):
        for l2 in range(7):
            for l3 in range(abs(l1 - l2), min(l1 + l2, 6) + 1):
                for m1 in range(-l1, l1 + 1):
                    for m2 in range(-l2, l2 + 1):
                        m3 = -m1 - m2
                        if abs(m3) > l3:
                            continue
                        sign, sq = wigner3j_squared_exact(l1, l2, l3, m1, m2, m3)
                        assert wigner3j(l1, l2, l3, m1, m2, m3) == pytest.approx(
                            sign * math.sqrt(sq), abs=1e-14)


def test_wigner3j_column_symmetries():
    for l1 in range(5):
        for l2 in range(5):
            for l3 in range(5):
                for m1 in range(-l1, l1 + 1):
                    for m2 in range(-l2, l2 + 1):
                        m3 = -m1 - m2
                        if abs(m3) > l3:
                            continue
                        w = wigner3j(l1, l2, l3, m1, m2, m3)
                        assert wigner3j(l2, l3, l1, m2, m3, m1) == pytest.approx(w, abs=1e-14)
                        swap = (-1) ** (l1 + l2 + l3) * w
                        assert wigner3j(l2, l1, l3, m2, m1, m3) == pytest.approx(swap, abs=1e-14)


def test_small_d_sign_convention():
    beta = 0.7
    d = wigner_small_d(1, beta)
    assert d[2, 1] == pytest.approx(-math.sin(beta) / math.sqrt(2))


def test_identity_and_scalar_sector():
    for l in range(6):
        assert np.allclose(wigner_d_matrix(l, EulerZYZ.identity()), np.eye(2 * l + 1))
    assert np.allclose(wigner_d_matrix(0, EulerZYZ(1.0, 2.0, 3.0)), [[1.0]])


@given(angles)
@settings(max_examples=40, deadline=None)
def test_unitarity(abg):
    euler = EulerZYZ(*abg)
    for l in range(9):
        d = wigner_d_matrix(l, euler)
        assert np.max(np.abs(d @ d.conj().T - np.eye(2 * l + 1))) <= 1e-12


@given(angles, angles)
@settings(max_examples=30, deadline=None)
def test_composition_is_a_representation(a, b):
    ea, eb = EulerZYZ(*a), EulerZYZ(*b)
    prod = EulerZYZ.from_matrix(ea.as_matrix() @ eb.as_matrix())
    for l in range(4):
        lhs = wigner_d_matrix(l, prod)
        rhs = wigner_d_matrix(l, eb) @ wigner_d_matrix(l, ea)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


@given(angles)
@settings(max_examples=60, deadline=None)
def test_euler_matrix_roundtrip(abg):
    euler = EulerZYZ(*abg)
    back = EulerZYZ.from_matrix(euler.as_matrix())
    assert np.allclose(back.as_matrix(), euler.as_matrix(), atol=1e-12)
    assert np.allclose(euler.inverse().as_matrix(), euler.as_matrix().T, atol=1e-12)


def test_euler_validation_and_canonical_range():
    with pytest.raises(ValueError):
        EulerZYZ(0.0, 4.0, 0.0)
    e = EulerZYZ.canonical(-1.0, 0.5, 7.0)
    assert 0 <= e.alpha < 2 * math.pi and 0 <= e.gamma < 2 * math.pi
