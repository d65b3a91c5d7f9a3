import json
import math

import numpy as np
import pytest

from sgltrans import oracle
from sgltrans.sgl import SglIndex, eval_basis_cartesian, radial, weighted_bessel_closed
from sgltrans.translate import a_coeff
from sgltrans.wigner import EulerZYZ, wigner_d_matrix


def test_inner_product_examples():
    h100 = lambda x: eval_basis_cartesian(SglIndex(1, 0, 0), x)
    assert oracle.inner_product_h(h100, h100, 2) == pytest.approx(1.0, abs=1e-14)
    a = lambda x: eval_basis_cartesian(SglIndex(2, 1, 1), x)
    b = lambda x: eval_basis_cartesian(SglIndex(2, 1, 0), x)
    assert abs(oracle.inner_product_h(a, b, 3)) <= 1e-15
    one = lambda x: np.ones(len(x))
    assert oracle.inner_product_h(one, one, 1) == pytest.approx(math.pi ** 1.5, rel=1e-14)


def test_t_element_numeric_examples():
    assert oracle.t_element_numeric(1, 1, 0, 0, 0, 0, 0.7) == pytest.approx(1.0, abs=1e-14)
    assert oracle.t_element_numeric(2, 1, 0, 0, 0, 0, 1.0).real == pytest.approx(
        -math.sqrt(2 / 3), rel=1e-13)
    assert abs(oracle.t_element_numeric(2, 2, 1, 1, 1, 0, 0.7)) <= 1e-15


def test_batch_and_single_element_oracles_agree():
    batch = oracle.translation_matrix_numeric(3, 0.8)
    idx = [SglIndex(n, l, m) for n in range(1, 4) for l in range(n) for m in range(-l, l + 1)]
    for a in (0, 3, 7, 13):
        for b in (1, 5, 9):
            i, j = idx[a], idx[b]
            single = oracle.t_element_numeric(i.n, j.n, i.l, j.l, i.m, j.m, 0.8)
            assert abs(batch[a, b] - single) <= 1e-13


def test_rotation_oracle_examples():
    assert oracle.rotation_element_numeric(2, 1, 0, 2, 1, 0, EulerZYZ()) == pytest.approx(1.0)
    euler = EulerZYZ(0.3, 1.9, 4.0)
    assert oracle.rotation_element_numeric(3, 0, 0, 3, 0, 0, euler) == pytest.approx(1.0)
    assert abs(oracle.rotation_element_numeric(3, 0, 0, 2, 0, 0, euler)) <= 1e-14
    d = wigner_d_matrix(2, euler)
    for m in range(-2, 3):
        for m_p in range(-2, 3):
            val = oracle.rotation_element_numeric(3, 2, m, 3, 2, m_p, euler)
            assert abs(val - d[m + 2, m_p + 2]) <= 1e-10


def test_bessel_numeric_examples():
    for beta in (0.3, 1.7):
        assert oracle.bessel_transform_numeric(1, 0, 1.0, beta) == pytest.approx(
            weighted_bessel_closed(1, 0, 1.0, beta), abs=1e-9)
    assert oracle.bessel_transform_numeric(3, 1, 0.5, 2.0) == pytest.approx(
        weighted_bessel_closed(3, 1, 0.5, 2.0), abs=1e-8)
    assert oracle.inversion_numeric(2, 1, 0.5, 1.0) == pytest.approx(radial(2, 1, 1.0),
                                                                     abs=1e-6)


def test_bessel_numeric_sample_for_gamma_half():
    for n in range(1, 5):
        for l in range(n):
            for beta in (0.5, 2.5):
                assert oracle.bessel_transform_numeric(n, l, 0.5, beta) == pytest.approx(
                    weighted_bessel_closed(n, l, 0.5, beta), abs=1e-9)


def test_d_pq_examples():
    # n - l - 1 = 0 keeps the j = 0 term only
    from sgltrans.specfun import gamma_half, hyp2f1_finite, pochhammer
    n, n_p, l, l_p, k, p, q = 3, 2, 2, 1, 1, 0, 0
    mu = 2 + (2 - 1 + 1) // 2
    expected = float(gamma_half(mu)) * pochhammer(-mu + k + 1, p) * hyp2f1_finite(0, q, p)
    assert oracle.d_pq(n, n_p, l, l_p, k, p, q) == pytest.approx(expected, rel=1e-14)
    assert oracle.d_pq_exact(2, 1, 0, 0, 0, 0, 0) == 0
    assert float(oracle.d_pq_exact(2, 1, 0, 0, 0, 1, 0)) * math.sqrt(math.pi) == pytest.approx(
        oracle.d_pq(2, 1, 0, 0, 0, 1, 0), rel=1e-14)
    with pytest.raises(ValueError):
        oracle.d_pq(2, 1, 0, 1, 0, 0, 0)


def test_addition_theorem_examples():
    assert oracle.addition_theorem_residual(0, 0, 1.0, 1e-8, (0.8, 1.0, 0.4), 4) <= 1e-7
    res = [oracle.addition_theorem_residual(2, 1, 1.3, 0.6, (1.1, 0.9, 2.0), lm)
           for lm in (4, 8, 16)]
    assert res[2] <= res[1] <= res[0]
    with pytest.raises(ValueError):
        oracle.addition_theorem_residual(0, 0, 1.0, 0.5, (0.0, 0.0, 0.0), 4)
    with pytest.raises(ValueError):
        oracle.addition_theorem_residual(3, 0, 1.0, 0.5, (1.0, 1.0, 0.0), 2)


def test_odd_parity_terms_vanish_in_expansion():
    for l in range(4):
        for l_p in range(6):
            for k in range(abs(l - l_p), l + l_p + 1):
                if (l - l_p + k) % 2:
                    assert a_coeff(l, l_p, 0, k) == 0.0


def test_report_pass_rule_and_json():
    r = oracle.OracleReport.compare("x", 1.0 + 1e-9, 1.0, rel_tol=1e-8)
    assert r.passed
    r = oracle.OracleReport.compare("y", 1e-13, 0.0, rel_tol=1e-8, abs_floor=1e-12)
    assert r.passed and r.rel_err == math.inf
    d = json.loads(r.to_json())
    assert d["rel_err"] is None and d["passed"] is True
    c = oracle.OracleReport.compare("z", 1 + 1j, 1 + 1j, rel_tol=0.0)
    assert json.loads(c.to_json())["closed_form"] == {"re": 1.0, "im": 1.0}


def test_oracles_are_deterministic():
    a = oracle.translation_matrix_numeric(3, 1.1)
    b = oracle.translation_matrix_numeric(3, 1.1)
    assert np.array_equal(a, b)
    assert oracle.bessel_transform_numeric(2, 1, 0.7, 1.2) == oracle.bessel_transform_numeric(
        2, 1, 0.7, 1.2)


@pytest.mark.parametrize("name", sorted(oracle.SUITES))
def test_suites_pass_and_canary_fails(name):
    reports = oracle.run_suites([name])
    assert reports and all(r.passed for r in reports)
    canary = oracle.run_suites([name], canary=True)
    assert any(not r.passed for r in canary)


def test_unknown_suite():
    with pytest.raises(KeyError):
        oracle.run_suites(["nope"])
