import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpentagon.errors import BranchCut, DivergentProduct, PoleHit, StripViolation
from qpentagon.specfun import (
    PhiParams,
    QuadratureConfig,
    asymptotic_residual,
    difference_residuals,
    dilog_L2,
    duality_residual,
    log_phi,
    log_phi_at_zero,
    phi_integral,
    phi_many,
    phi_product,
    pole_location,
    psi_q,
    zero_location,
)

FAST = settings(max_examples=25, deadline=None)


def test_params_derive_q_from_hbar():
    p = PhiParams(0.7)
    assert p.q == pytest.approx(cmath.exp(1j * math.pi * 0.7))
    assert p.q_vee == pytest.approx(cmath.exp(1j * math.pi / 0.7))
    with pytest.raises(ValueError):
        PhiParams(-1.0)
    with pytest.raises(ValueError):
        PhiParams(0.5 - 0.1j)


def test_unit_modulus_at_real_point():
    assert abs(abs(phi_integral(0.3, 0.8)) - 1) < 1e-10


def test_difference_relation_example():
    h = 0.8
    z = 0.3 - 1j * math.pi * h
    ratio = phi_integral(z + 2j * math.pi * h, h) / phi_integral(z, h)
    assert abs(ratio - (1 + cmath.exp(1j * math.pi * h) * cmath.exp(z))) < 1e-9


def test_value_at_zero_regression():
    oracle_cfg = QuadratureConfig(truncation=80.0, rel_tol=1e-15)
    v0 = phi_integral(0, 1.0)
    assert abs(abs(v0) - 1) < 1e-14
    assert abs(v0 - phi_integral(0, 1.0, oracle_cfg)) < 1e-13
    # residue of the integrand at p = 0
    assert abs(v0 - cmath.exp(log_phi_at_zero(1.0))) < 1e-13
    assert abs(v0 - cmath.exp(-1j * math.pi / 12)) < 1e-13


def test_strip_violation():
    with pytest.raises(StripViolation):
        phi_integral(1j * math.pi * 2.0, 1.0)


def test_psi_examples():
    assert psi_q(0, 0.5) == 1
    q, x = 0.5, 0.3
    assert abs(psi_q(q * q * x, q) - (1 + q * x) * psi_q(x, q)) < 1e-12
    with pytest.raises(DivergentProduct):
        psi_q(0.3, 1.0)
    with pytest.raises(PoleHit):
        psi_q(-1 / 0.5, 0.5)


def test_product_matches_integral_example():
    p = PhiParams(0.8 + 0.3j)
    assert abs(phi_product(0.2, p) - phi_integral(0.2, p)) < 1e-8


def test_product_difference_relation():
    p = PhiParams(0.8 + 0.3j)
    z = 0.2 - 0.5j
    lhs = phi_product(z, p) * (1 + p.q * cmath.exp(z))
    assert abs(lhs - phi_product(z + 2j * math.pi * p.hbar, p)) < 1e-10


def test_product_limit_at_minus_infinity():
    assert abs(phi_product(-60, PhiParams(0.8 + 0.3j)) - 1) < 1e-12


def test_dilog_values():
    assert dilog_L2(0) == 0
    assert abs(dilog_L2(1) - math.pi ** 2 / 12) < 1e-12
    assert abs(dilog_L2(0.5, method="series") - dilog_L2(0.5, method="quad")) < 1e-12
    with pytest.raises(BranchCut):
        dilog_L2(-2)


def test_asymptotics_decrease_with_bounded_ratio():
    r = asymptotic_residual(0.3, [0.1, 0.05, 0.025])
    assert r[0] > r[1] > r[2]
    ratios = [r[0] / r[1], r[1] / r[2]]
    # an O(hbar) correction halves (or better) with each halving of hbar
    assert all(1.5 < x < 5 for x in ratios)


def test_log_phi_vanishes_far_left():
    assert abs(log_phi(-40, 0.5)) < 1e-12
    assert abs(dilog_L2(math.exp(-40))) < 1e-12


def test_zero_and_pole_locations():
    h = 0.7
    assert zero_location(1, 1, h) == pytest.approx(1j * math.pi * (1 + h))
    assert pole_location(1, 1, h) == -zero_location(1, 1, h)
    with pytest.raises(ValueError):
        zero_location(0, 1, h)


def test_first_zero_has_winding_number_one():
    # the zero sits on the edge of the strip; continue Phi one step with
    # Phi(z) = (1 + q e^{z - 2 pi i h}) Phi(z - 2 pi i h)
    h = 0.7
    q = cmath.exp(1j * math.pi * h)
    z0 = zero_location(1, 1, h)
    theta = np.linspace(0, 2 * math.pi, 257)
    z = z0 + 0.3 * np.exp(1j * theta)
    w = z - 2j * math.pi * h
    vals = phi_many(w, h) * (1 + q * np.exp(w))
    winding = np.sum(np.diff(np.unwrap(np.angle(vals)))) / (2 * math.pi)
    assert round(winding) == 1
    assert abs(winding - 1) < 1e-6


def test_duality_examples():
    assert duality_residual(0.7, 1.0) == 0
    assert duality_residual(0.4, 0.6) < 1e-9
    assert duality_residual(0, 2.5) < 1e-9


@FAST
@given(st.floats(-5, 5), st.sampled_from([0.3, 1.0, 2.7]))
def test_unit_modulus_property(x, h):
    assert abs(abs(phi_integral(x, h)) - 1) < 1e-10


@FAST
@given(st.floats(-5, 5), st.floats(0.2, 3.0))
def test_difference_relations_property(x, h):
    r1, r2 = difference_residuals(np.array([x]), h)
    assert r1.max() < 1e-9 and r2.max() < 1e-9


@FAST
@given(st.floats(-3, 3), st.floats(-1.5, 1.5))
def test_integral_matches_product_property(x, y):
    p = PhiParams(0.8 + 0.3j)
    z = complex(x, y)
    b = phi_product(z, p)
    assert abs(phi_integral(z, p) - b) < 1e-8 * abs(b)


@FAST
@given(st.floats(-3, 3), st.floats(-1.0, 1.0), st.floats(0.3, 3.0))
def test_duality_property(x, y, h):
    z = complex(x, y)
    assert duality_residual(z, h) < 1e-9 * abs(phi_integral(z, h))


@FAST
@given(st.floats(-4, 4), st.floats(-1, 1))
def test_conjugation_symmetry(x, y):
    # the integrand is real-symmetric: conj Phi(z) = 1 / Phi(conj z) for real hbar
    z = complex(x, y)
    assert abs(phi_integral(z, 0.9).conjugate() * phi_integral(z.conjugate(), 0.9) - 1) < 1e-10
