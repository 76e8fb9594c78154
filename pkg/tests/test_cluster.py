from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qpentagon.cluster import (
    LaurentPoly2,
    box,
    canonical_IA,
    canonical_IA_row,
    cone_of,
    dump_basis_element,
    equivariance_check,
    gamma_A_point,
    gamma_X_point,
    leading_monomial_check,
    multiply_in_basis_classical,
    overlap_check,
    positivity_check,
    pullback_gamma_X,
    tropical_gamma,
    tropical_gamma_inv,
)
from qpentagon.errors import DegeneratePoint

X, Y = LaurentPoly2.X(), LaurentPoly2.Y()
points = st.tuples(st.integers(-8, 8), st.integers(-8, 8))
positive = st.fractions(min_value=Fraction(1, 50), max_value=50)


def test_tropical_examples():
    assert tropical_gamma((0, 0)) == (0, 0)
    assert tropical_gamma((-1, 2)) == (-2, -1)


def test_tropical_gamma_has_order_five_exhaustively():
    for p in box(50):
        q = p
        for _ in range(5):
            q = tropical_gamma(q)
        assert q == p
        assert tropical_gamma_inv(tropical_gamma(p)) == p


def test_cone_examples():
    assert cone_of((-1, 2)) == {1}
    assert cone_of((0, 0)) == {1, 2, 3, 4, 5}
    assert cone_of((2, 2)) == {4, 5}


def test_point_maps():
    with pytest.raises(DegeneratePoint):
        gamma_X_point(1, 0)
    with pytest.raises(DegeneratePoint):
        gamma_A_point(1, 0)
    p = (Fraction(2, 3), Fraction(5, 7))
    q = p
    for _ in range(5):
        q = gamma_A_point(*q)
    assert q == p


def test_hand_computed_elements():
    assert canonical_IA((-1, 1)) == X ** -1 * Y
    # (1 + X) / (X Y)
    assert canonical_IA((0, -1)) == LaurentPoly2({(-1, -1): 1, (0, -1): 1})
    # X + X Y^-1 + Y^-1
    assert canonical_IA((1, 0)) == LaurentPoly2({(1, 0): 1, (1, -1): 1, (0, -1): 1})
    assert dump_basis_element((1, 0)) == "1 0 : [(0, -1, 1), (1, -1, 1), (1, 0, 1)]"


def test_pullback_denominator_is_power_of_one_plus_y():
    # Y^-1 -> ((1 + Y) X)^-1 leaves a genuine (1 + Y) denominator
    f = pullback_gamma_X(Y ** -1)
    assert f.as_laurent() is None
    x, y = Fraction(3, 5), Fraction(7, 2)
    assert f.evaluate(x, y) == 1 / ((1 + y) * x)


def test_overlapping_rows_agree_on_boundaries():
    for p in box(20):
        if len(cone_of(p)) > 1:
            assert overlap_check(p)


def test_multiplication_examples():
    assert multiply_in_basis_classical((1, 0), (0, 1)) == {(1, 1): 1, (0, 0): 1}
    assert multiply_in_basis_classical((-1, 1), (0, 0)) == {(-1, 1): 1}


@settings(max_examples=60, deadline=None)
@given(points)
def test_equivariance_positivity_leading_property(p):
    assert equivariance_check(p)
    assert positivity_check(p)
    assert leading_monomial_check(p)


@settings(max_examples=60, deadline=None)
@given(positive, positive)
def test_point_map_order_five_property(x, y):
    p = (x, y)
    for _ in range(5):
        p = gamma_X_point(*p)
    assert p == (x, y)


@settings(max_examples=60, deadline=None)
@given(points)
def test_cone_rows_reproduce_element(p):
    for row in cone_of(p):
        assert canonical_IA_row(p, row) == canonical_IA(p)


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), st.tuples(st.integers(-5, 5), st.integers(-5, 5)))
def test_multiplication_closes_property(p, p2):
    sc = multiply_in_basis_classical(p, p2)
    total = LaurentPoly2()
    for r, c in sc.items():
        total = total + c * canonical_IA(r)
    assert total == canonical_IA(p) * canonical_IA(p2)
    assert sc == multiply_in_basis_classical(p2, p)
