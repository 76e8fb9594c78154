import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpentagon.cluster import box, canonical_IA, multiply_in_basis_classical, tropical_gamma
from qpentagon.errors import EvenN, NonMember
from qpentagon.qtorus import (
    ModularDoubleElement,
    QLaurent,
    QT2Element,
    apply_gamma_q,
    canonical_IAq,
    clock_shift_generators,
    clock_shift_model,
    dump_element,
    from_json,
    gamma_power,
    membership_Lq_prime,
    multiply_in_basis_q,
    specialize_q1,
    star,
    termwise_symmetrization,
    to_json,
)

Q = QT2Element
points = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


def q(k):
    return QLaurent.qpow(k)


def test_qlaurent_arithmetic():
    a = QLaurent({1: 2, -1: 1})
    assert a.bar() == QLaurent({-1: 2, 1: 1})
    assert (a * a.bar()).at_one() == 9
    assert a.shift(2) == QLaurent({3: 2, 1: 1})
    assert a.is_nonnegative() and not (a - a.bar() * 3).is_nonnegative()


def test_normal_ordering():
    # Y X = q^-2 X Y
    assert Q.Y() * Q.X() == Q.monomial(1, 1, -2)
    assert Q.M(1, 0) * Q.M(0, 1) == Q.monomial(1, 1, 0)
    assert Q.M(1, 1) == Q.monomial(1, 1, -1)


def test_gamma_of_Y():
    # (1 + qY) X = X + q^-1 X Y
    expected = Q({(1, 0): QLaurent.const(), (1, 1): q(-1)})
    assert apply_gamma_q(Q.Y()) == expected


def test_membership_examples():
    assert membership_Lq_prime(Q.X(3) * Q.Y(2)) is not None
    with pytest.raises(NonMember) as err:
        membership_Lq_prime(Q.X() * Q.Y(-1))
    assert err.value.y_degree == -1
    # X^a Y^-1 (1 + q X^-1) is in the second family with quotient X^a
    u = Q.X(2) * Q.Y(-1) * (Q.one() + Q({(-1, 0): q(1)}))
    dec = membership_Lq_prime(u)
    assert dec is not None


def test_hand_computed_quantum_elements():
    assert canonical_IAq((0, -1)) == Q({(0, -1): QLaurent.const(), (-1, -1): q(-1)})
    assert canonical_IAq((1, 0)) == Q({(1, 0): QLaurent.const(), (1, -1): q(1), (0, -1): QLaurent.const()})
    assert canonical_IAq((-1, 1)) == Q.M(-1, 1)
    assert dump_element(canonical_IAq((0, -1))) == "[(-1, -1, 1 q^-1), (0, -1, 1 q^0)]"


def test_structure_constants_specialize_to_classical():
    for p in box(2):
        for p2 in box(2):
            sc = multiply_in_basis_q(p, p2)
            cl = multiply_in_basis_classical(p, p2)
            assert {k: v.at_one() for k, v in sc.items() if v.at_one()} == cl


def test_structure_constants_reverse_under_bar():
    # star reverses products, so swapping factors inverts q in the constants
    assert multiply_in_basis_q((1, 0), (0, 1)) == {(1, 1): q(1), (0, 0): QLaurent.const()}
    for p in box(2):
        for p2 in box(2):
            a = multiply_in_basis_q(p, p2)
            b = multiply_in_basis_q(p2, p)
            assert {k: v.bar() for k, v in a.items()} == b


def test_termwise_symmetrization_differs_somewhere():
    mism = [p for p in box(4) if termwise_symmetrization(canonical_IA(p)) != canonical_IAq(p)]
    assert (2, 0) in mism and (0, 0) not in mism


def test_json_round_trip():
    u = canonical_IAq((2, -1))
    assert from_json(to_json(u)) == u


def test_modular_double_default():
    m = ModularDoubleElement()
    assert m.left == Q.one() and m.right == Q.one()


def test_clock_shift_rejects_bad_sizes():
    with pytest.raises(EvenN):
        clock_shift_generators(4)
    with pytest.raises(ValueError):
        clock_shift_generators(5, k=5)


@pytest.mark.parametrize("N", [5, 7, 9])
def test_clock_shift_relations(N):
    qv, X, Y = clock_shift_generators(N, 2.0, 3.0)
    assert np.abs(X @ Y - qv * qv * Y @ X).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(X, N) - 2 * np.eye(N)).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(Y, N) - 3 * np.eye(N)).max() < 1e-12
    u, v = canonical_IAq((1, -1)), canonical_IAq((2, 1))
    lhs = clock_shift_model(u * v, N, 2.0, 3.0)
    rhs = clock_shift_model(u, N, 2.0, 3.0) @ clock_shift_model(v, N, 2.0, 3.0)
    assert np.abs(lhs - rhs).max() < 1e-12 * max(1, np.abs(rhs).max())


def test_clock_shift_example_five():
    # shift Y e_j = e_{j+1}, clock X = diag(q^{2j}): X Y = q^2 Y X
    qv, X, Y = clock_shift_generators(5)
    assert abs(qv - cmath.exp(2j * math.pi / 5)) < 1e-15
    e0 = np.eye(5)[:, 0]
    assert np.allclose(Y @ e0, np.eye(5)[:, 1])


@settings(max_examples=60, deadline=None)
@given(points)
def test_basis_properties(p):
    I = canonical_IAq(p)
    assert star(I) == I
    assert specialize_q1(I) == canonical_IA(p)
    assert apply_gamma_q(canonical_IAq(tropical_gamma(p))) == I
    assert gamma_power(I, 5) == I
    u = I
    for _ in range(5):
        assert all(c.is_nonnegative() for c in u.c.values())
        u = apply_gamma_q(u)


@settings(max_examples=60, deadline=None)
@given(points, points)
def test_star_is_antimultiplicative(p, p2):
    u, v = canonical_IAq(p), canonical_IAq(p2)
    assert star(u * v) == star(v) * star(u)


@settings(max_examples=30, deadline=None)
@given(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_structure_constants_reconstruct_product(p, p2):
    sc = multiply_in_basis_q(p, p2)
    total = Q()
    for r, c in sc.items():
        total = total + canonical_IAq(r) * Q({(0, 0): c})
    assert total == canonical_IAq(p) * canonical_IAq(p2)
