import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from qpentagon.qtorus import ModularDoubleElement, QT2Element
from qpentagon.wspace import (
    GaussianTerm,
    TorusOperatorWord,
    WVector,
    apply_element,
    apply_word,
    evaluate,
    gaussian,
    gram_matrix,
    hermite_gaussian,
    inner_product,
    monomial_words,
    norm,
    op_X,
    op_Xvee,
    op_Y,
    op_Yvee,
    seminorm,
    shift,
)

H = 0.7
Q = cmath.exp(1j * math.pi * H)
QV = cmath.exp(1j * math.pi / H)
FAST = settings(max_examples=20, deadline=None)


@st.composite
def wvectors(draw):
    terms = []
    for _ in range(draw(st.integers(1, 2))):
        a = draw(st.floats(0.5, 2.0))
        b = complex(draw(st.floats(-1, 1)), draw(st.floats(-1, 1)))
        deg = draw(st.integers(0, 2))
        coeffs = [complex(draw(st.floats(-1, 1)), draw(st.floats(-1, 1))) for _ in range(deg + 1)]
        coeffs[-1] += 2
        terms.append(GaussianTerm(a, b, tuple(coeffs)))
    return WVector(terms)


def close(u, v, rtol=1e-10):
    diff = norm(u - v)
    return diff <= rtol * max(norm(u), norm(v), 1e-300)


def test_term_invariants():
    with pytest.raises(ValueError):
        GaussianTerm(0.0, 0j, (1,))
    with pytest.raises(ValueError):
        GaussianTerm(1.0, 0j, (0, 0))


def test_canonical_form_merges_and_drops():
    v = gaussian(1, 0, (1, 2)) + gaussian(1, 0, (-1, -2))
    assert len(v) == 0 and not v
    w = gaussian(2, 1) + gaussian(1, 0) + gaussian(1, 0)
    assert [t.a for t in w.terms] == [1.0, 2.0]
    assert w.terms[0].coeffs[0] == 2


def test_op_Y_example():
    v = op_Y(gaussian())
    assert v.terms[0].b == 1 and v.terms[0].a == 1


def test_op_X_example():
    v = op_X(gaussian(), H)
    t = v.terms[0]
    assert t.a == 1
    assert t.b == pytest.approx(-2j * math.pi * H)
    assert t.coeffs[0] == pytest.approx(math.exp(2 * math.pi ** 2 * H ** 2))


def test_weyl_relation_example():
    v = gaussian()
    assert close(op_X(op_Y(v), H), op_Y(op_X(v, H)).scale(Q * Q))


def test_inner_product_examples():
    g = gaussian()
    assert inner_product(g, g) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert abs(inner_product(gaussian(1, 0, (0, 1)), g)) < 1e-16
    u, w = g, gaussian(1, 1, (0, 1))
    assert inner_product(op_X(u, H), w) == pytest.approx(inner_product(u, op_X(w, H)), rel=1e-12)


def test_inner_product_against_quadrature():
    u = gaussian(0.8, 0.3 + 0.2j, (1, -0.5j, 0.25))
    w = gaussian(1.3, -0.4 + 0.1j, (0.5, 1))
    f = lambda x: (u(x) * np.conj(w(x)))
    re = integrate.quad(lambda x: f(x).real, -np.inf, np.inf, epsabs=1e-13)[0]
    im = integrate.quad(lambda x: f(x).imag, -np.inf, np.inf, epsabs=1e-13)[0]
    assert inner_product(u, w) == pytest.approx(complex(re, im), rel=1e-10)


def test_words():
    v = gaussian()
    assert close(apply_word(TorusOperatorWord(), v, H), v)
    xy = apply_word(TorusOperatorWord((("X", 1), ("Y", 1))), v, H)
    yx = apply_word(TorusOperatorWord((("Y", 1), ("X", 1))), v, H)
    assert close(xy, yx.scale(Q * Q))
    comm = apply_word([("X", 1), ("Yv", 1)], v, H) - apply_word([("Yv", 1), ("X", 1)], v, H)
    assert norm(comm) <= 1e-12 * norm(apply_word([("X", 1), ("Yv", 1)], v, H))


def test_word_product_is_composition():
    v = gaussian(0.9, 0.2)
    a = TorusOperatorWord((("X", 1),))
    b = TorusOperatorWord((("Y", -2), ("scalar", 3.0)))
    assert close(apply_word(a * b, v, H), apply_word(a, apply_word(b, v, H), H))


def test_seminorm_examples():
    g = gaussian()
    assert seminorm(QT2Element.one(), g, H) == pytest.approx(math.pi ** 0.25, rel=1e-15)
    direct = norm(gaussian(1, 1))
    assert seminorm(QT2Element.Y(), g, H) == pytest.approx(direct, rel=1e-15)
    assert seminorm(QT2Element.X(), WVector(), H) == 0


def test_apply_modular_double_element():
    g = gaussian(1.2, 0.1)
    A = ModularDoubleElement(QT2Element.X(), QT2Element.Y())
    direct = op_X(op_Yvee(g, H), H)
    assert close(apply_element(A, g, H), direct)


def test_evaluate_examples():
    g = gaussian()
    assert evaluate(g, [0])[0] == 1
    v = gaussian(0.8, 0.2, (1, 2))
    assert evaluate(op_X(v, H), [1])[0] == pytest.approx(evaluate(v, [1 + 2j * math.pi * H])[0], rel=1e-12)
    w = gaussian(1.5, -0.3)
    x = np.linspace(-2, 2, 7)
    assert np.allclose(evaluate(v + w, x), evaluate(v, x) + evaluate(w, x), rtol=1e-14)


def test_hermite_gaussian_orthogonality():
    G = gram_matrix([hermite_gaussian(n) for n in range(5)])
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() < 1e-10 * np.abs(G).max()


def test_json_round_trip():
    v = gaussian(0.8, 0.3 - 0.2j, (1, 2j)) + gaussian(1.1)
    assert WVector.from_json(v.to_json()).allclose(v, rtol=0)


def _rank(vectors):
    # unit-normalise first: the norms span dozens of orders of magnitude
    G = gram_matrix(vectors)
    d = np.sqrt(np.diag(G).real)
    s = np.linalg.svd(G / np.outer(d, d), compute_uv=False)
    return int(np.sum(s > 1e-12 * s[0]))


@pytest.mark.parametrize("side", ["q", "vee"])
def test_small_words_are_independent(side):
    g = gaussian()
    words = monomial_words(3, sides=(side,))
    vecs = []
    for a, b, c, d in words:
        vecs.append(apply_word([("X", a), ("Y", b), ("Xv", c), ("Yv", d)], g, H))
    assert _rank(vecs) == len(vecs)


@FAST
@given(wvectors())
def test_weyl_relations_property(v):
    assert close(op_X(op_Y(v), H), op_Y(op_X(v, H)).scale(Q * Q))
    assert close(op_Xvee(op_Yvee(v, H)), op_Yvee(op_Xvee(v), H).scale(QV * QV))


@FAST
@given(wvectors())
def test_cross_commutation_property(v):
    q_side = [lambda u: op_X(u, H), op_Y]
    v_side = [op_Xvee, lambda u: op_Yvee(u, H)]
    for A in q_side:
        for B in v_side:
            assert close(A(B(v)), B(A(v)))


@FAST
@given(wvectors(), wvectors())
def test_symmetry_property(u, w):
    ops = [lambda f: op_X(f, H), op_Y, op_Xvee, lambda f: op_Yvee(f, H)]
    for A in ops:
        lhs, rhs = inner_product(A(u), w), inner_product(u, A(w))
        assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), norm(A(u)) * norm(w), 1e-300)


@FAST
@given(wvectors(), st.floats(-2, 2), st.floats(-2, 2))
def test_closure_round_trip_property(v, re, im):
    lam = complex(re, im)
    back = shift(shift(v, lam), -lam)
    assert back.allclose(v, rtol=1e-9)
    assert WVector(v.terms).allclose(v, rtol=0)
