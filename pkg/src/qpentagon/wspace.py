"""Finite sums of polynomial-times-Gaussian functions.

A term is ``exp(-a x^2/2 + b x) P(x)`` with a > 0 real, b complex and P a
polynomial with complex coefficients (stored in ascending order).  The
space is closed under complex shifts of the argument and multiplication by
exponentials, so the modular-double operators act on it in closed form:

    X f(x) = f(x + 2 pi i h)      Y f(x) = e^x f(x)
    Xv f(x) = f(x + 2 pi i)       Yv f(x) = e^{x/h} f(x)

Inner products are evaluated from Gaussian moments, so everything except
the final floating point rounding is exact.
"""

import cmath
import json
import math
from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np
from numpy.polynomial import polynomial as npoly

from .qtorus import QT2Element, ModularDoubleElement

__all__ = [
    "GaussianTerm",
    "WVector",
    "TorusOperatorWord",
    "gaussian",
    "hermite_gaussian",
    "shift",
    "mul_exp",
    "op_X",
    "op_Y",
    "op_Xvee",
    "op_Yvee",
    "inner_product",
    "norm",
    "apply_word",
    "apply_element",
    "seminorm",
    "evaluate",
    "gram_matrix",
    "monomial_words",
]

MERGE_TOL = 1e-12


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class GaussianTerm:
    a: float
    b: complex
    coeffs: tuple

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"Gaussian width must be positive, got {self.a}")
        if not any(self.coeffs):
            raise ValueError("polynomial part is zero")

    @property
    def poly(self):
        return np.asarray(self.coeffs, dtype=complex)

    def key(self):
        return (self.a, self.b.real, self.b.imag)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return np.exp(-0.5 * self.a * x * x + self.b * x) * npoly.polyval(x, self.poly)


def _close(s, t):
    scale = max(1.0, abs(s.a), abs(s.b))
    return abs(s.a - t.a) <= MERGE_TOL * scale and abs(s.b - t.b) <= MERGE_TOL * scale


class WVector:
    """Canonical finite sum of GaussianTerms.

    Terms whose (a, b) agree to ``MERGE_TOL`` relative accuracy are merged;
    the result is sorted by (a, Re b, Im b).  Empty means zero.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=()):
        groups = []
        for t in terms:
            for g in groups:
                if _close(g[0], t):
                    g.append(t)
                    break
            else:
                groups.append([t])
        merged = []
        for g in groups:
            width = max(len(t.coeffs) for t in g)
            acc = np.zeros(width, dtype=complex)
            for t in g:
                acc[: len(t.coeffs)] += t.poly
            acc = _trim(acc)
            if acc.size:
                merged.append(GaussianTerm(g[0].a, g[0].b, tuple(acc)))
        merged.sort(key=GaussianTerm.key)
        self.terms = tuple(merged)

    @classmethod
    def zero(cls):
        return cls()

    def __add__(self, other):
        return WVector(self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = complex(c)
        if c == 0:
            return WVector()
        return WVector(GaussianTerm(t.a, t.b, tuple(c * t.poly)) for t in self.terms)

    __mul__ = scale
    __rmul__ = scale

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __call__(self, x):
        return evaluate(self, x)

    def __repr__(self):
        parts = [f"({t.a:g}, {t.b:g}, {list(t.coeffs)})" for t in self.terms]
        return "WVector[" + ", ".join(parts) + "]"

    def allclose(self, other, rtol=1e-12):
        """Term-by-term comparison, relative to the larger coefficient."""
        diff = self - other
        scale = max([np.abs(t.poly).max() for t in self.terms + other.terms] or [0.0])
        worst = max([np.abs(t.poly).max() for t in diff.terms] or [0.0])
        return worst <= rtol * max(scale, 1e-300)

    def to_json(self):
        return json.dumps([
            {"a": t.a, "b_re": t.b.real, "b_im": t.b.imag,
             "coeffs": [[c.real, c.imag] for c in t.coeffs]}
            for t in self.terms
        ])

    @classmethod
    def from_json(cls, text):
        return cls(
            GaussianTerm(float(d["a"]), complex(d["b_re"], d["b_im"]),
                         tuple(complex(re, im) for re, im in d["coeffs"]))
            for d in json.loads(text)
        )


def gaussian(a=1.0, b=0.0, coeffs=(1.0,)):
    return WVector([GaussianTerm(float(a), complex(b), tuple(complex(c) for c in coeffs))])


def hermite_gaussian(n, a=1.0, b=0.0):
    """Physicists' Hermite polynomial H_n(x) times exp(-a x^2/2 + b x)."""
    herm = np.polynomial.hermite.herm2poly([0] * n + [1])
    return gaussian(a, b, herm)


def _taylor_shift(coeffs, lam):
    # coefficients of P(x + lam)
    n = len(coeffs)
    out = np.zeros(n, dtype=complex)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        for k in range(j + 1):
            out[k] += c * math.comb(j, k) * lam ** (j - k)
    return out


def shift(v, lam):
    """f(x) -> f(x + lam) for complex lam."""
    lam = complex(lam)
    out = []
    for t in v.terms:
        pref = cmath.exp(-0.5 * t.a * lam * lam + t.b * lam)
        coeffs = _trim(pref * _taylor_shift(t.poly, lam))
        if coeffs.size:
            out.append(GaussianTerm(t.a, t.b - t.a * lam, tuple(coeffs)))
    return WVector(out)


def mul_exp(v, mu):
    """f(x) -> e^{mu x} f(x)."""
    mu = complex(mu)
    return WVector(GaussianTerm(t.a, t.b + mu, t.coeffs) for t in v.terms)


def op_X(v, hbar, power=1):
    return shift(v, 2j * math.pi * hbar * power)


def op_Y(v, power=1):
    return mul_exp(v, power)


def op_Xvee(v, power=1):
    return shift(v, 2j * math.pi * power)


def op_Yvee(v, hbar, power=1):
    return mul_exp(v, power / hbar)


def _moments(alpha, beta, n_max):
    mu = beta / (2 * alpha)
    var = 1 / (2 * alpha)
    base = cmath.sqrt(math.pi / alpha) * cmath.exp(beta * beta / (4 * alpha))
    m = [1.0 + 0j, mu]
    for n in range(2, n_max + 1):
        m.append(mu * m[n - 1] + (n - 1) * var * m[n - 2])
    return base * np.asarray(m[: n_max + 1])


def inner_product(u, w):
    """Integral of u(x) * conj(w(x)) over the real line."""
    total = 0j
    for s in u.terms:
        for t in w.terms:
            alpha = 0.5 * (s.a + t.a)
            beta = s.b + t.b.conjugate()
            prod = npoly.polymul(s.poly, np.conj(t.poly))
            mom = _moments(alpha, beta, len(prod) - 1)
            total += complex(np.dot(prod, mom))
    return total


def norm(v):
    return math.sqrt(max(inner_product(v, v).real, 0.0))


@dataclass(frozen=True)
class TorusOperatorWord:
    """Operator product of factors ``(name, exponent)``.

    Names are "X", "Y", "Xv", "Yv" and "scalar"; for "scalar" the second
    entry is the complex factor itself.  As with operator composition, the
    rightmost factor acts first.
    """

    factors: tuple = ()

    def __mul__(self, other):
        return TorusOperatorWord(self.factors + other.factors)


def _apply_factor(name, e, v, hbar):
    if name == "X":
        return op_X(v, hbar, e)
    if name == "Y":
        return op_Y(v, e)
    if name == "Xv":
        return op_Xvee(v, e)
    if name == "Yv":
        return op_Yvee(v, hbar, e)
    if name == "scalar":
        return v.scale(e)
    raise ValueError(f"unknown operator {name!r}")


def apply_word(word, v, hbar):
    factors = word.factors if isinstance(word, TorusOperatorWord) else tuple(word)
    for name, e in reversed(factors):
        v = _apply_factor(name, e, v, hbar)
    return v


def _apply_side(u, v, hbar, vee):
    q = cmath.exp(1j * math.pi / hbar) if vee else cmath.exp(1j * math.pi * hbar)
    out = WVector()
    for (m, n), c in u.c.items():
        if vee:
            w = op_Xvee(op_Yvee(v, hbar, n), m)
        else:
            w = op_X(op_Y(v, n), hbar, m)
        out = out + w.scale(c.at(q))
    return out


def apply_element(A, v, hbar):
    """Act by a quantum torus element (q side) or a ModularDoubleElement.

    Normal-ordered X^m Y^n acts as X^m(Y^n v); on the q_vee side the same
    element acts through Xv, Yv with q_vee = e^{i pi/h}.
    """
    if isinstance(A, ModularDoubleElement):
        return _apply_side(A.left, _apply_side(A.right, v, hbar, True), hbar, False)
    if isinstance(A, QT2Element):
        return _apply_side(A, v, hbar, False)
    raise TypeError(f"cannot act by {type(A).__name__}")


def seminorm(B, f, hbar):
    """||B f|| in L^2."""
    return norm(apply_element(B, f, hbar))


def evaluate(v, points):
    x = np.asarray(points, dtype=complex)
    out = np.zeros(x.shape, dtype=complex)
    for t in v.terms:
        out += t(x)
    return out


def monomial_words(max_len, sides=("q",)):
    """Exponent tuples (a, b, c, d) for X^a Y^b Xv^c Yv^d with sum |.| <= max_len."""
    use_q = "q" in sides
    use_v = "vee" in sides
    rng = range(-max_len, max_len + 1)
    out = []
    for a, b, c, d in iproduct(rng, rng, rng, rng):
        if not use_q and (a or b):
            continue
        if not use_v and (c or d):
            continue
        if abs(a) + abs(b) + abs(c) + abs(d) <= max_len:
            out.append((a, b, c, d))
    return out


def gram_matrix(vectors):
    n = len(vectors)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = inner_product(vectors[i], vectors[j])
            G[j, i] = G[i, j].conjugate()
    return G
