"""Exact two-dimensional quantum torus over Z[q, q^-1].

Elements are stored normal-ordered (every X to the left of every Y), so
``{(m, n): c(q)}`` means ``sum c(q) X^m Y^n``.  The commutation rule
``X Y = q^2 Y X`` gives

    X^a Y^b * X^c Y^d = q^{-2bc} X^{a+c} Y^{b+d}.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cluster import LaurentPoly2, tropical_gamma, cone_of
from .errors import BasisExpansionFailure, EvenN, NonMember

__all__ = [
    "QLaurent",
    "QT2Element",
    "ModularDoubleElement",
    "LqDecomposition",
    "multiply",
    "star",
    "membership_Lq_prime",
    "apply_gamma_q",
    "gamma_power",
    "canonical_IAq",
    "specialize_q1",
    "multiply_in_basis_q",
    "termwise_symmetrization",
    "clock_shift_model",
    "clock_shift_generators",
    "dump_element",
]


class QLaurent:
    """Laurent polynomial in q with integer coefficients, ``{k: c}``."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def const(cls, v=1):
        return cls({0: v})

    @classmethod
    def qpow(cls, k, v=1):
        return cls({k: v})

    def __add__(self, other):
        other = _as_q(other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return QLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-_as_q(other))

    def __rsub__(self, other):
        return _as_q(other) - self

    def __mul__(self, other):
        other = _as_q(other)
        out = {}
        for i, u in self.c.items():
            for j, v in other.c.items():
                out[i + j] = out.get(i + j, 0) + u * v
        return QLaurent(out)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by q^k."""
        return QLaurent({i + k: v for i, v in self.c.items()})

    def bar(self):
        """q -> q^-1."""
        return QLaurent({-i: v for i, v in self.c.items()})

    def __eq__(self, other):
        if isinstance(other, int):
            other = QLaurent.const(other)
        return isinstance(other, QLaurent) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"QLaurent({dict(sorted(self.c.items()))})"

    def __str__(self):
        if not self.c:
            return "0"
        return " + ".join(f"{v} q^{k}" for k, v in sorted(self.c.items()))

    def at(self, q):
        return sum(v * q ** k for k, v in self.c.items())

    def at_one(self):
        return sum(self.c.values())

    def is_nonnegative(self):
        return all(v > 0 for v in self.c.values())

    def is_monomial(self):
        return len(self.c) == 1


def _as_q(x):
    if isinstance(x, QLaurent):
        return x
    if isinstance(x, int):
        return QLaurent.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a q-Laurent polynomial")


class QT2Element:
    """Normal-ordered element ``sum c_{mn}(q) X^m Y^n`` of the quantum torus."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {}
        for k, v in (coeffs or {}).items():
            v = _as_q(v)
            if v:
                self.c[k] = v

    @classmethod
    def monomial(cls, m, n, qpow=0, coeff=1):
        return cls({(m, n): QLaurent({qpow: coeff})})

    @classmethod
    def M(cls, m, n):
        """The star-invariant monomial q^{-mn} X^m Y^n."""
        return cls.monomial(m, n, -m * n)

    @classmethod
    def one(cls):
        return cls.monomial(0, 0)

    @classmethod
    def X(cls, e=1):
        return cls.monomial(e, 0)

    @classmethod
    def Y(cls, e=1):
        return cls.monomial(0, e)

    @classmethod
    def q(cls, k=1):
        return cls.monomial(0, 0, k)

    def __add__(self, other):
        other = _as_qt(other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out[k] + v if k in out else v
        return QT2Element(out)

    __radd__ = __add__

    def __neg__(self):
        return QT2Element({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-_as_qt(other))

    def __rsub__(self, other):
        return _as_qt(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, QLaurent)):
            other = _as_q(other)
            return QT2Element({k: v * other for k, v in self.c.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, QLaurent)):
            return self * other
        return multiply(_as_qt(other), self)

    def __pow__(self, e):
        if e < 0:
            if len(self.c) != 1:
                raise ValueError("only monomials are invertible here")
            ((m, n), v), = self.c.items()
            if not (v.is_monomial() and next(iter(v.c.values())) in (1, -1)):
                raise ValueError("monomial inverse needs a unit coefficient")
            (k, s), = v.c.items()
            # (q^k X^m Y^n)^-1 = q^{-k} Y^-n X^-m = q^{-k - 2mn} X^-m Y^-n
            inv = QT2Element.monomial(-m, -n, -k - 2 * m * n, s)
            return inv ** (-e)
        out = QT2Element.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = QT2Element({(0, 0): other})
        return isinstance(other, QT2Element) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"QT2Element({dict(sorted(self.c.items()))})"

    def terms(self):
        return sorted(self.c.items())

    def numeric(self, q):
        """``{(m, n): complex}`` with q substituted."""
        return {k: complex(v.at(q)) for k, v in self.c.items()}

    def y_components(self):
        out = {}
        for (m, n), v in self.c.items():
            out.setdefault(n, {})[m] = v
        return out


def _as_qt(x):
    if isinstance(x, QT2Element):
        return x
    if isinstance(x, (int, QLaurent)):
        return QT2Element({(0, 0): _as_q(x)})
    raise TypeError(f"cannot use {type(x).__name__} as a quantum torus element")


def multiply(u, v):
    out = {}
    for (a, b), cu in u.c.items():
        for (c, d), cv in v.c.items():
            key = (a + c, b + d)
            term = (cu * cv).shift(-2 * b * c)
            out[key] = out[key] + term if key in out else term
    return QT2Element(out)


def star(u):
    """Antiautomorphism with q -> q^-1, X -> X, Y -> Y.

    ``(X^m Y^n)^* = Y^n X^m = q^{-2mn} X^m Y^n``.
    """
    return QT2Element({(m, n): v.bar().shift(-2 * m * n) for (m, n), v in u.c.items()})


@dataclass(frozen=True)
class ModularDoubleElement:
    """Pure tensor ``left (x) right`` of a q-side and a q_vee-side element."""

    left: QT2Element = field(default_factory=QT2Element.one)
    right: QT2Element = field(default_factory=QT2Element.one)


# -- the subspace on which gamma stays Laurent ---------------------------------

@dataclass
class LqDecomposition:
    """``u = sum c X^a Y^m  +  sum c' X^a Y^-n prod_{k=1}^n (1 + q^{2k-1} X^-1)``.

    ``first`` maps (a, m) with m >= 0 to c, ``second`` maps (a, n) with
    n >= 1 to c'.
    """

    first: dict
    second: dict


def _divide_linear(col, s):
    """Divide ``sum col[i] X^i`` by (1 + q^s X^-1) exactly, or return None."""
    if not col:
        return {}
    lo, hi = min(col), max(col)
    quot = {}
    prev = QLaurent()
    # coefficient of X^i: Q_i + q^s Q_{i+1} = C_i
    for i in range(hi, lo, -1):
        qi = col.get(i, QLaurent()) - prev.shift(s)
        if qi:
            quot[i] = qi
        prev = qi
    if col.get(lo, QLaurent()) - prev.shift(s):
        return None
    return quot


def membership_Lq_prime(u):
    """Decompose u over the spanning families, or raise NonMember.

    The Y-degree -n part ``C(X) Y^-n`` is a member exactly when C(X) is
    divisible by ``prod_{j=0}^{n-1} (1 + q^{-2j-1} X^-1)``, the normal-ordered
    form of ``Y^-n prod_k (1 + q^{2k-1} X^-1)``.
    """
    first = {}
    second = {}
    for n, col in u.y_components().items():
        if n >= 0:
            for a, v in col.items():
                first[(a, n)] = v
            continue
        k = -n
        quot = col
        for j in range(k):
            quot = _divide_linear(quot, -2 * j - 1)
            if quot is None:
                raise NonMember(f"Y-degree {n} component is not divisible", y_degree=n)
        for a, v in quot.items():
            second[(a, k)] = v
    return LqDecomposition(first, second)


@lru_cache(maxsize=None)
def _gamma_first(a, m):
    # gamma(X^a Y^m) = Y^-a prod_{k=1}^m (1 + q^{2k-1} Y) X^m
    out = QT2Element.Y(-a)
    for k in range(1, m + 1):
        out = out * QT2Element({(0, 0): 1, (0, 1): QLaurent.qpow(2 * k - 1)})
    return out * QT2Element.X(m)


def apply_gamma_q(u):
    """Image under X -> Y^-1, Y -> (1 + qY) X, for u in the Laurent domain."""
    dec = membership_Lq_prime(u)
    out = {}

    def add(key, val):
        out[key] = out[key] + val if key in out else val

    for (a, m), c in dec.first.items():
        for key, v in _gamma_first(a, m).c.items():
            add(key, v * c)
    for (a, n), c in dec.second.items():
        # Y^-a X^-n = q^{-2an} X^-n Y^-a
        add((-n, -a), c.shift(-2 * a * n))
    return QT2Element(out)


def gamma_power(u, k):
    for _ in range(k % 5):
        u = apply_gamma_q(u)
    return u


@lru_cache(maxsize=None)
def canonical_IAq(p):
    """Quantum canonical basis element at the tropical point ``p``.

    On the cone a <= 0, b >= 0 it is q^{-ab} X^a Y^b; elsewhere it is
    transported from that cone with the automorphism, following
    gamma(I(gamma_a p)) = I(p).
    """
    point = tuple(p)
    steps = 0
    while 1 not in cone_of(point):
        point = tropical_gamma(point)
        steps += 1
        if steps > 4:
            raise AssertionError(f"{p} never reaches the first cone")
    a, b = point
    return gamma_power(QT2Element.M(a, b), steps)


def specialize_q1(u):
    return LaurentPoly2({k: v.at_one() for k, v in u.c.items()})


def termwise_symmetrization(classical):
    """Multiply each monomial c X^m Y^n of a classical element by q^{-mn}."""
    return QT2Element({(m, n): QLaurent({-m * n: v}) for (m, n), v in classical.c.items()})


def _top_key(k):
    m, n = k
    return (m + n, m, n)


def multiply_in_basis_q(p, p2, max_steps=100000):
    """Structure constants of I^q(p) I^q(p2) over the quantum canonical basis."""
    rest = canonical_IAq(tuple(p)) * canonical_IAq(tuple(p2))
    out = {}
    steps = 0
    last = None
    while rest:
        top = max(rest.c, key=_top_key)
        if last is not None and _top_key(top) >= _top_key(last):
            raise BasisExpansionFailure(f"elimination did not decrease at {top}")
        m, n = top
        basis = canonical_IAq(top)
        if basis.c.get(top) != QLaurent.qpow(-m * n):
            raise BasisExpansionFailure(f"I^q{top} does not lead with q^(-mn) X^m Y^n")
        coeff = rest.c[top].shift(m * n)
        out[top] = coeff
        rest = rest - basis * coeff
        last = top
        steps += 1
        if steps > max_steps:
            raise BasisExpansionFailure("elimination step budget exhausted")
    return out


# -- root of unity models -------------------------------------------------------

def clock_shift_generators(N, alpha=1.0, beta=1.0, k=1):
    """Matrices X, Y with XY = q^2 YX, X^N = alpha, Y^N = beta at q = e^{2 pi i k/N}."""
    if N % 2 == 0:
        raise EvenN(f"N must be odd, got {N}")
    if N < 3:
        raise ValueError("N must be at least 3")
    if math.gcd(k, N) != 1:
        raise ValueError("q must be a primitive N-th root of unity")
    q = cmath.exp(2j * math.pi * k / N)
    w = q * q
    X = complex(alpha) ** (1 / N) * np.diag(w ** np.arange(1, N + 1))
    S = np.roll(np.eye(N, dtype=complex), 1, axis=0)
    Y = complex(beta) ** (1 / N) * S
    return q, X, Y


def clock_shift_model(u, N, alpha=1.0, beta=1.0, k=1):
    """Evaluate ``u`` in the clock-shift representation of size N."""
    q, X, Y = clock_shift_generators(N, alpha, beta, k)
    out = np.zeros((N, N), dtype=complex)
    for (m, n), v in u.c.items():
        out += v.at(q) * np.linalg.matrix_power(X, m) @ np.linalg.matrix_power(Y, n)
    return out


def dump_element(u):
    """Text form ``[(m, n, qpoly), ...]`` with qpoly as ``c_k q^k + ...``."""
    return "[" + ", ".join(f"({m}, {n}, {v})" for (m, n), v in u.terms()) + "]"


def to_json(u):
    return [[m, n, sorted(v.c.items())] for (m, n), v in u.terms()]


def from_json(data):
    return QT2Element({(m, n): QLaurent(dict((k, c) for k, c in poly)) for m, n, poly in data})
