"""Exact type A2 cluster machinery: mutation maps, tropical points and the
canonical basis of universally positive Laurent polynomials.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import BasisExpansionFailure, DegeneratePoint

__all__ = [
    "LaurentPoly2",
    "LaurentFraction2",
    "gamma_X_point",
    "gamma_A_point",
    "tropical_gamma",
    "tropical_gamma_inv",
    "cone_of",
    "canonical_IA",
    "canonical_IA_row",
    "pullback_gamma_X",
    "equivariance_check",
    "positivity_check",
    "leading_monomial_check",
    "overlap_check",
    "multiply_in_basis_classical",
    "dump_basis_element",
]


class LaurentPoly2:
    """Integer Laurent polynomial in commuting X, Y; ``{(m, n): coeff}``."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def monomial(cls, m, n, coeff=1):
        return cls({(m, n): coeff})

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    @classmethod
    def X(cls):
        return cls({(1, 0): 1})

    @classmethod
    def Y(cls):
        return cls({(0, 1): 1})

    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly2(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        out = {}
        for (a, b), u in self.c.items():
            for (c, d), v in other.c.items():
                k = (a + c, b + d)
                out[k] = out.get(k, 0) + u * v
        return LaurentPoly2(out)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            if len(self.c) != 1:
                raise ValueError("only monomials have Laurent inverses")
            ((m, n), v), = self.c.items()
            if v not in (1, -1):
                raise ValueError("monomial inverse needs a unit coefficient")
            return LaurentPoly2({(-m * -e, -n * -e): v ** -e})
        out = LaurentPoly2.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly2({(0, 0): other})
        return isinstance(other, LaurentPoly2) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"LaurentPoly2({dict(sorted(self.c.items()))})"

    def support(self):
        return set(self.c)

    def coefficients(self):
        return list(self.c.values())

    def evaluate(self, x, y):
        total = 0
        for (m, n), v in self.c.items():
            total += v * _pow(x, m) * _pow(y, n)
        return total

    def terms(self):
        return sorted((m, n, v) for (m, n), v in self.c.items())


def _pow(x, e):
    if e >= 0:
        return x ** e
    return Fraction(1) / x ** (-e) if isinstance(x, (int, Fraction)) else x ** e


def _as_poly(x):
    if isinstance(x, LaurentPoly2):
        return x
    if isinstance(x, int):
        return LaurentPoly2({(0, 0): x})
    raise TypeError(f"cannot use {type(x).__name__} as a Laurent polynomial")


class LaurentFraction2:
    """``numerator / denominator``; compared by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        den = LaurentPoly2.one() if den is None else den
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    def __eq__(self, other):
        if isinstance(other, LaurentPoly2):
            other = LaurentFraction2(other)
        return self.num * other.den == other.num * self.den

    def __repr__(self):
        return f"LaurentFraction2({self.num!r}, {self.den!r})"

    def evaluate(self, x, y):
        return Fraction(self.num.evaluate(x, y)) / self.den.evaluate(x, y)

    def as_laurent(self):
        """The Laurent polynomial equal to this fraction, or None."""
        q, r = _divide_by_one_plus_y_power(self.num, self.den)
        return q if not r else None


def _divide_by_one_plus_y_power(num, den):
    """Divide exactly by a unit monomial or by a power of (1 + Y)."""
    if len(den.c) == 1:
        ((m, n), v), = den.c.items()
        if v in (1, -1):
            return num * LaurentPoly2({(-m, -n): v}), LaurentPoly2()
    one_plus_y = LaurentPoly2({(0, 0): 1, (0, 1): 1})
    k = len(den.c) - 1
    if den != one_plus_y ** k:
        raise ValueError("denominator is not a power of (1 + Y)")
    q = num
    for _ in range(k):
        q, rem = _divide_one_plus_y(q)
        if rem:
            return None, rem
    return q, LaurentPoly2()


def _divide_one_plus_y(f):
    """Exact division by (1 + Y) column by column in X; returns (q, remainder)."""
    cols = {}
    for (m, n), v in f.c.items():
        cols.setdefault(m, {})[n] = v
    quot = {}
    rem = {}
    for m, col in cols.items():
        lo, hi = min(col), max(col)
        qcol = {}
        carry = 0
        # (1 + Y) Q = C: Q_{n-1} + Q_n = C_n, so Q_n = C_n - Q_{n-1} from the bottom
        for n in range(lo, hi):
            carry = col.get(n, 0) - carry
            if carry:
                qcol[n] = carry
        last = col.get(hi, 0) - carry
        if last:
            rem[(m, hi)] = last
        for n, v in qcol.items():
            quot[(m, n)] = v
    return LaurentPoly2(quot), LaurentPoly2(rem)


# -- point maps ---------------------------------------------------------------

def gamma_X_point(x, y):
    """Point map (x, y) -> (1/y, (1 + y) x) realising X -> Y^-1, Y -> (1+Y)X."""
    x, y = Fraction(x), Fraction(y)
    if y == 0:
        raise DegeneratePoint("y = 0")
    return Fraction(1) / y, (1 + y) * x


def gamma_A_point(A, B):
    """(A, B) -> ((1 + A)/B, A)."""
    A, B = Fraction(A), Fraction(B)
    if B == 0:
        raise DegeneratePoint("B = 0")
    return (1 + A) / B, A


def tropical_gamma(p):
    a, b = p
    return (max(a, 0) - b, a)


def tropical_gamma_inv(p):
    # inverse of (a, b) -> (max(a, 0) - b, a)
    a2, b2 = p
    return (b2, max(b2, 0) - a2)


def cone_of(p):
    a, b = p
    cones = set()
    if a <= 0 and b >= 0:
        cones.add(1)
    if a <= 0 and b <= 0:
        cones.add(2)
    if a >= 0 and b <= 0:
        cones.add(3)
    if a >= b >= 0:
        cones.add(4)
    if b >= a >= 0:
        cones.add(5)
    return cones


# -- canonical basis ----------------------------------------------------------

_X = LaurentPoly2.X()
_Y = LaurentPoly2.Y()
_ONE = LaurentPoly2.one()
# (1 + X)/(XY), (1 + X + XY)/Y, (1 + Y) X
_F2 = LaurentPoly2({(-1, -1): 1, (0, -1): 1})
_F3 = LaurentPoly2({(0, -1): 1, (1, -1): 1, (1, 0): 1})
_F4 = LaurentPoly2({(1, 0): 1, (1, 1): 1})


def canonical_IA_row(p, row):
    """Formula of the given cone row evaluated at p (no domain check)."""
    a, b = p
    if row == 1:
        return LaurentPoly2.monomial(a, b)
    if row == 2:
        return _F2 ** (-b) * LaurentPoly2.monomial(a, 0)
    if row == 3:
        return _F3 ** a * _F2 ** (-b)
    if row == 4:
        return _F4 ** b * _F3 ** (a - b)
    if row == 5:
        return LaurentPoly2.monomial(0, b - a) * _F4 ** a
    raise ValueError(f"row must be 1..5, got {row}")


@lru_cache(maxsize=None)
def canonical_IA(p):
    """Canonical basis element at the tropical point ``p = (a, b)``.

    On cone boundaries every applicable row is evaluated and the results
    are asserted equal.
    """
    p = tuple(p)
    rows = sorted(cone_of(p))
    value = canonical_IA_row(p, rows[0])
    for row in rows[1:]:
        other = canonical_IA_row(p, row)
        if other != value:
            raise AssertionError(f"rows {rows[0]} and {row} disagree at {p}")
    return value


def overlap_check(p):
    rows = sorted(cone_of(p))
    first = canonical_IA_row(p, rows[0])
    return all(canonical_IA_row(p, r) == first for r in rows[1:])


def pullback_gamma_X(F):
    """Substitute X -> Y^-1, Y -> (1 + Y) X into F.

    Negative powers of (1 + Y) are collected into a common denominator
    ``(1 + Y)^K``; powers of Y stay in the numerator as Laurent monomials.
    """
    K = max([0] + [-n for (_, n) in F.c])
    one_plus_y = LaurentPoly2({(0, 0): 1, (0, 1): 1})
    num = LaurentPoly2()
    powers = {}
    for (m, n), v in F.c.items():
        # Y^-m (1+Y)^n X^n = Y^-m X^n (1+Y)^(n+K) / (1+Y)^K
        e = n + K
        if e not in powers:
            powers[e] = one_plus_y ** e
        num = num + LaurentPoly2({(n, -m): v}) * powers[e]
    return LaurentFraction2(num, one_plus_y ** K)


def equivariance_check(p):
    p = tuple(p)
    lhs = pullback_gamma_X(canonical_IA(tropical_gamma(p)))
    return lhs == canonical_IA(p)


def _gamma_orbit(p):
    orbit = [tuple(p)]
    for _ in range(4):
        orbit.append(tropical_gamma(orbit[-1]))
    return orbit


def positivity_check(p):
    """All five gamma-translates of IA(p) have positive integer coefficients.

    The translates are IA at the tropical orbit of p, since
    (gamma_X^*)^i IA(p) = IA(gamma_a^{-i} p); each one is also recomputed as
    an honest pullback and compared.
    """
    point = tuple(p)
    current = canonical_IA(point)
    for _ in range(5):
        if any(v <= 0 for v in current.coefficients()):
            return False
        point = tropical_gamma_inv(point)
        pulled = pullback_gamma_X(current).as_laurent()
        current = canonical_IA(point)
        if pulled is None or pulled != current:
            return False
    return True


def leading_monomial_check(p):
    a, b = p
    f = canonical_IA(tuple(p))
    if f.c.get((a, b)) != 1:
        return False
    for (m, n) in f.c:
        if (m, n) == (a, b):
            continue
        if not (m <= a and n <= b):
            return False
    return True


def _top_key(k):
    m, n = k
    return (m + n, m, n)


def multiply_in_basis_classical(p, p2, max_steps=100000):
    """Structure constants of IA(p) IA(p2) in the basis {IA(r)}.

    Greedy elimination of the monomial that is largest in total degree,
    ties broken lexicographically.
    """
    rest = canonical_IA(tuple(p)) * canonical_IA(tuple(p2))
    out = {}
    steps = 0
    last = None
    while rest:
        top = max(rest.c, key=_top_key)
        if last is not None and _top_key(top) >= _top_key(last):
            raise BasisExpansionFailure(f"elimination did not decrease at {top}")
        coeff = rest.c[top]
        basis = canonical_IA(top)
        if basis.c.get(top) != 1:
            raise BasisExpansionFailure(f"IA{top} does not lead with its own monomial")
        out[top] = out.get(top, 0) + coeff
        rest = rest - coeff * basis
        last = top
        steps += 1
        if steps > max_steps:
            raise BasisExpansionFailure("elimination step budget exhausted")
    return out


def dump_basis_element(p):
    """Text line ``a b : [(m, n, coeff), ...]``."""
    a, b = p
    terms = ", ".join(f"({m}, {n}, {v})" for m, n, v in canonical_IA(tuple(p)).terms())
    return f"{a} {b} : [{terms}]"


def box(radius):
    return [(a, b) for a, b in product(range(-radius, radius + 1), repeat=2)]
