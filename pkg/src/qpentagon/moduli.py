"""Exact geometry of five cyclically ordered points on the projective line.

Points are homogeneous pairs of Fractions; every cross-ratio is a ratio of
2x2 determinants, so the point at infinity needs no special casing:

    r(x1, x2, x3, x4) = [12][34] / ([14][23]),   [ij] = det(x_i, x_j).

Regular functions on the space of configurations with no neighbouring
collisions are sums of H-invariant products of the determinants Delta_ij in
which only sides (neighbouring pairs) may carry negative exponents.  The
functions

    X_{a,b;c} = r(x_c, x_{c+1}, x_{c+2}, x_{c+3})^a r(x_c, x_{c+2}, x_{c+3}, x_{c+4})^b

are of this form exactly when a <= 0 <= b: the first cross-ratio has the
diagonal Delta_{c,c+3} in its denominator, the second has Delta_{c,c+2} in
its numerator.  Indices are 1..5 and taken mod 5 throughout.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .cluster import LaurentPoly2, canonical_IA, box
from .errors import (
    DegeneratePoint,
    DegenerateQuadruple,
    NotHInvariant,
    NotRegular,
    SignatureViolation,
)

__all__ = [
    "ProjPoint",
    "INF",
    "Config5",
    "VectorConfig5",
    "ChordMonomial",
    "cross_ratio",
    "psi_c",
    "chart_coordinates",
    "charts_containing",
    "same_configuration",
    "X_abc",
    "SIDES",
    "DIAGONALS",
    "crosses",
    "crossing_measure",
    "pluecker_reduce",
    "chord_monomial_of",
    "basis_to_regular",
    "regular_to_basis",
    "canonical_label",
    "independence_check",
    "correspondence_table",
    "label_to_lattice",
    "random_config",
    "random_vector_config",
    "random_chord_monomial",
]


def _idx(i):
    return (i - 1) % 5 + 1


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Homogeneous coordinates (u : v); the affine value is u / v."""

    u: Fraction
    v: Fraction

    def __post_init__(self):
        u, v = Fraction(self.u), Fraction(self.v)
        if u == 0 and v == 0:
            raise DegeneratePoint("(0 : 0) is not a point of the projective line")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def of(cls, x):
        if isinstance(x, ProjPoint):
            return x
        if x is None or x == "inf":
            return INF
        return cls(Fraction(x), Fraction(1))

    def det(self, other):
        return self.u * other.v - self.v * other.u

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.det(other) == 0

    def __hash__(self):
        return hash(self.u / self.v) if self.v else hash("inf")

    def is_infinite(self):
        return self.v == 0

    def value(self):
        return None if self.v == 0 else self.u / self.v

    def __repr__(self):
        return "inf" if self.v == 0 else str(self.u / self.v)


INF = ProjPoint(1, 0)


def cross_ratio(x1, x2, x3, x4):
    p = [ProjPoint.of(x) for x in (x1, x2, x3, x4)]
    den = p[0].det(p[3]) * p[1].det(p[2])
    if den == 0:
        raise DegenerateQuadruple("cross-ratio denominator vanishes")
    return p[0].det(p[1]) * p[2].det(p[3]) / den


@dataclass(frozen=True)
class Config5:
    """Five points with cyclically neighbouring points distinct."""

    points: tuple

    def __post_init__(self):
        pts = tuple(ProjPoint.of(p) for p in self.points)
        if len(pts) != 5:
            raise ValueError("a configuration has five points")
        for i in range(5):
            if pts[i] == pts[(i + 1) % 5]:
                raise DegeneratePoint(f"neighbouring points {i + 1}, {_idx(i + 2)} collide")
        object.__setattr__(self, "points", pts)

    def __getitem__(self, i):
        """1-based, cyclic."""
        return self.points[(i - 1) % 5]

    def shifted(self, s):
        """Point i moves to position i + s."""
        return Config5(tuple(self.points[(i - s) % 5] for i in range(5)))

    def to_json(self):
        return [[str(p.u), str(p.v)] for p in self.points]


@dataclass(frozen=True)
class VectorConfig5:
    """Five vectors in the rational plane; Delta_ij = det(v_i, v_j)."""

    vectors: tuple

    def __post_init__(self):
        vecs = tuple((Fraction(a), Fraction(b)) for a, b in self.vectors)
        if len(vecs) != 5:
            raise ValueError("a vector configuration has five vectors")
        object.__setattr__(self, "vectors", vecs)

    def delta(self, i, j):
        (a, b), (c, d) = self.vectors[i - 1], self.vectors[j - 1]
        return a * d - b * c

    def points(self):
        return Config5(tuple(ProjPoint(a, b) for a, b in self.vectors))


def psi_c(X, Y, c=1):
    """Chart c: (X, Y) -> (inf, -1, 0, X, X(1+Y)) shifted cyclically by 2(c-1)."""
    X, Y = Fraction(X), Fraction(Y)
    if X == 0 or Y == 0:
        raise DegeneratePoint("chart coordinates must be nonzero")
    base = Config5((INF, ProjPoint.of(-1), ProjPoint.of(0), ProjPoint.of(X), ProjPoint.of(X * (1 + Y))))
    return base.shifted(2 * (c - 1))


def chart_coordinates(config, c):
    """(X, Y) with config equivalent to psi_c(X, Y), or None if there is none."""
    y = config.shifted(-2 * (c - 1))
    if y[1] == y[3]:
        return None
    try:
        X = cross_ratio(y[1], y[2], y[3], y[4])
        Y = cross_ratio(y[1], y[3], y[4], y[5])
    except DegenerateQuadruple:
        return None
    if X == 0 or Y == 0:
        return None
    return X, Y


def charts_containing(config):
    return [c for c in range(1, 6) if chart_coordinates(config, c) is not None]


def same_configuration(p, q):
    """Equality modulo PGL_2, via cross-ratios against three distinct points."""
    for i, j, k in combinations(range(1, 6), 3):
        if len({p[i], p[j], p[k]}) == 3:
            break
    else:
        raise DegeneratePoint("configuration has fewer than three distinct points")
    if len({q[i], q[j], q[k]}) != 3:
        return False
    for m in range(1, 6):
        # r(p_i, p_j, p_k, p_m) determines p_m once p_i, p_j, p_k are fixed
        hp = p[i].det(p[j]) * p[k].det(p[m]), p[i].det(p[m]) * p[j].det(p[k])
        hq = q[i].det(q[j]) * q[k].det(q[m]), q[i].det(q[m]) * q[j].det(q[k])
        if hp[0] * hq[1] != hp[1] * hq[0]:
            return False
    return True


def X_abc(config, a, b, c, check=True):
    """Value of X_{a,b;c} at a configuration.

    With ``check`` the exponents must lie in the regular range a <= 0 <= b;
    other exponents are evaluated as the same product of determinant powers,
    which raises DegenerateQuadruple where a negative power hits a zero.
    """
    if check and (a > 0 or b < 0):
        raise SignatureViolation(f"X_{{a,b;c}} is regular only for a <= 0 <= b, got ({a}, {b})")
    # the Delta-monomial is H-invariant, so homogeneous coordinates can be used
    vc = VectorConfig5(tuple((p.u, p.v) for p in config.points))
    return chord_monomial_of(a, b, c).evaluate(vc)


# -- chord diagrams ------------------------------------------------------------

SIDES = ((1, 2), (2, 3), (3, 4), (4, 5), (1, 5))
DIAGONALS = ((1, 3), (1, 4), (2, 4), (2, 5), (3, 5))


def _edge(i, j):
    i, j = _idx(i), _idx(j)
    return (i, j) if i < j else (j, i)


def crosses(d, e):
    (i, j), (k, l) = d, e
    return i < k < j < l or k < i < l < j


@dataclass(frozen=True)
class ChordMonomial:
    """coeff * prod Delta_ij^{w_ij}; ``weights`` is a sorted tuple of ((i, j), w)."""

    weights: tuple
    coeff: int = 1

    @classmethod
    def make(cls, weights, coeff=1):
        w = {}
        for (i, j), n in dict(weights).items():
            key = _edge(i, j)
            if key[0] == key[1]:
                raise ValueError("an edge joins two different vertices")
            w[key] = w.get(key, 0) + n
        return cls(tuple(sorted((k, n) for k, n in w.items() if n)), coeff)

    @property
    def w(self):
        return dict(self.weights)

    def weight(self, i, j):
        return self.w.get(_edge(i, j), 0)

    def vertex_sums(self):
        sums = {v: 0 for v in range(1, 6)}
        for (i, j), n in self.weights:
            sums[i] += n
            sums[j] += n
        return sums

    def is_h_invariant(self):
        return all(s == 0 for s in self.vertex_sums().values())

    def has_valid_signs(self):
        return all(self.weight(*d) >= 0 for d in DIAGONALS)

    def diagonals(self):
        return [(d, self.weight(*d)) for d in DIAGONALS if self.weight(*d)]

    def is_regular(self):
        ds = [d for d, _ in self.diagonals()]
        return not any(crosses(d, e) for d, e in combinations(ds, 2))

    def key(self):
        return self.weights

    def evaluate(self, vc):
        out = Fraction(self.coeff)
        for (i, j), n in self.weights:
            d = vc.delta(i, j)
            if d == 0 and n < 0:
                raise DegenerateQuadruple(f"Delta_{i}{j} vanishes")
            out *= d ** n
        return out

    def to_json(self):
        return {"weights": {f"{i}{j}": n for (i, j), n in self.weights}, "coeff": self.coeff}

    @classmethod
    def from_json(cls, data):
        return cls.make({(int(k[0]), int(k[1])): n for k, n in data["weights"].items()}, data["coeff"])


def crossing_measure(m):
    """Sum over crossing pairs of diagonals of the product of their weights."""
    ds = m.diagonals()
    return sum(a * b for (d, a), (e, b) in combinations(ds, 2) if crosses(d, e))


def _first_crossing(m):
    ds = sorted(d for d, _ in m.diagonals())
    for d, e in combinations(ds, 2):
        if crosses(d, e):
            return d, e
    return None


def _combine(terms):
    acc = {}
    for t in terms:
        acc[t.key()] = acc.get(t.key(), 0) + t.coeff
    return [ChordMonomial(k, c) for k, c in sorted(acc.items()) if c]


def pluecker_reduce(terms, trace=None):
    """Rewrite a sum of H-invariant monomials as a sum of regular ones.

    Each step replaces Delta_ac Delta_bd (a < b < c < d, crossing) in one
    monomial by Delta_ab Delta_cd + Delta_ad Delta_bc.  The crossing measure
    of both new monomials is asserted to be strictly smaller.  ``trace``, if
    given, receives (old measure, new measures) for every step.
    """
    for t in terms:
        if not t.is_h_invariant():
            raise NotHInvariant(f"weights {t.w} do not sum to zero at every vertex")
    todo = list(terms)
    done = []
    while todo:
        m = todo.pop()
        pair = _first_crossing(m)
        if pair is None:
            done.append(m)
            continue
        (i, j), (k, l) = pair
        a, b, c, d = sorted((i, j, k, l))
        w = m.w
        w[(a, c)] -= 1
        w[(b, d)] -= 1
        t1 = dict(w)
        t1[(a, b)] = t1.get((a, b), 0) + 1
        t1[(c, d)] = t1.get((c, d), 0) + 1
        t2 = dict(w)
        t2[(a, d)] = t2.get((a, d), 0) + 1
        t2[(b, c)] = t2.get((b, c), 0) + 1
        new = [ChordMonomial.make(t1, m.coeff), ChordMonomial.make(t2, m.coeff)]
        before = crossing_measure(m)
        after = [crossing_measure(n) for n in new]
        assert all(x < before for x in after), "crossing measure did not decrease"
        assert all(n.is_h_invariant() for n in new)
        if trace is not None:
            trace.append((before, after))
        todo.extend(new)
    return _combine(done)


def chord_monomial_of(a, b, c):
    """Delta-monomial of X_{a,b;c} for any integers a, b."""
    w = {}

    def add(i, j, n):
        key = _edge(i, j)
        w[key] = w.get(key, 0) + n

    # r1 = D[c,c+1] D[c+2,c+3] / (D[c,c+3] D[c+1,c+2])
    add(c, c + 1, a)
    add(c + 2, c + 3, a)
    add(c, c + 3, -a)
    add(c + 1, c + 2, -a)
    # r2 = D[c,c+2] D[c+3,c+4] / (D[c,c+4] D[c+2,c+3])
    add(c, c + 2, b)
    add(c + 3, c + 4, b)
    add(c, c + 4, -b)
    add(c + 2, c + 3, -b)
    return ChordMonomial.make(w)


def basis_to_regular(a, b, c):
    if a > 0 or b < 0:
        raise SignatureViolation(f"regular labels need a <= 0 <= b, got ({a}, {b})")
    return chord_monomial_of(a, b, c)


def canonical_label(a, b, c):
    """Representative label of the function X_{a,b;c}.

    X_{a,0;c} = X_{0,-a;c+3} and X_{0,0;c} = 1; the representative uses the
    (c, c+2) form for a single diagonal and c = 1 for the constant.
    """
    c = _idx(c)
    if a == 0 and b == 0:
        return (0, 0, 1)
    if b == 0:
        return (0, -a, _idx(c + 3))
    return (a, b, c)


def regular_to_basis(m):
    """(a, b, c) with a <= 0 <= b whose Delta-monomial is m (canonical label)."""
    if not m.is_h_invariant():
        raise NotHInvariant(f"weights {m.w} do not sum to zero at every vertex")
    if not m.has_valid_signs() or not m.is_regular():
        raise NotRegular(f"weights {m.w} contain negative or crossing diagonals")
    ds = m.diagonals()
    if not ds:
        label = (0, 0, 1)
    elif len(ds) == 1:
        ((i, j), u), = ds
        c = i if _idx(i + 2) == j else j
        label = (0, u, c)
    else:
        ((d1, u1), (d2, u2)) = ds
        c = (set(d1) & set(d2)).pop()
        # the shared vertex c sees one diagonal as (c, c+2), the other as (c, c+3)
        if _edge(c, c + 2) == d1:
            b, a = u1, -u2
        else:
            b, a = u2, -u1
        label = (a, b, c)
    if chord_monomial_of(*label).weights != m.weights:
        raise NotRegular(f"weights {m.w} are not those of a basis monomial")
    return label


# -- sampling ------------------------------------------------------------------

def _rand_q(rng, lo=-20, hi=20, den=7):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_config(rng, collide=0.5):
    """Random configuration; with probability ``collide`` one non-neighbouring
    pair is made to coincide, and a point may sit at infinity."""
    while True:
        pts = [ProjPoint.of(_rand_q(rng)) for _ in range(5)]
        if rng.random() < 0.3:
            pts[rng.randrange(5)] = INF
        if rng.random() < collide:
            i = rng.randrange(5)
            pts[(i + 2) % 5] = pts[i]
        try:
            return Config5(tuple(pts))
        except DegeneratePoint:
            continue


def random_vector_config(rng, bound=9):
    while True:
        vecs = [(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(5)]
        vc = VectorConfig5(tuple(vecs))
        if all(vc.delta(i, j) != 0 for i, j in combinations(range(1, 6), 2)):
            return vc


def random_chord_monomial(rng, max_weight=3):
    """H-invariant monomial with random diagonal weights in [0, max_weight].

    Side weights follow from the diagonals: the vertex equations around the
    odd cycle of sides have a unique solution, integral when the sum of the
    diagonal weights at alternating vertices works out; otherwise the
    diagonals are doubled.
    """
    diag = {d: rng.randint(0, max_weight) for d in DIAGONALS}
    return _complete_with_sides(diag)


def _complete_with_sides(diag):
    # side s_k joins k, k+1; vertex k sees s_{k-1} + s_k + D_k = 0
    D = {v: 0 for v in range(1, 6)}
    for (i, j), n in diag.items():
        D[i] += n
        D[j] += n
    # s_k = -(D_k - D_{k+2} + D_{k+4} ... ) / 2 over the odd cycle
    total = sum(D.values())
    if total % 2:
        diag = {d: 2 * n for d, n in diag.items()}
        return _complete_with_sides(diag)
    s = {}
    for k in range(1, 6):
        # s_k = (-D_k - D_{k+1} + D_{k+2} - D_{k+3} + D_{k+4}) / 2 ... solved directly
        s[k] = (-D[k] - D[_idx(k + 1)] + D[_idx(k + 2)] - D[_idx(k + 3)] + D[_idx(k + 4)])
    w = dict(diag)
    for k in range(1, 6):
        assert s[k] % 2 == 0
        key = _edge(k, k + 1)
        w[key] = w.get(key, 0) + s[k] // 2
    m = ChordMonomial.make(w)
    assert m.is_h_invariant()
    return m


# -- independence and the correspondence with the cluster basis ----------------

def _exact_rank(rows):
    data = [[QQ(x.numerator, x.denominator) for x in r] for r in rows]
    return DomainMatrix(data, (len(rows), len(rows[0])), QQ).rank()


def _labels(degree_bound):
    seen = {}
    for c in range(1, 6):
        for a in range(-degree_bound, 1):
            for b in range(0, degree_bound + 1):
                seen.setdefault(canonical_label(a, b, c), None)
    return sorted(seen)


def independence_check(degree_bound=2, n_samples=None, seed=0, extra=()):
    """Exact rank of the evaluation matrix of the X_{a,b;c}, 0 <= -a, b <= bound.

    Returns a dict with the number of labels, the number of distinct
    functions after the identifications X_{a,0;c} = X_{0,-a;c+3} and
    X_{0,0;c} = 1, and the exact rank.  ``extra`` chord monomials are
    appended as further columns and the rank with them is reported too.
    """
    if degree_bound > 3:
        # exact elimination cost grows steeply: about 6 s at bound 3, 80 s at 4
        raise ValueError("degree bound above 3 is beyond desk scale")
    labels = _labels(degree_bound)
    n_raw = 5 * (degree_bound + 1) ** 2
    rng = random.Random(seed)
    n = n_samples or 2 * (len(labels) + len(extra)) + 10
    configs = [random_vector_config(rng) for _ in range(n)]
    cols = [chord_monomial_of(*lab) for lab in labels]
    rows = [[m.evaluate(vc) for m in cols] for vc in configs]
    rank = _exact_rank(rows)
    out = {"labels": n_raw, "distinct": len(labels), "rank": rank, "samples": n}
    if extra:
        rows_x = [r + [m.evaluate(vc) for m in extra] for r, vc in zip(rows, configs)]
        out["rank_with_extra"] = _exact_rank(rows_x)
    return out


def _chart_values(f, points):
    return [f(psi_c(X, Y, 1)) for X, Y in points]


def correspondence_table(radius=2, c_values=range(1, 6), search=None, seed=0):
    """Match every X_{a,b;c} (a <= 0 <= b) against the cluster basis in chart 1.

    X_{a,b;c} o psi_1 is compared with I_A(p) at random chart points.
    Returns {(a, b, c): p}; a label with no match maps to None.
    """
    rng = random.Random(seed)
    pts = []
    while len(pts) < 8:
        X, Y = _rand_q(rng, 1, 30), _rand_q(rng, 1, 30)
        pts.append((X, Y))
    search = search or 3 * radius + 2
    cand = {}
    for p in box(search):
        vals = tuple(canonical_IA(p).evaluate(X, Y) for X, Y in pts)
        cand.setdefault(vals, p)
    table = {}
    for c in c_values:
        for a in range(-radius, 1):
            for b in range(0, radius + 1):
                vals = tuple(_chart_values(lambda cf: X_abc(cf, a, b, c), pts))
                table[(a, b, c)] = cand.get(vals)
    return table


_LATTICE_MAPS = {
    1: lambda a, b: (a, b),
    2: lambda a, b: (-a, -b),
    3: lambda a, b: (b, b - a),
    4: lambda a, b: (-b, a),
    5: lambda a, b: (b - a, -a),
}


def label_to_lattice(a, b, c):
    """Lattice point p with X_{a,b;c} o psi_1 = I_A(p) (read off from
    ``correspondence_table`` and checked against it in the tests)."""
    return _LATTICE_MAPS[_idx(c)](a, b)
