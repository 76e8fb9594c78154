"""The integral operator

    K f(z) = int f(x) Phi^h(x) exp(i x z / (2 pi h)) dx

on test functions (exactly represented sums of Gaussians) and on uniform
grids, together with the numerical identity checks built on it.

By Plancherel ||K f|| = 2 pi sqrt(h) ||f||, so the unitary operator is
K / (2 pi sqrt(h)); ``KConfig.rescale`` applies that factor.
"""

import cmath
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BoundaryLeak, DegenerateSample
from .qtorus import ModularDoubleElement, QT2Element, apply_gamma_q
from .quadrature import ROUNDING, gauss_legendre_rule
from .specfun import QuadratureConfig, log_phi_many
from .errors import QuadratureNonConvergence
from . import wspace

__all__ = [
    "GridSpec",
    "GridFunction",
    "KConfig",
    "PentagonResult",
    "phi_table",
    "apply_K_to_W",
    "apply_K_grid",
    "apply_K_grid_batch",
    "norm_ratio",
    "intertwine_basic",
    "intertwine_general",
    "pentagon_check",
    "pentagon_report",
    "sample_functions",
    "random_wvector",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid x_k = -L + k * (2L/N), k = 0..N-1."""

    half_width: float = 40.0
    size: int = 4096

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("grid half width must be positive")
        if self.size < 2:
            raise ValueError("grid needs at least two points")

    @property
    def spacing(self):
        return 2 * self.half_width / self.size

    @property
    def points(self):
        return -self.half_width + self.spacing * np.arange(self.size)

    def doubled(self, keep="spacing"):
        """Twice as many points, either at fixed spacing or on the same interval."""
        if keep == "spacing":
            return GridSpec(2 * self.half_width, 2 * self.size)
        if keep == "interval":
            return GridSpec(self.half_width, 2 * self.size)
        raise ValueError(f"unknown refinement {keep!r}")


@dataclass(frozen=True, eq=False)
class GridFunction:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.spec.size,):
            raise ValueError(f"expected {self.spec.size} values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_w(cls, v, spec):
        return cls(spec, wspace.evaluate(v, spec.points))

    def norm(self):
        # periodic trapezoid rule; the values are assumed to vanish at the edges
        return math.sqrt(self.spec.spacing * float(np.sum(np.abs(self.values) ** 2)))

    def inner(self, other):
        return complex(self.spec.spacing * np.vdot(other.values, self.values))


@dataclass(frozen=True)
class KConfig:
    hbar: float
    quad: QuadratureConfig = field(default_factory=lambda: QuadratureConfig(rel_tol=1e-10))
    rescale: bool = True
    leak_tol: float = 1e-12

    def __post_init__(self):
        if not (isinstance(self.hbar, (int, float)) and self.hbar > 0):
            raise ValueError(f"K needs a real positive hbar, got {self.hbar}")
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def factor(self):
        return 1 / (2 * math.pi * math.sqrt(self.hbar)) if self.rescale else 1.0


@lru_cache(maxsize=64)
def _phi_nodes(hbar, nodes_key, rel_tol):
    nodes = np.frombuffer(nodes_key, dtype=float)
    return np.exp(log_phi_many(nodes, hbar, QuadratureConfig(rel_tol=rel_tol)))


def phi_table(x, cfg):
    """Phi^h at real points, cached per (h, points, tolerance)."""
    x = np.ascontiguousarray(x, dtype=float)
    return _phi_nodes(cfg.hbar, x.tobytes(), cfg.quad.rel_tol)


# -- K on the exactly represented test space ------------------------------------

def _w_interval(v, zs, hbar):
    s = -np.asarray(zs).imag / (2 * math.pi * hbar)
    s_lo, s_hi = float(s.min()), float(s.max())
    lo, hi = math.inf, -math.inf
    for t in v.terms:
        deg = len(t.coeffs) - 1
        # exp(-a x^2/2 + (Re b + s) x) x^deg is below 1e-20 of its peak outside this
        w = math.sqrt(2 * 46 / t.a) + 2 * math.sqrt(deg / t.a)
        for s_ in (s_lo, s_hi):
            c = (t.b.real + s_) / t.a
            lo, hi = min(lo, c - w), max(hi, c + w)
    return math.floor(lo), math.ceil(hi)


def _panel_nodes(lo, hi, level, order):
    """Gauss-Legendre nodes on the panels [j, j+1] * 2^-level covering [lo, hi]."""
    x, w = gauss_legendre_rule(order)
    width = 2.0 ** -level
    j = np.arange(int(round(lo / width)), int(round(hi / width)))
    mid = (j + 0.5) * width
    nodes = (mid[:, None] + 0.5 * width * x[None, :]).ravel()
    weights = np.tile(0.5 * width * w, j.size)
    return j, nodes, weights


_PANEL_PHI = {}


def _phi_on_panels(j, nodes, level, order, cfg):
    """Phi at the panel nodes, computed once per (h, tolerance, panel)."""
    cache = _PANEL_PHI.setdefault((cfg.hbar, cfg.quad.rel_tol, level, order), {})
    missing = [i for i, jj in enumerate(j) if jj not in cache]
    if missing:
        idx = (np.asarray(missing)[:, None] * order + np.arange(order)[None, :]).ravel()
        vals = np.exp(log_phi_many(nodes[idx], cfg.hbar, cfg.quad)).reshape(-1, order)
        for i, row in zip(missing, vals):
            cache[j[i]] = row
    return np.concatenate([cache[jj] for jj in j])


def _k_sum(nodes, weights, fx, zs, hbar, block=512):
    g = weights * fx
    out = np.empty(zs.size, dtype=complex)
    c = 1j / (2 * math.pi * hbar)
    for i in range(0, zs.size, block):
        zb = zs[i: i + block]
        out[i: i + block] = np.exp(c * np.outer(zb, nodes)) @ g
    return out


def apply_K_to_W(v, z_points, cfg, order=16, max_panels=1 << 14, return_error=False):
    """K v at arbitrary complex points, by composite Gauss-Legendre in x.

    The number of panels is doubled until two successive rules agree to
    ``cfg.quad.rel_tol`` relative to the largest value, or until their
    difference is at the rounding level of the integrand; Phi is only ever
    evaluated on the real line.
    """
    zs = np.atleast_1d(np.asarray(z_points, dtype=complex))
    shape = np.shape(z_points)
    if not v:
        out = np.zeros(zs.size, dtype=complex)
        return (out.reshape(shape), 0.0) if return_error else out.reshape(shape)
    hbar = cfg.hbar
    lo, hi = _w_interval(v, zs, hbar)
    freq = (float(np.abs(zs.real).max()) + max(abs(lo), abs(hi))) / (2 * math.pi * hbar)
    freq += max(abs(t.b.imag) for t in v.terms)
    level = max(0, int(math.ceil(math.log2(max(freq, 1e-9) / math.pi))))
    prev = None
    while True:
        j, nodes, weights = _panel_nodes(lo, hi, level, order)
        fx = wspace.evaluate(v, nodes) * _phi_on_panels(j, nodes, level, order, cfg)
        cur = _k_sum(nodes, weights, fx, zs, hbar)
        if prev is not None:
            err = float(np.abs(cur - prev).max())
            if err <= cfg.quad.rel_tol * float(np.abs(cur).max()):
                break
            # where K v is small against int |v| e^{-x Im z/(2 pi h)} only
            # rounding-level absolute accuracy is attainable
            mag = np.abs(weights * fx)
            l1 = max(float(mag @ np.exp(-nodes * y / (2 * math.pi * hbar)))
                     for y in np.unique(zs.imag))
            if err <= ROUNDING * l1:
                break
        if j.size * 2 > max_panels:
            raise QuadratureNonConvergence(
                f"K quadrature did not settle with {j.size} panels on [{lo}, {hi}]"
            )
        prev = cur
        level += 1
    out = (cfg.factor * cur).reshape(shape)
    return (out, cfg.factor * err) if return_error else out


def norm_ratio(v, cfg, dz=0.125, block=64.0, tail_tol=1e-9):
    """||K v|| / ||v|| with K v integrated over an automatically grown range.

    K v is sampled on z = k dz; the range grows by ``block`` on each side until
    the outermost block carries less than ``tail_tol`` of the squared norm.
    """
    nv = wspace.norm(v)
    if nv < 1e-10:
        raise DegenerateSample("sample has (numerically) zero norm")
    half = block
    total = 0.0
    zs = np.arange(-half, half, dz)
    vals = apply_K_to_W(v, zs, cfg)
    total = dz * float(np.sum(np.abs(vals) ** 2))
    while True:
        left = np.arange(-half - block, -half, dz)
        right = np.arange(half, half + block, dz)
        new = apply_K_to_W(v, np.concatenate([left, right]), cfg)
        extra = dz * float(np.sum(np.abs(new) ** 2))
        total += extra
        half += block
        if extra <= tail_tol * total:
            return math.sqrt(total) / nv
        if half > 4096:
            raise QuadratureNonConvergence("K v does not decay on |z| < 4096")


# -- K on a uniform grid -----------------------------------------------------------

def _check_leak(values, tol, edge=8):
    peak = np.abs(values).max(axis=0)
    edge_max = np.maximum(np.abs(values[:edge]).max(axis=0), np.abs(values[-edge:]).max(axis=0))
    bad = edge_max > tol * np.maximum(peak, 1e-300)
    if np.any(bad):
        ratio = float((edge_max / np.maximum(peak, 1e-300)).max())
        raise BoundaryLeak(f"grid function is {ratio:.3e} of its peak at the edges")


def _k_direct(g, spec, hbar, block=256):
    x = spec.points
    c = 1j / (2 * math.pi * hbar)
    out = np.empty_like(g)
    for i in range(0, spec.size, block):
        out[i: i + block] = np.exp(c * np.outer(x[i: i + block], x)) @ g
    return out


def _k_chirp(g, spec, hbar):
    # x_k z_j = L^2 - L d (j + k) + d^2 (j^2 + k^2 - (j - k)^2) / 2
    N = spec.size
    L, d = spec.half_width, spec.spacing
    c = 1 / (2 * math.pi * hbar)
    beta = d * d * c
    k = np.arange(N)
    lin = np.exp(1j * (beta * 0.5 * k * k - L * d * c * k))
    m = np.arange(-(N - 1), N)
    chirp = np.exp(-0.5j * beta * (m * m))
    M = 1 << int(math.ceil(math.log2(3 * N - 2)))
    a = np.zeros((M,) + g.shape[1:], dtype=complex)
    a[:N] = g * lin.reshape((N,) + (1,) * (g.ndim - 1))
    kern = np.zeros(M, dtype=complex)
    kern[: 2 * N - 1] = chirp
    conv = np.fft.ifft(np.fft.fft(a, axis=0) * np.fft.fft(kern).reshape((M,) + (1,) * (g.ndim - 1)), axis=0)
    res = conv[N - 1: 2 * N - 1]
    post = np.exp(1j * c * L * L) * lin
    return res * post.reshape((N,) + (1,) * (g.ndim - 1))


def apply_K_grid_batch(values, spec, cfg, method="fast"):
    """K applied to the columns of an (N, m) array of grid values."""
    values = np.asarray(values, dtype=complex)
    _check_leak(values, cfg.leak_tol)
    phi = phi_table(spec.points, cfg)
    g = values * (phi * spec.spacing).reshape((spec.size,) + (1,) * (values.ndim - 1))
    if method == "direct":
        out = _k_direct(g, spec, cfg.hbar)
    elif method == "fast":
        out = _k_chirp(g, spec, cfg.hbar)
    else:
        raise ValueError(f"unknown method {method!r}")
    return cfg.factor * out


def apply_K_grid(f, cfg, method="direct"):
    """(K f)(z_j) = sum_k f(x_k) Phi(x_k) exp(i x_k z_j / (2 pi h)) dx on the same grid."""
    return GridFunction(f.spec, apply_K_grid_batch(f.values, f.spec, cfg, method))


# -- identity checks ------------------------------------------------------------

def _rel_l2(lhs, rhs):
    den = float(np.linalg.norm(rhs))
    if den == 0:
        return 0.0 if not np.any(lhs) else math.inf
    return float(np.linalg.norm(lhs - rhs)) / den


def _residual_grid(spec):
    return spec.points


def intertwine_basic(idx, w, cfg, spec=GridSpec(10.0, 256)):
    """Relative L^2 residual, on the points of ``spec``, of one basic identity.

    1: K (1 + qY) X w = Y K w
    2: K Y^-1 w = X K w
    3: K X^-1 w = Y^-1 (1 + q X^-1) K w
    """
    h = cfg.hbar
    q = cmath.exp(1j * math.pi * h)
    s = 2j * math.pi * h
    z = _residual_grid(spec)
    if idx == 1:
        xw = wspace.op_X(w, h)
        lhs = apply_K_to_W(xw + wspace.op_Y(xw).scale(q), z, cfg)
        rhs = np.exp(z) * apply_K_to_W(w, z, cfg)
    elif idx == 2:
        lhs = apply_K_to_W(wspace.op_Y(w, -1), z, cfg)
        rhs = apply_K_to_W(w, z + s, cfg)
    elif idx == 3:
        lhs = apply_K_to_W(wspace.op_X(w, h, -1), z, cfg)
        rhs = np.exp(-z) * (apply_K_to_W(w, z, cfg) + q * apply_K_to_W(w, z - s, cfg))
    else:
        raise ValueError(f"basic identity index must be 1, 2 or 3, got {idx}")
    return _rel_l2(lhs, rhs)


def _act_on_image(u, w, z, cfg, vee):
    """(u acting on K w)(z) for a normal-ordered u, via shifted evaluations."""
    h = cfg.hbar
    if vee:
        q, step, ypow = cmath.exp(1j * math.pi / h), 2j * math.pi, 1 / h
    else:
        q, step, ypow = cmath.exp(1j * math.pi * h), 2j * math.pi * h, 1.0
    out = np.zeros(z.shape, dtype=complex)
    cache = {}
    for (m, n), c in u.c.items():
        if m not in cache:
            cache[m] = apply_K_to_W(w, z + m * step, cfg)
        # X^m Y^n g (z) = exp(n ypow (z + m step)) g(z + m step)
        out += c.at(q) * np.exp(n * ypow * (z + m * step)) * cache[m]
    return out


def intertwine_general(A, w, cfg, spec=GridSpec(10.0, 256)):
    """Residual of K gamma(A) w = A K w for A in the Laurent domain of gamma.

    ``A`` is a QT2Element (acting on the q side) or a ModularDoubleElement
    ``left (x) right``.  gamma(A) is formed exactly; its action on w is
    exact; the right side evaluates K w at the shifted arguments required by
    the X-type operators.  Raises NonMember outside the domain of gamma.
    """
    if isinstance(A, QT2Element):
        A = ModularDoubleElement(A, QT2Element.one())
    gA = ModularDoubleElement(apply_gamma_q(A.left), apply_gamma_q(A.right))
    z = _residual_grid(spec)
    lhs = apply_K_to_W(wspace.apply_element(gA, w, cfg.hbar), z, cfg)
    if A.right == QT2Element.one():
        rhs = _act_on_image(A.left, w, z, cfg, vee=False)
    elif A.left == QT2Element.one():
        rhs = _act_on_image(A.right, w, z, cfg, vee=True)
    else:
        # the two sides commute; act with the right factor inside the left one
        rhs = np.zeros(z.shape, dtype=complex)
        h = cfg.hbar
        q = cmath.exp(1j * math.pi * h)
        for (m, n), c in A.left.c.items():
            zz = z + 2j * math.pi * h * m
            rhs += c.at(q) * np.exp(n * zz) * _act_on_image(A.right, w, zz, cfg, vee=True)
    return _rel_l2(lhs, rhs)


# -- pentagon --------------------------------------------------------------------

@dataclass
class PentagonResult:
    lam: complex
    max_residual: float
    spread: float
    lambdas: list
    residuals: list

    @property
    def abs_dev(self):
        return abs(abs(self.lam) - 1)


def sample_functions(count=5, a=1.0):
    """Hermite functions H_n(x) exp(-a x^2/2), n < count."""
    return [wspace.hermite_gaussian(n, a=a) for n in range(count)]


def random_wvector(rng, max_terms=2, max_deg=2, width=(0.6, 1.6), imag_b=1.0):
    """Random test vector: 1..max_terms Gaussians with random polynomial parts."""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        a = float(rng.uniform(*width))
        b = complex(rng.uniform(-1, 1), rng.uniform(-imag_b, imag_b))
        deg = int(rng.integers(0, max_deg + 1))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        terms.append(wspace.GaussianTerm(a, b, tuple(coeffs)))
    return wspace.WVector(terms)


def pentagon_check(samples, cfg, spec=GridSpec(), method="fast"):
    """Fit K^5 v = lambda v for each sample with the unitary normalization of K.

    The first application integrates the exact sample; the remaining four act
    on the grid.  Returns mean lambda, the largest relative fit residual and
    the relative spread of the per-sample lambdas.
    """
    if len(samples) < 3:
        raise ValueError("pentagon check needs at least three samples")
    for v in samples:
        if wspace.norm(v) < 1e-10:
            raise DegenerateSample("sample has (numerically) zero norm")
    G = wspace.gram_matrix(samples)
    if np.linalg.matrix_rank(G, tol=1e-10 * np.abs(G).max()) < 3:
        raise DegenerateSample("samples span fewer than three dimensions")
    if not cfg.rescale:
        raise ValueError("pentagon check uses the unitary normalization")
    x = spec.points
    orig = np.stack([wspace.evaluate(v, x) for v in samples], axis=1)
    cur = np.stack([apply_K_to_W(v, x, cfg) for v in samples], axis=1)
    for _ in range(4):
        cur = apply_K_grid_batch(cur, spec, cfg, method)
    lambdas, residuals = [], []
    for i in range(len(samples)):
        v, k5 = orig[:, i], cur[:, i]
        lam = complex(np.vdot(v, k5) / np.vdot(v, v))
        lambdas.append(lam)
        residuals.append(float(np.linalg.norm(k5 - lam * v) / np.linalg.norm(v)))
    lam_mean = complex(np.mean(lambdas))
    spread = max(abs(p - r) for p in lambdas for r in lambdas) / abs(lam_mean)
    return PentagonResult(lam_mean, max(residuals), spread, lambdas, residuals)


# The Hermite samples decay to about 3e-6 of their peak at the default grid
# edge; anything above this bound would mean the grid is too short.
PENTAGON_LEAK_TOL = 1e-5


def pentagon_report(hbar, spec=GridSpec(), rel_tol=1e-10, method="fast", timings=False,
                    leak_tol=PENTAGON_LEAK_TOL):
    """JSON-ready summary of one pentagon run."""
    cfg = KConfig(hbar, QuadratureConfig(rel_tol=rel_tol), leak_tol=leak_tol)
    t0 = time.perf_counter()
    res = pentagon_check(sample_functions(), cfg, spec, method)
    out = {
        "hbar": hbar,
        "grid": {"L": spec.half_width, "N": spec.size},
        "lambda": [res.lam.real, res.lam.imag],
        "abs_lambda": abs(res.lam),
        "spread": res.spread,
        "residuals": {"max_fit": res.max_residual, "abs_lambda_minus_1": res.abs_dev},
    }
    if timings:
        out["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    return out
