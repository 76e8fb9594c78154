"""The quantum dilogarithm and the functional identities it satisfies.

``Phi^hbar(z) = exp(-1/4 * I(z))`` where

    I(z) = int_Omega exp(-i p z) / (sh(pi p) sh(pi hbar p)) dp / p

and ``Omega`` runs along the real axis with a small upper half circle over
``p = 0``.  Pairing ``p`` with ``-p`` turns the straight pieces into

    int_r^T -2i sin(t z) / (t sh(pi t) sh(pi hbar t)) dt,

which is what the quadrature integrates; the half circle is integrated in
its angle.  The exponent ``-I/4`` is returned by :func:`log_phi` so that
callers never take ``log`` of an exponential.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchCut, DivergentProduct, PoleHit, StripViolation
from .quadrature import adaptive_gauss

__all__ = [
    "PhiParams",
    "QuadratureConfig",
    "phi_integral",
    "log_phi",
    "log_phi_many",
    "phi_many",
    "psi_q",
    "phi_product",
    "dilog_L2",
    "asymptotic_residual",
    "zero_location",
    "pole_location",
    "duality_residual",
    "difference_residuals",
    "log_phi_at_zero",
]


@dataclass(frozen=True)
class PhiParams:
    """Planck parameter with the two derived quantum parameters."""

    hbar: complex

    def __post_init__(self):
        h = complex(self.hbar)
        if h.imag == 0 and h.real <= 0:
            raise ValueError(f"real hbar must be positive, got {self.hbar}")
        if h.imag < 0:
            raise ValueError(f"hbar must have Im hbar >= 0, got {self.hbar}")
        if h.real <= 0:
            raise ValueError(f"hbar must have Re hbar > 0, got {self.hbar}")
        object.__setattr__(self, "hbar", h if h.imag else h.real)

    @property
    def q(self):
        return cmath.exp(1j * math.pi * self.hbar)

    @property
    def q_vee(self):
        return cmath.exp(1j * math.pi / self.hbar)

    @property
    def is_real(self):
        return isinstance(self.hbar, float)


def _params(hbar):
    return hbar if isinstance(hbar, PhiParams) else PhiParams(hbar)


@dataclass(frozen=True)
class QuadratureConfig:
    """Discretisation of the contour.

    ``semicircle_radius`` and ``truncation`` default to values derived from
    ``hbar`` and the argument (see :func:`_radius` and :func:`_truncation`).
    ``rel_tol`` bounds the relative error of Phi, i.e. the absolute error of
    its exponent.
    """

    semicircle_radius: float = None
    truncation: float = None
    rel_tol: float = 1e-12
    max_panels: int = 20000

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_panels <= 0:
            raise ValueError("max_panels must be positive")
        if self.semicircle_radius is not None and self.semicircle_radius <= 0:
            raise ValueError("semicircle_radius must be positive")
        if self.truncation is not None and self.truncation <= 0:
            raise ValueError("truncation must be positive")


DEFAULT_QUAD = QuadratureConfig()
CHUNK = 256


def strip_half_width(hbar):
    return math.pi * (1.0 + complex(hbar).real)


def _radius(params, cfg):
    limit = min(1.0, 1.0 / abs(params.hbar)) / 2
    if cfg.semicircle_radius is None:
        return limit / 2
    if cfg.semicircle_radius >= limit:
        raise ValueError(
            f"semicircle radius {cfg.semicircle_radius} must stay below {limit}"
        )
    return cfg.semicircle_radius


def _truncation(params, max_im, atol, r, cfg):
    if cfg.truncation is not None:
        return max(cfg.truncation, 2 * r)
    decay = strip_half_width(params.hbar) - max_im
    re_h = complex(params.hbar).real
    # |g(t)| <= 8 exp(-decay t) / (t (1 - e^{-2 pi t})(1 - e^{-2 pi Re(hbar) t}))
    t = max(1.0, 2 * r)
    while True:
        c = (1 - math.exp(-2 * math.pi * t)) * (1 - math.exp(-2 * math.pi * re_h * t))
        tail = 8 * math.exp(-decay * t) / (t * c * decay)
        if tail < 1e-3 * atol or t > 1e4:
            return t
        t *= 1.25


def _check_strip(z, params):
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    bound = strip_half_width(params.hbar)
    bad = np.abs(zs.imag) >= bound
    if np.any(bad):
        raise StripViolation(
            f"|Im z| = {np.abs(zs.imag).max():.6g} is outside the strip "
            f"|Im z| < {bound:.6g}"
        )
    return zs


def _segment_integrand(zs, hbar):
    pih = math.pi * (1 + hbar)

    def g(t):
        t = t[:, None]
        itz = 1j * t * zs[None, :]
        damp = -pih * t
        num = np.exp(-itz + damp) - np.exp(itz + damp)
        den = t * (-np.expm1(-2 * math.pi * t)) * (-np.expm1(-2 * math.pi * hbar * t))
        return 4 * num / den

    return g


def _semicircle_integrand(zs, hbar, r):
    # over Omega the half circle runs from -r to r, i.e. theta from pi to 0
    def h(theta):
        p = (r * np.exp(1j * theta))[:, None]
        vals = np.exp(-1j * p * zs[None, :]) / (np.sinh(np.pi * p) * np.sinh(np.pi * hbar * p))
        return -1j * vals

    return h


def _segment_edges(r, T, max_re):
    width = 1.0 if max_re == 0 else min(1.0, math.pi / max_re)
    edges = [r]
    x = r
    while 2 * x < min(1.0, T):
        x *= 2
        edges.append(x)
    n = max(1, int(math.ceil((T - edges[-1]) / width)))
    edges.extend(np.linspace(edges[-1], T, n + 1)[1:])
    return np.array(edges)


def _contour_integral(zs, params, cfg):
    """Return the contour integral I for every entry of ``zs``."""
    atol = 4 * cfg.rel_tol
    hbar = params.hbar
    r = _radius(params, cfg)
    max_im = float(np.abs(zs.imag).max())
    max_re = float(np.abs(zs.real).max())
    T = _truncation(params, max_im, atol, r, cfg)
    n_semi = max(4, int(math.ceil(r * max(max_re, max_im) / 2)) + 4)
    semi, _ = adaptive_gauss(
        _semicircle_integrand(zs, hbar, r),
        np.linspace(0.0, math.pi, n_semi + 1),
        atol / 2,
        max_panels=cfg.max_panels,
    )
    seg, _ = adaptive_gauss(
        _segment_integrand(zs, hbar),
        _segment_edges(r, T, max_re),
        atol / 2,
        max_panels=cfg.max_panels,
    )
    return semi + seg


def log_phi_many(z, hbar, cfg=DEFAULT_QUAD):
    """Exponent ``-I(z)/4`` of Phi for an array of arguments in the strip."""
    params = _params(hbar)
    zs = _check_strip(z, params)
    shape = np.shape(z)
    # chunks sorted by |Re z| keep memory bounded and let each chunk use the
    # coarsest panels its oscillation allows
    order = np.argsort(np.abs(zs.real), kind="stable")
    out = np.empty(zs.size, dtype=complex)
    for i in range(0, zs.size, CHUNK):
        idx = order[i: i + CHUNK]
        out[idx] = -0.25 * _contour_integral(zs[idx], params, cfg)
    return out.reshape(shape) if shape else complex(out[0])


def log_phi(z, hbar, cfg=DEFAULT_QUAD):
    return complex(log_phi_many(complex(z), hbar, cfg))


def phi_many(z, hbar, cfg=DEFAULT_QUAD):
    return np.exp(log_phi_many(z, hbar, cfg))


def phi_integral(z, params, cfg=DEFAULT_QUAD):
    """Phi^hbar(z) from the contour integral, relative error <= cfg.rel_tol."""
    return cmath.exp(log_phi(z, params, cfg))


def log_phi_at_zero(hbar):
    """Closed form of log Phi^hbar(0) from the residue at p = 0.

    At z = 0 the straight pieces cancel and the half circle picks up
    -i pi times the residue -(1 + hbar^2) / (6 hbar).
    """
    h = complex(hbar)
    return -1j * math.pi * (1 + h * h) / (24 * h)


def psi_q(x, q, n_max=None, rel_tol=1e-16, return_error=False):
    """Truncated product prod_{a=1}^{n_max} (1 + q^{2a-1} x)^{-1}.

    With ``return_error`` the bound on the neglected tail of the log-sum is
    returned as well.
    """
    x = complex(x)
    q = complex(q)
    aq = abs(q)
    if aq >= 1:
        raise DivergentProduct(f"|q| = {aq} >= 1")
    if n_max is None:
        if x == 0 or aq == 0:
            n_max = 1
        else:
            # tail sum_{a > n} |q|^{2a-1} |x| <= |q|^{2n+1} |x| / (1 - |q|^2)
            n = (math.log(rel_tol * (1 - aq * aq) / abs(x)) / math.log(aq) - 1) / 2
            n_max = max(1, int(math.ceil(n)) + 1)
    a = np.arange(1, n_max + 1)
    factors = 1 + q ** (2 * a - 1) * x
    if np.any(np.abs(factors) < 1e-14):
        k = int(np.argmin(np.abs(factors))) + 1
        raise PoleHit(f"factor 1 + q^{2 * k - 1} x vanishes")
    value = complex(np.exp(-np.sum(np.log(factors))))
    if return_error:
        tail = aq ** (2 * n_max + 1) * abs(x) / (1 - aq * aq)
        return value, tail
    return value


def phi_product(z, params, n_max=None):
    """Phi^hbar(z) = Psi^q(e^z) / Psi^{1/q_vee}(e^{z/hbar}), for Im hbar > 0."""
    params = _params(params)
    if complex(params.hbar).imag <= 0:
        raise DivergentProduct("the product expansion needs Im hbar > 0")
    z = complex(z)
    num = psi_q(cmath.exp(z), params.q, n_max)
    den = psi_q(cmath.exp(z / params.hbar), 1 / params.q_vee, n_max)
    return num / den


def _dilog_series(x, rel_tol):
    total = 0j
    power = 1 + 0j
    n = 1
    while True:
        power *= -x
        term = -power / (n * n)
        total += term
        if abs(term) < rel_tol * max(abs(total), 1e-300) or n > 10000:
            return total
        n += 1


def _dilog_quad(x, rel_tol):
    # t = s x on s in [0, 1]; the integrand tends to x at s = 0
    def f(s):
        u = s * x
        out = np.empty_like(u)
        small = np.abs(u) < 1e-8
        out[small] = x * (1 - u[small] / 2)
        out[~small] = np.log1p(u[~small]) / s[~small]
        return out

    val, _ = adaptive_gauss(f, np.linspace(0.0, 1.0, 9), rel_tol * max(1.0, abs(x)), order=20)
    return complex(val)


def dilog_L2(x, rel_tol=1e-14, method="auto"):
    """L2(x) = int_0^x log(1 + t) dt / t along the straight path from 0.

    ``method`` is ``"series"``, ``"quad"`` or ``"auto"`` (series for
    ``|x| <= 1/2``, quadrature otherwise).
    """
    x = complex(x)
    if x == 0:
        return 0j
    if x.imag == 0 and x.real <= -1:
        raise BranchCut(f"path from 0 to {x.real} crosses t <= -1")
    if method == "auto":
        method = "series" if abs(x) <= 0.5 else "quad"
    if method == "series":
        if abs(x) >= 1:
            raise ValueError("series needs |x| < 1")
        return _dilog_series(x, rel_tol)
    if method == "quad":
        return _dilog_quad(x, rel_tol)
    raise ValueError(f"unknown method {method!r}")


def asymptotic_residual(z, hbar_list, cfg=DEFAULT_QUAD):
    """|2 pi i hbar log Phi^hbar(z) - L2(e^z)| for each hbar.

    ``log Phi`` is the exponent itself, so the branch is the one continuous
    in hbar from the small-hbar end.
    """
    z = float(z)
    target = dilog_L2(math.exp(z))
    out = []
    for h in hbar_list:
        if not 0 < h <= 0.5:
            raise ValueError(f"hbar must lie in (0, 0.5], got {h}")
        out.append(abs(2j * math.pi * h * log_phi(z, h, cfg) - target))
    return out


def zero_location(m, n, hbar):
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    return 1j * math.pi * ((2 * m - 1) + (2 * n - 1) * hbar)


def pole_location(m, n, hbar):
    return -zero_location(m, n, hbar)


def duality_residual(z, hbar, cfg=DEFAULT_QUAD):
    """|Phi^hbar(z) - Phi^{1/hbar}(z/hbar)|."""
    if hbar == 1:
        return 0.0
    a = phi_integral(z, hbar, cfg)
    b = phi_integral(complex(z) / hbar, 1.0 / hbar, cfg)
    return abs(a - b)


def difference_residuals(x, hbar, cfg=DEFAULT_QUAD):
    """Relative residuals of both difference relations at real parts ``x``.

    The pair of points for the shift by 2 pi i hbar is placed at
    Im z = -pi hbar and +pi hbar, and for the shift by 2 pi i at -pi and
    +pi, so both lie in the strip for every hbar > 0.  Returns two arrays.
    """
    params = _params(hbar)
    x = np.asarray(x, dtype=float)
    h = params.hbar
    z1 = x - 1j * math.pi * h
    z2 = x - 1j * math.pi
    pts = np.concatenate([z1, z1 + 2j * math.pi * h, z2, z2 + 2j * math.pi])
    lp = log_phi_many(pts, params, cfg)
    n = x.size
    l1, l1s, l2, l2s = lp[:n], lp[n:2 * n], lp[2 * n:3 * n], lp[3 * n:]
    f1 = 1 + params.q * np.exp(z1)
    f2 = 1 + params.q_vee * np.exp(z2 / h)
    r1 = np.abs(np.exp(l1s - l1) / f1 - 1)
    r2 = np.abs(np.exp(l2s - l2) / f2 - 1)
    return r1, r2
