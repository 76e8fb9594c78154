"""Adaptive composite Gauss-Legendre quadrature for batched integrands.

The integrand receives a 1-D array of nodes and returns either an array of
the same length or an array of shape ``(len(nodes), m)`` when a whole batch
of integrals shares one set of panels.  Panels are accepted when the
difference between the rule on the panel and the rule on its two halves is
below the share of the absolute tolerance proportional to the panel width,
or when that difference is already at the rounding level of the panel.
"""

from functools import lru_cache

import numpy as np

from .errors import QuadratureNonConvergence

# difference between two rules that is indistinguishable from rounding
ROUNDING = 64 * np.finfo(float).eps


@lru_cache(maxsize=None)
def gauss_legendre_rule(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def _panel_sums(f, a, b, order):
    """Rule value and rule applied to |f| on every panel."""
    x, w = gauss_legendre_rule(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes))
    vals = vals.reshape((a.size, order) + vals.shape[1:])
    wshape = (1, order) + (1,) * (vals.ndim - 2)
    hshape = (a.size,) + (1,) * (vals.ndim - 2)
    wr = w.reshape(wshape)
    hr = half.reshape(hshape)
    return hr * np.sum(vals * wr, axis=1), hr * np.sum(np.abs(vals) * wr, axis=1)


def adaptive_gauss(f, edges, atol, order=16, max_panels=20000):
    """Integrate ``f`` over ``[edges[0], edges[-1]]``.

    ``edges`` gives the initial panel breakpoints.  Returns ``(value,
    error_estimate)``; for batched integrands both are arrays over the batch
    and the acceptance test uses the largest error in the batch.

    Raises QuadratureNonConvergence when more than ``max_panels`` panels
    would be needed.
    """
    edges = np.asarray(edges, dtype=float)
    length = edges[-1] - edges[0]
    a = edges[:-1].copy()
    b = edges[1:].copy()
    total = None
    err_total = None
    n_panels = a.size
    while a.size:
        mid = 0.5 * (a + b)
        coarse, _ = _panel_sums(f, a, b, order)
        left, left_abs = _panel_sums(f, a, mid, order)
        right, right_abs = _panel_sums(f, mid, b, order)
        fine = left + right
        diff = np.abs(fine - coarse)
        err = diff.reshape(a.size, -1).max(axis=1)
        ok = err <= atol * (b - a) / length
        # panels already at rounding level cannot improve by splitting
        noise = (left_abs + right_abs).reshape(a.size, -1).max(axis=1)
        ok |= err <= ROUNDING * noise
        ok |= (b - a) < 1e-12 * max(1.0, abs(length))
        acc = fine[ok].sum(axis=0)
        acc_err = diff[ok].sum(axis=0)
        total = acc if total is None else total + acc
        err_total = acc_err if err_total is None else err_total + acc_err
        a, b, m = a[~ok], b[~ok], mid[~ok]
        if a.size:
            a, b = np.concatenate([a, m]), np.concatenate([m, b])
            n_panels += a.size // 2
            if n_panels > max_panels:
                raise QuadratureNonConvergence(
                    f"panel budget {max_panels} exhausted; "
                    f"largest panel error {err.max():.3e} vs atol {atol:.3e}"
                )
    return total, err_total
