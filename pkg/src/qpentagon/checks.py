"""Verification suites, one record per acceptance criterion.

Each suite takes a :class:`RunConfig` and returns a list of
:class:`CriterionResult`.  The records are plain data so that the command
line can serialise them as JSON, CSV or Markdown; wall-clock times are kept
separate from the measured values so that reports without timings are
byte-for-byte reproducible.
"""

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cluster, kop, moduli, qtorus, specfun, wspace

__all__ = [
    "RunConfig",
    "CriterionResult",
    "SUITES",
    "CRITERIA",
    "run_suite",
    "suite_phi",
    "suite_intertwine",
    "suite_pentagon",
    "suite_cluster",
    "suite_qtorus",
    "suite_moduli",
]


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; equal configs give equal reports."""

    hbars: tuple = (0.3, 1.0, 2.7)
    kop_hbars: tuple = (0.5, 0.8, 1.3)
    unitarity_hbars: tuple = (0.5, 1.0, 1.7)
    pentagon_hbars: tuple = (1.0,)
    grid_size: int = 4096
    grid_half_width: float = 40.0
    refine: bool = True
    rel_tol: float = 1e-12
    kop_rel_tol: float = 1e-10
    refined_rel_tol: float = 1e-12
    cluster_range: int = 8
    gamma_range: int = 50
    product_range: int = 5
    qtorus_range: int = 6
    symmetrization_range: int = 4
    degree_bound: int = 2
    seed: int = 0

    def __post_init__(self):
        for name in ("rel_tol", "kop_rel_tol", "refined_rel_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("hbars", "kop_hbars", "unitarity_hbars", "pentagon_hbars"):
            if any(not h > 0 for h in getattr(self, name)):
                raise ValueError(f"{name} must be positive")
        if self.grid_size < 16 or self.grid_half_width <= 0:
            raise ValueError("grid must have at least 16 points and positive width")

    @property
    def quad(self):
        return specfun.QuadratureConfig(rel_tol=self.rel_tol)

    def rng(self, stream):
        return np.random.default_rng([self.seed, stream])


@dataclass
class CriterionResult:
    suite: str
    criterion_id: int
    name: str
    measured: dict
    threshold: float
    passed: bool
    runtime_ms: float = 0.0
    notes: dict = field(default_factory=dict)

    def record(self, timings=False):
        out = {
            "suite": self.suite,
            "criterion_id": self.criterion_id,
            "name": self.name,
            "measured": self.measured,
            "threshold": self.threshold,
            "pass": self.passed,
        }
        if self.notes:
            out["notes"] = self.notes
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


class _Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1000 * (time.perf_counter() - self.t0)


def _f(x):
    """JSON-stable float."""
    return float(x)


# -- Phi -------------------------------------------------------------------------

def check_difference(cfg):
    rng = cfg.rng(1)
    worst = {}
    with _Timer() as t:
        for h in cfg.hbars:
            x = rng.uniform(-5, 5, 100)
            r1, r2 = specfun.difference_residuals(x, h, cfg.quad)
            worst[str(h)] = _f(max(r1.max(), r2.max()))
    m = max(worst.values())
    return CriterionResult("phi", 1, "difference equations", {"max_residual": m, "per_hbar": worst},
                           1e-9, m < 1e-9, t.ms)


def check_unit_modulus(cfg):
    rng = cfg.rng(2)
    worst = {}
    with _Timer() as t:
        for h in cfg.hbars:
            x = rng.uniform(-10, 10, 100)
            worst[str(h)] = _f(np.abs(np.abs(specfun.phi_many(x, h, cfg.quad)) - 1).max())
    m = max(worst.values())
    return CriterionResult("phi", 2, "unit modulus on the real line", {"max_deviation": m, "per_hbar": worst},
                           1e-10, m < 1e-10, t.ms)


def check_product(cfg, hbar=0.8 + 0.3j):
    rng = cfg.rng(3)
    params = specfun.PhiParams(hbar)
    worst = 0.0
    with _Timer() as t:
        for _ in range(20):
            z = complex(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5))
            a = specfun.phi_integral(z, params, cfg.quad)
            b = specfun.phi_product(z, params)
            worst = max(worst, abs(a - b) / abs(b))
    return CriterionResult("phi", 3, "integral against product", {"max_rel_diff": _f(worst), "hbar": [0.8, 0.3]},
                           1e-8, worst < 1e-8, t.ms)


def check_duality(cfg, hbars=(0.6, 1.9)):
    rng = cfg.rng(4)
    worst = 0.0
    with _Timer() as t:
        for i in range(20):
            h = hbars[i % len(hbars)]
            z = complex(rng.uniform(-3, 3), rng.uniform(-1.5, 1.5))
            worst = max(worst, specfun.duality_residual(z, h, cfg.quad) / abs(specfun.phi_integral(z, h, cfg.quad)))
    return CriterionResult("phi", 4, "modular duality", {"max_rel_residual": _f(worst)},
                           1e-9, worst < 1e-9, t.ms)


def check_asymptotics(cfg, hbars=(0.1, 0.05, 0.025), zs=(-1.0, 0.3, 1.0)):
    table = {}
    ok = True
    with _Timer() as t:
        for z in zs:
            r = specfun.asymptotic_residual(z, hbars, cfg.quad)
            table[str(z)] = [_f(v) for v in r]
            ok &= all(b < a for a, b in zip(r, r[1:]))
    return CriterionResult("phi", 5, "semiclassical asymptotics", {"residuals": table, "hbar": list(hbars)},
                           0.0, bool(ok), t.ms, {"pass_rule": "strictly decreasing in hbar"})


def suite_phi(cfg):
    return [check_difference(cfg), check_unit_modulus(cfg), check_product(cfg),
            check_duality(cfg), check_asymptotics(cfg)]


# -- the operator K -----------------------------------------------------------------

def check_unitarity(cfg):
    rng = cfg.rng(6)
    worst = {}
    with _Timer() as t:
        vecs = [kop.random_wvector(rng) for _ in range(10)]
        for h in cfg.unitarity_hbars:
            kc = kop.KConfig(h, specfun.QuadratureConfig(rel_tol=cfg.kop_rel_tol))
            worst[str(h)] = _f(max(abs(kop.norm_ratio(v, kc) - 1) for v in vecs))
    m = max(worst.values())
    return CriterionResult("intertwine", 6, "unitarity of the rescaled K", {"max_deviation": m, "per_hbar": worst},
                           1e-6, m < 1e-6, t.ms)


def intertwine_vectors(rng, count=5):
    # narrow Gaussians keep the exp(2 pi^2 hbar^2 a) growth of X w moderate
    return [kop.random_wvector(rng, width=(0.2, 0.5), imag_b=0.5) for _ in range(count)]


def check_basic_identities(cfg):
    rng = cfg.rng(7)
    worst = {}
    with _Timer() as t:
        for h in cfg.kop_hbars:
            kc = kop.KConfig(h, specfun.QuadratureConfig(rel_tol=cfg.kop_rel_tol))
            ws = intertwine_vectors(rng)
            worst[str(h)] = [_f(max(kop.intertwine_basic(i, w, kc) for w in ws)) for i in (1, 2, 3)]
    m = max(max(v) for v in worst.values())
    return CriterionResult("intertwine", 7, "three basic intertwining identities",
                           {"max_residual": m, "per_hbar": worst}, 1e-6, m < 1e-6, t.ms)


def general_intertwining(cfg, points=((1, 0), (0, 1), (-1, 1), (1, -1), (2, -1))):
    """Residuals of K gamma(A) w = A K w for a few canonical basis elements (reported only)."""
    w = wspace.gaussian(0.3)
    out = {}
    for h in cfg.kop_hbars:
        kc = kop.KConfig(h, specfun.QuadratureConfig(rel_tol=cfg.kop_rel_tol))
        out[str(h)] = {f"{a},{b}": _f(kop.intertwine_general(qtorus.canonical_IAq((a, b)), w, kc))
                       for a, b in points}
    return out


def suite_intertwine(cfg):
    return [check_unitarity(cfg), check_basic_identities(cfg)]


# -- pentagon -------------------------------------------------------------------

def check_pentagon(cfg):
    spec = kop.GridSpec(cfg.grid_half_width, cfg.grid_size)
    runs = {}
    ok = True
    with _Timer() as t:
        for h in cfg.pentagon_hbars:
            base = kop.pentagon_report(h, spec, cfg.kop_rel_tol)
            row = {"base": _pentagon_metrics(base)}
            good = all(v < 1e-3 for v in row["base"].values())
            if cfg.refine:
                fine = kop.pentagon_report(h, spec.doubled("spacing"), cfg.refined_rel_tol)
                row["refined"] = _pentagon_metrics(fine)
                good &= all(row["refined"][k] < row["base"][k] for k in row["base"])
            row["lambda"] = base["lambda"]
            runs[str(h)] = row
            ok &= good
    notes = {"pass_rule": "all metrics < 1e-3 and each decreases under refinement"}
    return CriterionResult("pentagon", 8, "pentagon relation", runs, 1e-3, bool(ok), t.ms, notes)


def _pentagon_metrics(rep):
    return {
        "abs_lambda_minus_1": _f(rep["residuals"]["abs_lambda_minus_1"]),
        "fit_residual": _f(rep["residuals"]["max_fit"]),
        "spread": _f(rep["spread"]),
    }


def suite_pentagon(cfg):
    return [check_pentagon(cfg)]


# -- classical cluster ------------------------------------------------------------------

def _point_orbit_ok(rng):
    x = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
    y = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
    p = (x, y)
    for _ in range(5):
        p = cluster.gamma_X_point(*p)
    return p == (x, y)


def check_cluster(cfg):
    rng = cfg.rng(9)
    with _Timer() as t:
        g = cfg.gamma_range
        gamma5 = 0
        for p in cluster.box(g):
            q = p
            for _ in range(5):
                q = cluster.tropical_gamma(q)
            gamma5 += q != p
        points = sum(not _point_orbit_ok(rng) for _ in range(100))
        sweep = cluster.box(cfg.cluster_range)
        equiv = sum(not cluster.equivariance_check(p) for p in sweep)
        pos = sum(not cluster.positivity_check(p) for p in sweep)
        lead = sum(not cluster.leading_monomial_check(p) for p in sweep)
        overlap = sum(not cluster.overlap_check(p) for p in sweep)
        prod_box = cluster.box(cfg.product_range)
        closes = 0
        positive_constants = True
        for i, p in enumerate(prod_box):
            for p2 in prod_box[i:]:
                sc = cluster.multiply_in_basis_classical(p, p2)
                recon = None
                for r, c in sc.items():
                    term = c * cluster.canonical_IA(r)
                    recon = term if recon is None else recon + term
                closes += recon != cluster.canonical_IA(p) * cluster.canonical_IA(p2)
                positive_constants &= all(c > 0 for c in sc.values())
    failures = {"gamma5": gamma5, "point_map_order5": points, "equivariance": equiv,
                "positivity": pos, "leading_monomial": lead, "overlap": overlap,
                "multiplication_closure": closes}
    notes = {"structure_constants_positive": bool(positive_constants)}
    return CriterionResult("cluster", 9, "classical canonical basis", {"failures": failures}, 0.0,
                           not any(failures.values()), t.ms, notes)


def suite_cluster(cfg):
    return [check_cluster(cfg)]


# -- quantum torus ----------------------------------------------------------------------

def _rel_err(a, b):
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))


def clock_shift_errors(N, pairs, alpha=2.0, beta=3.0):
    q, X, Y = qtorus.clock_shift_generators(N, alpha, beta)
    eye = np.eye(N)
    XN = np.linalg.matrix_power(X, N)
    YN = np.linalg.matrix_power(Y, N)
    central = max(_rel_err(XN @ M, M @ XN) for M in (X, Y))
    central = max(central, *(_rel_err(YN @ M, M @ YN) for M in (X, Y)))
    scalar = max(_rel_err(XN, alpha * eye), _rel_err(YN, beta * eye))
    algebra = 0.0
    for u, v in pairs:
        lhs = qtorus.clock_shift_model(u * v, N, alpha, beta)
        rhs = qtorus.clock_shift_model(u, N, alpha, beta) @ qtorus.clock_shift_model(v, N, alpha, beta)
        algebra = max(algebra, _rel_err(lhs, rhs))
    relation = _rel_err(X @ Y, q * q * Y @ X)
    return {"relation": relation, "central": central, "scalar": scalar, "algebra_map": algebra}


def check_qtorus(cfg):
    with _Timer() as t:
        sweep = cluster.box(cfg.qtorus_range)
        star_bad = equiv_bad = order_bad = spec_bad = pos_bad = 0
        for p in sweep:
            I = qtorus.canonical_IAq(p)
            star_bad += qtorus.star(I) != I
            spec_bad += qtorus.specialize_q1(I) != cluster.canonical_IA(p)
            equiv_bad += qtorus.apply_gamma_q(qtorus.canonical_IAq(cluster.tropical_gamma(p))) != I
            u = I
            positive = True
            for _ in range(5):
                positive &= all(v.is_nonnegative() for v in u.c.values())
                u = qtorus.apply_gamma_q(u)
            pos_bad += not positive
            order_bad += u != I
        pts = [(1, -1), (2, 1), (-1, 2), (0, -2), (3, 0)]
        pairs = [(qtorus.canonical_IAq(a), qtorus.canonical_IAq(b)) for a in pts for b in pts]
        clock = {str(N): clock_shift_errors(N, pairs) for N in (5, 7, 9)}
    clock_max = max(max(v.values()) for v in clock.values())
    failures = {"star_invariance": star_bad, "q_equivariance": equiv_bad, "gamma5": order_bad,
                "q1_specialization": spec_bad, "universal_positivity": pos_bad}
    measured = {"failures": failures, "clock_shift": clock, "clock_shift_max": clock_max}
    ok = not any(failures.values()) and clock_max < 1e-12
    notes = {"termwise_symmetrization_mismatches": termwise_mismatches(cfg.symmetrization_range),
             "negative_structure_constants": negative_structure_constants(2)}
    return CriterionResult("qtorus", 10, "quantum torus and canonical basis", measured, 1e-12, ok, t.ms, notes)


def termwise_mismatches(radius):
    """Points where q-symmetrising each classical monomial differs from I^q (reported only)."""
    return [list(p) for p in cluster.box(radius)
            if qtorus.termwise_symmetrization(cluster.canonical_IA(p)) != qtorus.canonical_IAq(p)]


def negative_structure_constants(radius):
    """Pairs whose q-structure constants have a negative coefficient (reported only)."""
    box = cluster.box(radius)
    return [[list(p), list(p2)] for p in box for p2 in box
            if not all(c.is_nonnegative() for c in qtorus.multiply_in_basis_q(p, p2).values())]


def suite_qtorus(cfg):
    return [check_qtorus(cfg)]


# -- moduli --------------------------------------------------------------------------------

def check_moduli(cfg):
    rng = random.Random(cfg.seed * 7919 + 11)
    with _Timer() as t:
        cr_bad = 0
        n_quad = 0
        while n_quad < 100:
            xs = [moduli.ProjPoint.of(Fraction(rng.randint(-50, 50), rng.randint(1, 9))) for _ in range(4)]
            if rng.random() < 0.2:
                xs[rng.randrange(4)] = moduli.INF
            if len(set(xs)) < 4:
                continue
            n_quad += 1
            r = moduli.cross_ratio(*xs)
            cr_bad += moduli.cross_ratio(xs[1], xs[2], xs[3], xs[0]) != 1 / r
            cr_bad += moduli.cross_ratio(xs[0], xs[2], xs[1], xs[3]) != -1 - r
        plk_bad = 0
        steps = 0
        for _ in range(50):
            m = moduli.random_chord_monomial(rng)
            trace = []
            red = moduli.pluecker_reduce([m], trace)
            steps += len(trace)
            vc = moduli.random_vector_config(rng)
            plk_bad += m.evaluate(vc) != sum(r.evaluate(vc) for r in red)
            plk_bad += not all(r.is_regular() and r.has_valid_signs() for r in red)
            plk_bad += not all(b < a for a, after in trace for b in after)
        chart_bad = 0
        for _ in range(200):
            conf = moduli.random_config(rng)
            charts = moduli.charts_containing(conf)
            chart_bad += not charts
            for c in charts:
                X, Y = moduli.chart_coordinates(conf, c)
                chart_bad += not moduli.same_configuration(moduli.psi_c(X, Y, c), conf)
        ind = moduli.independence_check(cfg.degree_bound, seed=cfg.seed)
    failures = {"cross_ratio": cr_bad, "pluecker": plk_bad, "chart_coverage": chart_bad,
                "rank_deficit": ind["distinct"] - ind["rank"]}
    measured = {"failures": failures, "pluecker_steps": steps, "independence": ind}
    return CriterionResult("moduli", 11, "moduli of five points", measured, 0.0,
                           not any(failures.values()), t.ms)


def suite_moduli(cfg):
    return [check_moduli(cfg)]


SUITES = {
    "phi": suite_phi,
    "intertwine": suite_intertwine,
    "pentagon": suite_pentagon,
    "cluster": suite_cluster,
    "qtorus": suite_qtorus,
    "moduli": suite_moduli,
}

CRITERIA = {1: "phi", 2: "phi", 3: "phi", 4: "phi", 5: "phi", 6: "intertwine", 7: "intertwine",
            8: "pentagon", 9: "cluster", 10: "qtorus", 11: "moduli", 12: "report"}


def run_suite(name, cfg):
    return SUITES[name](cfg)
