"""Seeded randomized property runs shared by the CLI and the test-suite."""

from dataclasses import dataclass

import numpy as np

from .div_measures import mass_summary, random_grid_graph
from .gauss_sphere import convex_quadratic_lift, elliptic_identity_check, envelope_bound_check, random_vertex_star
from .polyline import PolygonalCurve, curvature_report, polygonal_normal_variation

SUITES = ("envelope", "elliptic", "measures", "curves")


@dataclass(frozen=True)
class TrialSummary:
    suite: str
    trials: int
    seed: int
    violations: int
    worst: float
    worst_trial: int

    def as_row(self):
        return {"suite": self.suite, "trials": self.trials, "seed": self.seed,
                "violations": self.violations, "worst": self.worst, "worst_trial": self.worst_trial}


def _summarise(suite, seed, scores, bad):
    scores = np.asarray(scores, dtype=float)
    k = int(np.argmax(scores)) if scores.size else -1
    return TrialSummary(suite, int(scores.size), int(seed), int(np.count_nonzero(bad)),
                        float(scores[k]) if k >= 0 else 0.0, k)


def envelope_trials(trials, seed=0):
    """Envelope area over ``2 pi sum theta`` at random graph vertex stars (violation when > 1)."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(trials):
        S, c = random_vertex_star(rng)
        rep = envelope_bound_check(S, c)
        ratios.append(rep.area / rep.bound)
    ratios = np.array(ratios)
    return _summarise("envelope", seed, ratios, ratios > 1.0)


def elliptic_trials(trials, seed=0, tol=1e-8):
    """Worst ``|A(G) - defect|`` over interior vertices of random convex quadratic lifts."""
    errs = []
    for t in range(trials):
        S = convex_quadratic_lift(np.random.default_rng([seed, t])).to_surface3d()
        errs.append(max(elliptic_identity_check(S, v).error for v in S.interior_vertices))
    errs = np.array(errs)
    return _summarise("elliptic", seed, errs, errs > tol)


def measure_trials(trials, seed=0, k=8, tol=1e-9):
    """Relative gap between total edge mass and ``E_H`` on random grid lifts."""
    errs = []
    for t in range(trials):
        g = random_grid_graph(np.random.default_rng([seed, t]), k)
        errs.append(mass_summary(g).rel_err)
    errs = np.array(errs)
    return _summarise("measures", seed, errs, errs > tol)


def random_polyline(rng, n=20):
    closed = bool(rng.integers(2))
    v = np.cumsum(rng.normal(size=(n, 2)), axis=0)
    return PolygonalCurve(v, closed=closed)


def curve_trials(trials, seed=0, tol=1e-12):
    """Normal-variation identity and ``(2/pi) TC <= TC* <= TC`` on random polylines.

    The score is the relative identity error; inequality failures count as
    violations too.
    """
    rng = np.random.default_rng(seed)
    errs, bad = [], []
    for _ in range(trials):
        c = random_polyline(rng)
        rep = curvature_report(c)
        var = polygonal_normal_variation(c)
        err = abs(var - rep.tc_star) / max(rep.tc_star, 1e-300)
        errs.append(err)
        bad.append(err > tol or not (2 / np.pi * rep.tc <= rep.tc_star <= rep.tc))
    return _summarise("curves", seed, errs, bad)


def run_suite(suite, trials, seed=0):
    if suite == "envelope":
        return envelope_trials(trials, seed)
    if suite == "elliptic":
        return elliptic_trials(trials, seed)
    if suite == "measures":
        return measure_trials(trials, seed)
    if suite == "curves":
        return curve_trials(trials, seed)
    raise ValueError(f"unknown suite {suite!r}")
