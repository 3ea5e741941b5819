"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS`` / ``FAIL`` line (outside pytest's capture) and
then asserts.  Several criteria are known to fail; see the decisions ledger
for the analysis.  Their assertions are left exactly as stated.
"""

import math
import time

import numpy as np
import pytest

from polycurv.curvature import energy_report, vertex_angle_sums
from polycurv.div_measures import edge_measures, mass_summary, random_grid_graph
from polycurv.gauss_sphere import convex_quadratic_lift, elliptic_identity_check
from polycurv.lantern import (
    LanternParams,
    PrismParams,
    build_lantern,
    closed_form_area,
    closed_form_f1,
    closed_form_f2,
    lantern_vertex_diagnostics,
    prism_report,
)
from polycurv.polyline import (
    PolygonalCurve,
    cantor_polygonal,
    curvature_force,
    curvature_report,
    polygonal_normal_variation,
)
from polycurv.smoothing import (
    GridField,
    graph_field,
    grid_energy_report,
    lantern_patch_check,
    lantern_patch_graph,
    mollify,
    MollifierSpec,
    paraboloid_field,
    pyramid_graph,
    roof_graph,
    smoothing_convergence_check,
)
from polycurv.trials import envelope_trials, random_polyline
from polycurv.trisurf import GraphSurface, Triangulation2D, TriangulatedSurface3D

TWO_PI = 2 * np.pi
EVEN_4_128 = range(4, 129, 2)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        return ok

    return emit


def rel(a, b):
    return abs(a - b) / abs(b)


# 1 ---------------------------------------------------------------------------

def test_criterion_01_lantern_area_convergence(verdict):
    t0 = time.perf_counter()
    ns = list(range(10, 81, 2))
    errs = [rel(closed_form_area(LanternParams(n * n, n)), TWO_PI) for n in ns]
    # the mesh agrees with the closed form at the coarsest point
    mesh_area = build_lantern(LanternParams(100, 10)).area
    elapsed = time.perf_counter() - t0
    ok = (errs[0] <= 1e-3 and all(b < a for a, b in zip(errs, errs[1:]))
          and rel(mesh_area, closed_form_area(LanternParams(100, 10))) <= 1e-12 and elapsed < 1.0)
    verdict(1, ok, f"rel err {errs[0]:.2e} at n=10 -> {errs[-1]:.2e} at n=80, {elapsed:.3f} s")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_criterion_02_lantern_alternative_limit(verdict):
    t0 = time.perf_counter()
    target = TWO_PI * math.sqrt(1 + np.pi ** 4 / 4)
    err = rel(closed_form_area(LanternParams(64, 64 ** 2)), target)
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-2 and elapsed < 1.0
    verdict(2, ok, f"rel err {err:.2e} vs 2 pi sqrt(1 + pi^4/4) at n=64, {elapsed:.3f} s")
    assert ok


# 3 ---------------------------------------------------------------------------

def test_criterion_03_lantern_divergence(verdict):
    ms = list(range(4, 21, 2))
    areas = [closed_form_area(LanternParams(m, m ** 4)) for m in ms]
    ok = all(b > a for a, b in zip(areas, areas[1:])) and areas[-1] > 10 * TWO_PI
    verdict(3, ok, f"A(P_(m,m^4)) = {areas[0]:.4g} at m=4 ... {areas[-1]:.4g} at m=20 (10*2pi = {10 * TWO_PI:.4g})")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_criterion_04_mean_curvature_limits(verdict):
    f2_a = closed_form_f2(LanternParams(80 ** 2, 80))
    f1_b = closed_form_f1(LanternParams(50 ** 2, 50))
    f1_c = closed_form_f1(LanternParams(200, 200))
    f2_d = closed_form_f2(LanternParams(400, 400))
    parts = {
        "F2(n^2,n) ~ pi": rel(f2_a, np.pi) <= 0.02,
        "F1(n^2,n) < 0.05": f1_b < 0.05,
        "F1(n,n) ~ 2 pi^3": rel(f1_c, 2 * np.pi ** 3) <= 0.02,
        "F2(n,n) > 1e3": f2_d > 1e3,
    }
    ok = all(parts.values())
    verdict(4, ok, f"F2(6400,80)={f2_a:.5g}, F1(2500,50)={f1_b:.4g}, F1(200,200)={f1_c:.5g} "
                   f"(2pi^3={2 * np.pi ** 3:.5g}), F2(400,400)={f2_d:.5g}; "
                   + ", ".join(f"{k}: {'ok' if v else 'no'}" for k, v in parts.items()))
    assert ok


# 5 ---------------------------------------------------------------------------

def test_criterion_05_lower_semicontinuity(verdict):
    worst = min((closed_form_f1(p) + closed_form_f2(p)) / np.pi
                for p in (LanternParams(m, n) for m in EVEN_4_128 for n in EVEN_4_128))
    ok = worst >= 1 - 1e-3
    verdict(5, ok, f"min (F1+F2)/pi over even m,n in 4..128 = {worst:.5f}")
    assert ok


# 6 ---------------------------------------------------------------------------

def test_criterion_06_developability(verdict):
    worst = 0.0
    for m in (4, 6, 8, 16, 32, 64, 128):
        for n in (2, 4, 8, 16, 32, 64, 128):
            S = build_lantern(LanternParams(m, n))
            sums = vertex_angle_sums(S)[S.interior_vertices]
            worst = max(worst, float(np.max(np.abs(TWO_PI - sums))))
    ok = worst <= 1e-9
    verdict(6, ok, f"max |defect| over 49 lanterns = {worst:.2e}")
    assert ok


# 7 ---------------------------------------------------------------------------

def _rotate_graph(g, angle):
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    tri = g.triangulation
    return GraphSurface(Triangulation2D(tri.points @ R.T, tri.triangles), g.heights)


def test_criterion_07_edge_measure_identity(verdict):
    worst_total = worst_rot = 0.0
    for seed in range(100):
        rng = np.random.default_rng([7, seed])
        g = random_grid_graph(rng, k=8)
        worst_total = max(worst_total, mass_summary(g).rel_err)
        a = np.array([r.mass for r in edge_measures(g)])
        b = np.array([r.mass for r in edge_measures(_rotate_graph(g, rng.uniform(0, TWO_PI)))])
        worst_rot = max(worst_rot, float(np.max(np.abs(a - b) / np.maximum(a, 1e-300))))
    ok = worst_total <= 1e-9 and worst_rot <= 1e-9
    verdict(7, ok, f"worst rel |mass - E_H| = {worst_total:.2e}, worst rotation change = {worst_rot:.2e}")
    assert ok


# 8 ---------------------------------------------------------------------------

def _tetrahedron_corner_oracle():
    # equilateral spherical triangle with side a = arccos(-1/3):
    # cos A = (cos a - cos^2 a) / sin^2 a, area = 3 A - pi
    ca = -1.0 / 3.0
    A = math.acos((ca - ca * ca) / (1 - ca * ca))
    return 3 * A - math.pi, TWO_PI - 3 * (math.pi / 3)


def test_criterion_08_elliptic_identity(verdict):
    worst = 0.0
    for seed in range(100):
        S = convex_quadratic_lift(np.random.default_rng([8, seed])).to_surface3d()
        for v in S.interior_vertices:
            worst = max(worst, elliptic_identity_check(S, v).error)
    T = TriangulatedSurface3D([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)],
                              [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)])
    area, defect, _ = elliptic_identity_check(T, 0, align=True)
    ref_area, ref_defect = _tetrahedron_corner_oracle()
    tet_ok = abs(area - ref_area) <= 1e-12 and abs(defect - ref_defect) <= 1e-12 and abs(ref_area - np.pi) <= 1e-12
    ok = worst <= 1e-8 and tet_ok
    verdict(8, ok, f"worst |A(G) - defect| = {worst:.2e} over 100 lifts; tetrahedron corner ({area:.15f}, {defect:.15f})")
    assert ok


# 9 ---------------------------------------------------------------------------

def test_criterion_09_envelope_bound(verdict):
    s = envelope_trials(1000, seed=0)
    ok = s.violations == 0
    verdict(9, ok, f"{s.violations} violations in 1000 stars; worst A/(2 pi sum theta) = {s.worst:.4f} at trial {s.worst_trial}")
    assert ok


# 10 --------------------------------------------------------------------------

def _star(m, n):
    # the star of an interior vertex only depends on pi/m and the strip height 1/n,
    # so a two-strip lantern of height 2/n carries the same six tiles as P_{m,n}
    return lantern_vertex_diagnostics(LanternParams(m, 2, 1.0, 2.0 / n), require_unit=False)


def test_criterion_10_lantern_envelope_pathology(verdict):
    d1 = np.array([[_star(m, n).d1 for n in EVEN_4_128] for m in EVEN_4_128])
    d1_ok = bool(np.all((d1 > math.sqrt(2)) & (d1 < 2)))
    frac_in = float(np.mean((d1 > math.sqrt(2)) & (d1 < 2)))
    # per-vertex envelope area for m = n; the constant is measured at m = n = 16
    c16 = _star(16, 16).envelope_area
    diag_ms = [16, 32, 64, 128]
    diag = [_star(m, m).envelope_area for m in diag_ms]
    floor_ok = all(a >= 0.5 * c16 for a in diag)
    # total envelope over all interior vertices along n = m^2
    ms = [4, 8, 16, 32, 64]
    totals = [_star(m, m * m).envelope_area * m * (m * m - 1) for m in ms]
    div_ok = all(b > a for a, b in zip(totals, totals[1:])) and totals[-1] > 10 * totals[0]
    ok = d1_ok and floor_ok and div_ok
    verdict(10, ok, f"d1 in (sqrt2, 2) on {100 * frac_in:.1f}% of the grid (range {d1.min():.3f}..{d1.max():.3f}); "
                    f"m=n per-vertex area {', '.join(f'{a:.4g}' for a in diag)} vs floor {0.5 * c16:.4g}; "
                    f"n=m^2 totals {', '.join(f'{t:.4g}' for t in totals)}")
    assert ok


# 11 --------------------------------------------------------------------------

def test_criterion_11_prism_exactness(verdict):
    worst_rel = worst_def = worst_env = 0.0
    for n in range(3, 129):
        for slices in (1, 2, 4):
            rep = prism_report(PrismParams(n, slices=slices))
            worst_rel = max(worst_rel, rep.rel_err)
            worst_def = max(worst_def, rep.max_abs_defect)
            worst_env = max(worst_env, rep.max_envelope_area)
    ok = worst_rel <= 1e-12 and worst_def <= 1e-12 and worst_env <= 1e-12
    verdict(11, ok, f"worst rel err {worst_rel:.2e}, |defect| {worst_def:.2e}, envelope {worst_env:.2e}")
    assert ok


# 12 --------------------------------------------------------------------------

def test_criterion_12_cantor(verdict):
    counts_ok = turn_ok = gap_ok = True
    gaps, details = [], []
    for k in range(1, 9):
        ca = cantor_polygonal(k)
        rep = ca.report()
        bound = math.asin(4.0 ** -k)
        gap = abs(rep.tc_star - rep.tc)
        gaps.append(gap)
        counts_ok &= ca.corner_count == 2 ** (k + 1) - 2 == np.count_nonzero(ca.turning_angles)
        turn_ok &= rep.max_turning <= bound
        gap_ok &= gap <= 2 ** k * bound ** 3
        details.append(f"k={k}: max turn {rep.max_turning:.3g} vs {bound:.3g}, gap {gap:.3g} vs {2 ** k * bound ** 3:.3g}")
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok = counts_ok and turn_ok and gap_ok and decreasing
    verdict(12, ok, f"counts {'ok' if counts_ok else 'bad'}, turning bound {'ok' if turn_ok else 'violated'}, "
                    f"gap bound {'ok' if gap_ok else 'violated'}, gap decreasing {decreasing}; " + "; ".join(details[:3]))
    assert ok


# 13 --------------------------------------------------------------------------

def test_criterion_13_smoothing(verdict):
    t0 = time.perf_counter()
    tab = smoothing_convergence_check(pyramid_graph(0.5), 513, [8], extension="envelope")
    row = tab.rows[0]
    e_a = rel(row.area, tab.poly_area)
    e_f1 = rel(row.f1, tab.poly_e_h_tilde)
    e_f2 = rel(row.f2, tab.poly_e_k)
    pyr_ok = e_a <= 0.01 and e_f1 <= 0.05 and e_f2 <= 0.10
    slicing = [row.slice_lhs <= row.slice_rhs]
    roof = smoothing_convergence_check(roof_graph(0.5), 257, [8], extension="envelope")
    slicing += [r.slice_lhs <= r.slice_rhs for r in roof.rows]
    par = paraboloid_field(257)
    for f in (par, mollify(par, MollifierSpec(8 * par.dx))):
        slicing.append(grid_energy_report(f).slicing_ok)
    patch = lantern_patch_graph()
    f = graph_field(patch.graph, 257, "cover")
    slicing.append(grid_energy_report(mollify(f, MollifierSpec(8 * f.dx))).slicing_ok)
    elapsed = time.perf_counter() - t0
    ok = pyr_ok and all(slicing) and elapsed < 60.0
    verdict(13, ok, f"pyramid N=513 eps=8dx: A {e_a:.2%}, F1 {e_f1:.2%}, F2 {e_f2:.2%}; "
                    f"slicing holds on {sum(slicing)}/{len(slicing)} fixtures; {elapsed:.1f} s")
    assert ok


# 14 --------------------------------------------------------------------------

def test_criterion_14_curve_identities(verdict):
    rng = np.random.default_rng(14)
    worst = 0.0
    ineq_ok = True
    for _ in range(1000):
        c = random_polyline(rng, n=int(rng.integers(3, 40)))
        rep = curvature_report(c)
        worst = max(worst, abs(polygonal_normal_variation(c) - curvature_force(c)) / max(rep.tc_star, 1e-300))
        ineq_ok &= 2 / np.pi * rep.tc <= rep.tc_star * (1 + 1e-15) and rep.tc_star <= rep.tc
    convex_worst = 0.0
    for _ in range(200):
        k = int(rng.integers(3, 60))
        t = np.sort(rng.uniform(0, TWO_PI, k))
        if np.min(np.diff(np.concatenate([t, [t[0] + TWO_PI]]))) < 1e-6:
            continue
        a, b = rng.uniform(0.2, 3.0, 2)
        poly = PolygonalCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]), closed=True)
        convex_worst = max(convex_worst, abs(curvature_report(poly).tc - TWO_PI))
    ok = worst <= 1e-12 and ineq_ok and convex_worst <= 1e-12
    verdict(14, ok, f"worst rel identity error {worst:.2e}; inequalities {'hold' if ineq_ok else 'fail'}; "
                    f"closed convex |TC - 2pi| <= {convex_worst:.2e}")
    assert ok
