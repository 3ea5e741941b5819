"""``polycurv`` command line.

Exit codes: 0 when every asserted check holds, 2 when a mathematical check
fails, 1 for usage, input and I/O errors.
"""

import argparse
import csv
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _kernels
from .curvature import REPORT_COLUMNS, edge_records, energy_report, vertex_records, write_edge_csv, write_vertex_csv
from .div_measures import edge_rows, mass_summary
from .errors import PolycurvError
from .gauss_sphere import as_unit_vectors, envelope_report
from .lantern import (
    SWEEP_MODES,
    LanternParams,
    PrismParams,
    build_lantern,
    closed_form_area,
    lantern_mean_curvature_consistency,
    lantern_row,
    lantern_vertex_diagnostics,
    prism_report,
    sweep_params,
)
from .polyline import PolygonalCurve, cantor_polygonal, curvature_report, polygonal_normal_variation
from .reporting import RunReport, write_report
from .smoothing import (
    graph_field,
    grid_energy_report,
    lantern_patch_check,
    lantern_patch_graph,
    MollifierSpec,
    mollify,
    paraboloid_field,
    paraboloid_gauss_energy,
    pyramid_graph,
    roof_graph,
    smoothing_convergence_check,
)
from .trisurf import load_off, load_off_graph
from .trials import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _default_jobs():
    try:
        return max(1, int(os.environ.get("POLYCURV_JOBS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_lantern(args):
    p = LanternParams(args.m, args.n, args.radius, args.height)
    S = build_lantern(p)
    rep = energy_report(S)
    r = RunReport("lantern", vars_of(args, "m", "n", "radius", "height"), REPORT_COLUMNS, [rep.as_row()])
    cf = closed_form_area(p)
    r.check("area_matches_closed_form", abs(rep.area - cf) <= 1e-10 * cf)
    r.check("developable", max((abs(v.defect) for v in vertex_records(S)), default=0.0) <= 1e-9)
    r.check("edge_sums_match_f1_f2", lantern_mean_curvature_consistency(p, S).ok())
    return r


def _sweep_point(task):
    mode, v, R, H, max_tri = task
    (p,) = sweep_params(mode, [v], R, H)
    return lantern_row(p, with_mesh=2 * p.m * p.n <= max_tri)


def cmd_lantern_sweep(args):
    tasks = [(args.mode, v, args.radius, args.height, args.max_mesh_triangles) for v in args.n_list]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    r = RunReport("lantern-sweep", {"mode": args.mode, "n_list": ",".join(map(str, args.n_list)),
                                     "radius": args.radius, "height": args.height},
                  ("n", "m", "area", "f1", "f2", "e_k", "defect_max"), rows)
    meshed = [x["defect_max"] for x in rows if not math.isnan(x["defect_max"])]
    r.check("developable", all(d <= 1e-9 for d in meshed))
    return r


def cmd_lantern_vertex(args):
    p = LanternParams(args.m, args.n)
    d = lantern_vertex_diagnostics(p)
    r = RunReport("lantern-vertex", vars_of(args, "m", "n"), ("d1", "d2", "envelope_area", "total_envelope"), [d.as_row()])
    r.check("d1_between_sqrt2_and_2", math.sqrt(2) < d.d1 < 2)
    r.check("defect_zero", abs(d.defect) <= 1e-9)
    r.check("envelope_positive", d.envelope_area > 0)
    return r


def cmd_prism(args):
    p = PrismParams(args.n, args.radius, args.height, args.slices)
    rep = prism_report(p)
    row = rep.as_row()
    r = RunReport("prism", vars_of(args, "n", "slices", "radius", "height"), tuple(row), [row])
    r.check("mean_curvature_is_pi_H", rep.rel_err <= 1e-12)
    r.check("defects_zero", rep.max_abs_defect <= 1e-12)
    r.check("envelopes_zero", rep.max_envelope_area <= 1e-12)
    return r


def cmd_mesh_energy(args):
    S = load_off_graph(args.input).to_surface3d() if args.graph else load_off(args.input)
    rep = energy_report(S)
    if args.edges_out:
        write_edge_csv(edge_records(S), args.edges_out)
    if args.vertices_out:
        write_vertex_csv(vertex_records(S), args.vertices_out)
    r = RunReport("mesh-energy", {"input": args.input, "graph": args.graph}, REPORT_COLUMNS, [rep.as_row()])
    r.check("e_h_between_conventions", rep.e_h <= rep.e_h_tilde * (1 + 1e-12) and rep.e_h_tilde <= math.pi / 2 * rep.e_h * (1 + 1e-12))
    return r


def cmd_curve(args):
    cols = ("length", "tc", "tc_star", "max_turning")
    if args.cantor_level is not None:
        k = args.cantor_level
        ca = cantor_polygonal(k)
        rep = ca.report()
        r = RunReport("curve", {"cantor_level": k}, cols, [rep.as_row()])
        r.check("corner_count", ca.corner_count == 2 ** (k + 1) - 2)
        if k >= 1:
            r.check("max_turning_below_arcsin_4^-k", rep.max_turning <= math.asin(4.0 ** -k))
            r.check("tc_gap_below_2^k_arcsin^3", rep.tc - rep.tc_star <= 2 ** k * math.asin(4.0 ** -k) ** 3)
        return r
    c = PolygonalCurve.from_csv(args.input, closed=args.closed)
    rep = curvature_report(c)
    r = RunReport("curve", {"input": args.input, "closed": args.closed}, cols, [rep.as_row()])
    r.check("tc_star_between", 2 / math.pi * rep.tc <= rep.tc_star * (1 + 1e-15) and rep.tc_star <= rep.tc)
    var = polygonal_normal_variation(c)
    r.check("normal_variation_identity", abs(var - rep.tc_star) <= 1e-12 * max(rep.tc_star, 1e-300) or var == rep.tc_star)
    return r


def _read_normals(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:3]] != ["nx", "ny", "nz"]:
            raise PolycurvError(f"{path}: expected header 'nx,ny,nz'")
        return as_unit_vectors([[float(row["nx"]), float(row["ny"]), float(row["nz"])] for row in reader])


def cmd_envelope(args):
    n = _read_normals(args.input)
    theta = args.theta_sum if args.theta_sum is not None else float("nan")
    rep = envelope_report(n, theta, align=args.align)
    row = rep.as_row()
    if args.theta_sum is None:
        row["ok"] = None
    r = RunReport("envelope", {"input": args.input}, ("k", "area", "theta_sum", "bound", "ok"), [row])
    if args.theta_sum is not None:
        r.check("area_within_bound", rep.ok)
    return r


def cmd_edge_measures(args):
    g = load_off_graph(args.input)
    s = mass_summary(g)
    if args.summary:
        r = RunReport("edge-measures", {"input": args.input}, ("total_mass", "e_h", "rel_err"),
                      [{"total_mass": s.total_mass, "e_h": s.e_h, "rel_err": s.rel_err}])
    else:
        r = RunReport("edge-measures", {"input": args.input}, ("edge_id", "length2d", "length3d", "theta", "mass"),
                      edge_rows(g))
    r.check("total_mass_equals_e_h", s.rel_err <= 1e-9)
    return r


SHAPES = ("pyramid", "roof", "lantern-patch", "paraboloid")


def cmd_smooth_check(args):
    cols = ("eps", "A", "F1", "F2", "slice_lhs", "slice_rhs")
    params = {"shape": args.shape, "grid": args.grid, "eps_mult": ",".join(map(str, args.eps_mult))}
    r = RunReport("smooth-check", params, cols)
    if args.shape in ("pyramid", "roof"):
        g = pyramid_graph() if args.shape == "pyramid" else roof_graph()
        tab = smoothing_convergence_check(g, args.grid, args.eps_mult, extension="envelope")
        r.rows = [row.as_row() for row in tab.rows]
        for row in tab.rows:
            r.check(f"f1_bound@eps={row.eps:.6g}", row.f1 <= tab.f1_bound * (1 + 1e-6))
        if args.shape == "pyramid":
            r.params.update({"poly_area": tab.poly_area, "poly_e_h_tilde": tab.poly_e_h_tilde, "poly_e_k": tab.poly_e_k})
    elif args.shape == "paraboloid":
        f = paraboloid_field(args.grid)
        ref = paraboloid_gauss_energy()
        for k in args.eps_mult:
            rep = grid_energy_report(mollify(f, MollifierSpec(k * f.dx))) if k > 0 else grid_energy_report(f)
            r.rows.append({"eps": k * f.dx, "A": rep.area, "F1": rep.f1, "F2": rep.f2,
                           "slice_lhs": rep.slice_lhs, "slice_rhs": rep.slice_rhs})
        r.params["gauss_energy_oracle"] = ref
    else:
        patch = lantern_patch_graph()
        f = graph_field(patch.graph, args.grid, "cover")
        for k in args.eps_mult:
            rep = grid_energy_report(mollify(f, MollifierSpec(k * f.dx)))
            r.rows.append({"eps": k * f.dx, "A": rep.area, "F1": rep.f1, "F2": rep.f2,
                           "slice_lhs": rep.slice_lhs, "slice_rhs": rep.slice_rhs})
            vals, env, e_k, _ = lantern_patch_check(patch, args.grid, k)
            r.check(f"vertex_f2_within_factor_2@k={k:g}", bool(np.all((vals > env / 2) & (vals < 2 * env))))
    for row in r.rows:
        r.check(f"slicing@eps={row['eps']:.6g}", row["slice_lhs"] <= row["slice_rhs"] * (1 + 1e-6))
    return r


def cmd_proptest(args):
    print(f"seed={args.seed}", file=sys.stderr)
    s = run_suite(args.suite, args.trials, args.seed)
    row = s.as_row()
    r = RunReport("proptest", {"suite": args.suite, "trials": args.trials, "seed": args.seed}, tuple(row), [row])
    r.check("no_violations", s.violations == 0)
    return r


def vars_of(args, *names):
    return {k: getattr(args, k) for k in names}


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=_default_jobs(), help="worker processes (default $POLYCURV_JOBS or 1)")

    parser = _Parser(prog="polycurv", description="Discrete curvature of polygonal curves and polyhedral surfaces.")
    parser.add_argument("--version", action="version", version="polycurv 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lantern", parents=[common], help="energy report of one Schwarz lantern")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.set_defaults(func=cmd_lantern)

    p = sub.add_parser("lantern-sweep", parents=[common], help="area and curvature along a refinement path")
    p.add_argument("--mode", choices=SWEEP_MODES, required=True)
    p.add_argument("--n-list", type=_int_list, required=True, help="comma-separated n (or m for n=m^k modes)")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.add_argument("--max-mesh-triangles", type=int, default=500_000,
                   help="larger lanterns use closed forms only (e_k, defect_max reported as nan)")
    p.set_defaults(func=cmd_lantern_sweep)

    p = sub.add_parser("lantern-vertex", parents=[common], help="Gauss-sphere diagnostics of a lantern vertex star (R=H=1)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_lantern_vertex)

    p = sub.add_parser("prism", parents=[common], help="inscribed prism checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--slices", type=int, default=1)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--height", type=float, default=1.0)
    p.set_defaults(func=cmd_prism)

    p = sub.add_parser("mesh-energy", parents=[common], help="energy report of an OFF surface")
    p.add_argument("--input", required=True)
    p.add_argument("--graph", action="store_true", help="require the surface to be a graph over (x, y)")
    p.add_argument("--edges-out", help="per-edge CSV dump")
    p.add_argument("--vertices-out", help="per-vertex CSV dump")
    p.set_defaults(func=cmd_mesh_energy)

    p = sub.add_parser("curve", parents=[common], help="curvature report of a polygonal curve")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input", help="CSV with header x,y")
    g.add_argument("--cantor-level", type=int)
    p.add_argument("--closed", action="store_true")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("envelope", parents=[common], help="geodesic envelope of unit normals")
    p.add_argument("--input", required=True, help="CSV with header nx,ny,nz")
    p.add_argument("--theta-sum", type=float, help="tile-angle sum for the bound 2 pi theta_sum")
    p.add_argument("--align", action="store_true", help="rotate the mean normal to the pole first")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("edge-measures", parents=[common], help="edge masses of a graph surface")
    p.add_argument("--input", required=True)
    p.add_argument("--graph", action="store_true", default=True, help="(always on) input must be a graph")
    p.add_argument("--summary", action="store_true", help="only total_mass,e_h,rel_err")
    p.set_defaults(func=cmd_edge_measures)

    p = sub.add_parser("smooth-check", parents=[common], help="mollified energies of a fixture")
    p.add_argument("--shape", choices=SHAPES, required=True)
    p.add_argument("--grid", type=int, default=257)
    p.add_argument("--eps-mult", type=_float_list, default=[8.0], help="comma-separated eps / dx values")
    p.set_defaults(func=cmd_smooth_check)

    p = sub.add_parser("proptest", parents=[common], help="seeded randomized property run")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_proptest)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("polycurv: error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        report = args.func(args)
        report.wall_time = time.perf_counter() - t0
        write_report(report, args.format, path=args.output, stream=sys.stdout)
    except (PolycurvError, OSError, ValueError) as exc:
        print(f"polycurv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failed = [k for k, ok in report.checks.items() if not ok]
    status = "ok" if not failed else "FAILED " + ", ".join(failed)
    print(f"polycurv {args.command}: {len(report.checks)} checks, {status} ({report.wall_time:.3f} s, {_kernels.backend()})",
          file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
