"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 513]

Each kernel is called once untimed (JIT warm-up), then ``--repeat`` times;
the best time is reported along with the max abs difference between backends.
"""

import argparse
import time

import numpy as np

from polycurv import _kernels
from polycurv.lantern import LanternParams, build_lantern
from polycurv.smoothing import MollifierSpec
from polycurv.trisurf import regular_grid_triangulation, GraphSurface


def best_of(fn, args, repeat):
    fn(*args)
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(size):
    rng = np.random.default_rng(0)
    dx = 1.0 / (size - 1)
    ker = MollifierSpec(8 * dx).kernel(dx)
    r = ker.shape[0] // 2
    padded = rng.normal(size=(size + 2 * r, size + 2 * r))
    yield "correlate_valid", (padded, ker)

    S = build_lantern(LanternParams(64, 64))
    nrm = S.face_normals
    f = S.edge_faces[S.interior_edges]
    yield "pair_angles", (np.ascontiguousarray(nrm[f[:, 0]]), np.ascontiguousarray(nrm[f[:, 1]]))
    yield "corner_angles", (S.points, S.triangles)

    tri = regular_grid_triangulation(32)
    g = GraphSurface(tri, rng.normal(size=len(tri.points)))
    xs = np.linspace(0, 1, size)
    yield "rasterize", (xs, xs, np.ascontiguousarray(tri.points[tri.triangles]), np.ascontiguousarray(g.planes))

    yield "line_total_curvature", (rng.normal(size=(size, size)), dx)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=513)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba not importable; nothing to compare")
        return 0
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max |diff|':>14}")
    for name, a in cases(args.size):
        t_np, out_np = best_of(getattr(_kernels, name + "_numpy"), a, args.repeat)
        t_nb, out_nb = best_of(getattr(_kernels, name + "_numba"), a, args.repeat)
        diff = np.nanmax(np.abs(out_np - out_nb))
        print(f"{name:<22}{t_np:>12.4g}{t_nb:>12.4g}{t_np / t_nb:>10.2f}{diff:>14.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
