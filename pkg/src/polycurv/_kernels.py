"""Inner loops shared by the geometry modules.

Every kernel exists twice: a numba ``@njit`` loop and a vectorised numpy
version with the same signature.  The public names at the bottom of the file
point at one or the other, chosen once at import time:

* numba is used when it imports and ``POLYCURV_NUMBA`` is unset or truthy;
* ``POLYCURV_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy path.

Both implementations are always importable as ``<name>_numpy`` and, when numba
is present, ``<name>_numba`` so that tests and ``benchmarks/bench_kernels.py``
can compare them directly.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False


def _env_enabled(value):
    return value.strip().lower() not in {"0", "false", "off", "no"}


USE_NUMBA = HAVE_NUMBA and _env_enabled(os.environ.get("POLYCURV_NUMBA", "1"))


def _njit(func):
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True)(func)


# ---------------------------------------------------------------------------
# 2D correlation, "valid" part only (used by the mollifier)
# ---------------------------------------------------------------------------

def correlate_valid_numpy(padded, kernel):
    kr, kc = kernel.shape
    rows = padded.shape[0] - kr + 1
    cols = padded.shape[1] - kc + 1
    out = np.zeros((rows, cols))
    for a in range(kr):
        for b in range(kc):
            w = kernel[a, b]
            if w != 0.0:
                out += w * padded[a:a + rows, b:b + cols]
    return out


def _correlate_valid_loop(padded, kernel):
    kr, kc = kernel.shape
    rows = padded.shape[0] - kr + 1
    cols = padded.shape[1] - kc + 1
    out = np.zeros((rows, cols))
    for a in range(kr):
        for b in range(kc):
            w = kernel[a, b]
            if w == 0.0:
                continue
            for i in range(rows):
                for j in range(cols):
                    out[i, j] += w * padded[i + a, j + b]
    return out


correlate_valid_numba = _njit(_correlate_valid_loop)


# ---------------------------------------------------------------------------
# angle between paired vectors: atan2(|a x b|, a . b)
# ---------------------------------------------------------------------------

def pair_angles_numpy(a, b):
    cross = np.cross(a, b)
    return np.arctan2(np.sqrt(np.einsum("ij,ij->i", cross, cross)), np.einsum("ij,ij->i", a, b))


def _pair_angles_loop(a, b):
    n = a.shape[0]
    out = np.empty(n)
    for k in range(n):
        cx = a[k, 1] * b[k, 2] - a[k, 2] * b[k, 1]
        cy = a[k, 2] * b[k, 0] - a[k, 0] * b[k, 2]
        cz = a[k, 0] * b[k, 1] - a[k, 1] * b[k, 0]
        dot = a[k, 0] * b[k, 0] + a[k, 1] * b[k, 1] + a[k, 2] * b[k, 2]
        out[k] = np.arctan2(np.sqrt(cx * cx + cy * cy + cz * cz), dot)
    return out


pair_angles_numba = _njit(_pair_angles_loop)


# ---------------------------------------------------------------------------
# interior angles of triangles at their three corners
# ---------------------------------------------------------------------------

def corner_angles_numpy(points, triangles):
    p = points[triangles]  # (T, 3, 3)
    out = np.empty(triangles.shape, dtype=float)
    for c in range(3):
        u = p[:, (c + 1) % 3] - p[:, c]
        v = p[:, (c + 2) % 3] - p[:, c]
        out[:, c] = pair_angles_numpy(u, v)
    return out


def _corner_angles_loop(points, triangles):
    t = triangles.shape[0]
    out = np.empty((t, 3))
    for k in range(t):
        for c in range(3):
            i0 = triangles[k, c]
            i1 = triangles[k, (c + 1) % 3]
            i2 = triangles[k, (c + 2) % 3]
            ux = points[i1, 0] - points[i0, 0]
            uy = points[i1, 1] - points[i0, 1]
            uz = points[i1, 2] - points[i0, 2]
            vx = points[i2, 0] - points[i0, 0]
            vy = points[i2, 1] - points[i0, 1]
            vz = points[i2, 2] - points[i0, 2]
            cx = uy * vz - uz * vy
            cy = uz * vx - ux * vz
            cz = ux * vy - uy * vx
            out[k, c] = np.arctan2(np.sqrt(cx * cx + cy * cy + cz * cz), ux * vx + uy * vy + uz * vz)
    return out


corner_angles_numba = _njit(_corner_angles_loop)


# ---------------------------------------------------------------------------
# sample a piecewise-affine function on a tensor grid
# ---------------------------------------------------------------------------
# tri2d: (T, 3, 2) projected corners, planes: (T, 3) with value = a*x + b*y + c.
# Uncovered nodes are NaN.  A node on a shared edge takes the value of the
# last triangle that claims it (continuity makes the choice immaterial).

_INSIDE_TOL = 1e-12


def rasterize_numpy(xs, ys, tri2d, planes):
    out = np.full((xs.size, ys.size), np.nan)
    for k in range(tri2d.shape[0]):
        p0, p1, p2 = tri2d[k]
        lo = np.minimum(np.minimum(p0, p1), p2)
        hi = np.maximum(np.maximum(p0, p1), p2)
        i0, i1 = np.searchsorted(xs, lo[0] - 1e-12, "left"), np.searchsorted(xs, hi[0] + 1e-12, "right")
        j0, j1 = np.searchsorted(ys, lo[1] - 1e-12, "left"), np.searchsorted(ys, hi[1] + 1e-12, "right")
        if i0 >= i1 or j0 >= j1:
            continue
        X, Y = np.meshgrid(xs[i0:i1], ys[j0:j1], indexing="ij")
        det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])
        l1 = ((X - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (Y - p0[1])) / det
        l2 = ((p1[0] - p0[0]) * (Y - p0[1]) - (X - p0[0]) * (p1[1] - p0[1])) / det
        inside = (l1 >= -_INSIDE_TOL) & (l2 >= -_INSIDE_TOL) & (l1 + l2 <= 1.0 + _INSIDE_TOL)
        a, b, c = planes[k]
        block = out[i0:i1, j0:j1]
        block[inside] = a * X[inside] + b * Y[inside] + c
    return out


def _rasterize_loop(xs, ys, tri2d, planes):
    nx, ny = xs.size, ys.size
    out = np.full((nx, ny), np.nan)
    for k in range(tri2d.shape[0]):
        x0, y0 = tri2d[k, 0, 0], tri2d[k, 0, 1]
        x1, y1 = tri2d[k, 1, 0], tri2d[k, 1, 1]
        x2, y2 = tri2d[k, 2, 0], tri2d[k, 2, 1]
        det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        i0 = np.searchsorted(xs, min(x0, x1, x2) - 1e-12)
        i1 = np.searchsorted(xs, max(x0, x1, x2) + 1e-12, side="right")
        j0 = np.searchsorted(ys, min(y0, y1, y2) - 1e-12)
        j1 = np.searchsorted(ys, max(y0, y1, y2) + 1e-12, side="right")
        a, b, c = planes[k, 0], planes[k, 1], planes[k, 2]
        for i in range(i0, i1):
            X = xs[i]
            for j in range(j0, j1):
                Y = ys[j]
                l1 = ((X - x0) * (y2 - y0) - (x2 - x0) * (Y - y0)) / det
                l2 = ((x1 - x0) * (Y - y0) - (X - x0) * (y1 - y0)) / det
                if l1 >= -_INSIDE_TOL and l2 >= -_INSIDE_TOL and l1 + l2 <= 1.0 + _INSIDE_TOL:
                    out[i, j] = a * X + b * Y + c
    return out


rasterize_numba = _njit(_rasterize_loop)


# ---------------------------------------------------------------------------
# total curvature of every grid line x2 = const, seen as a polygonal graph
# ---------------------------------------------------------------------------

def line_total_curvature_numpy(values, dx):
    du = np.diff(values, axis=0)  # (N-1, M)
    cross = dx * (du[1:] - du[:-1])
    dot = dx * dx + du[1:] * du[:-1]
    return np.arctan2(np.abs(cross), dot).sum(axis=0)


def _line_total_curvature_loop(values, dx):
    n, m = values.shape
    out = np.zeros(m)
    for j in range(m):
        acc = 0.0
        for i in range(1, n - 1):
            d0 = values[i, j] - values[i - 1, j]
            d1 = values[i + 1, j] - values[i, j]
            acc += np.arctan2(abs(dx * (d1 - d0)), dx * dx + d0 * d1)
        out[j] = acc
    return out


line_total_curvature_numba = _njit(_line_total_curvature_loop)


def _pick(name):
    fast = globals()[name + "_numba"]
    slow = globals()[name + "_numpy"]
    return fast if (USE_NUMBA and fast is not None) else slow


correlate_valid = _pick("correlate_valid")
pair_angles = _pick("pair_angles")
corner_angles = _pick("corner_angles")
rasterize = _pick("rasterize")
line_total_curvature = _pick("line_total_curvature")

KERNELS = ("correlate_valid", "pair_angles", "corner_angles", "rasterize", "line_total_curvature")


def backend():
    """Name of the active kernel backend: ``"numba"`` or ``"numpy"``."""
    return "numba" if USE_NUMBA else "numpy"
