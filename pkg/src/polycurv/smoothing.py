"""Mollification of sampled graphs and quadrature of smooth curvature densities.

For a smooth graph ``u`` over the unit square with ``g = 1 + |grad u|^2`` and
unit normal ``nu``, three densities are integrated::

    |xi0|^2 = g
    |xi1|^2 = |grad nu|^2 + sum_j (d1 u d2 nu^j - d2 u d1 nu^j)^2
    |xi2|^2 = sum_{j<k} (d1 nu^j d2 nu^k - d2 nu^j d1 nu^k)^2

giving the area ``A``, the mean-curvature-like energy ``F1`` and the Gauss
energy ``F2`` (the mapping area of ``nu``).  Polyhedral graphs are smoothed by
a discrete radial mollifier first; their energies should then approach the
polyhedral ones.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .curvature import energy_report, interior_dihedral_angles
from .errors import ArgumentError, PreconditionError, ResolutionError

MIN_GRID = 17
MIN_EPS_CELLS = 4.0
EXTENSIONS = ("constant", "envelope", "cover")


@dataclass(frozen=True)
class GridField:
    """``values[i1, i2]`` samples a field at ``(i1 dx, i2 dx)``, ``dx = 1 / (N - 1)``.

    ``sampler(xs, ys)``, when given, evaluates the field (or its extension)
    on any tensor grid and is used for padding; otherwise the boundary
    values are extended constantly.
    """

    values: np.ndarray
    sampler: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ArgumentError("grid field must be square")
        if v.shape[0] < MIN_GRID:
            raise ResolutionError(f"grid needs N >= {MIN_GRID}, got {v.shape[0]}")
        if not np.all(np.isfinite(v)):
            raise ArgumentError("grid field samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def dx(self):
        return 1.0 / (self.n - 1)

    @property
    def coords(self):
        return np.linspace(0.0, 1.0, self.n)

    @classmethod
    def from_function(cls, f, n):
        """Sample ``f(x1, x2)`` (vectorised) on the grid and keep it as the sampler."""

        def sampler(xs, ys):
            X1, X2 = np.meshgrid(xs, ys, indexing="ij")
            return np.asarray(f(X1, X2), dtype=float) * np.ones_like(X1)

        x = np.linspace(0.0, 1.0, n)
        return cls(sampler(x, x), sampler)

    def padded(self, cells):
        if cells == 0:
            return np.array(self.values)
        if self.sampler is None:
            return np.pad(self.values, cells, mode="edge")
        x = (np.arange(-cells, self.n + cells)) * self.dx
        out = self.sampler(x, x)
        if not np.all(np.isfinite(out)):
            raise PreconditionError("the extension sampler left uncovered grid nodes")
        return out


@dataclass(frozen=True)
class MollifierSpec:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ArgumentError("mollifier radius must be positive")

    def kernel(self, dx):
        if self.eps < MIN_EPS_CELLS * dx * (1.0 - 1e-12):
            raise ResolutionError(f"eps = {self.eps:g} is below {MIN_EPS_CELLS:g} grid cells ({MIN_EPS_CELLS * dx:g})")
        r = int(np.floor(self.eps / dx))
        k = np.arange(-r, r + 1) * dx
        rho2 = (k[:, None] ** 2 + k[None, :] ** 2) / self.eps ** 2
        w = np.where(rho2 < 1.0, (1.0 - np.minimum(rho2, 1.0)) ** 4, 0.0)
        return w / w.sum()


def mollify(f, spec):
    """Discrete convolution with the radial bump; the result keeps no sampler."""
    ker = spec.kernel(f.dx)
    r = ker.shape[0] // 2
    out = _kernels.correlate_valid(np.ascontiguousarray(f.padded(r)), np.ascontiguousarray(ker))
    return GridField(out)


# ---------------------------------------------------------------------------
# densities and quadrature
# ---------------------------------------------------------------------------

def _cell_integral(density, dx):
    """Average of the four corners of each cell, times the cell area."""
    c = 0.25 * (density[:-1, :-1] + density[1:, :-1] + density[:-1, 1:] + density[1:, 1:])
    return float(c.sum() * dx * dx)


@dataclass(frozen=True)
class GridEnergyReport:
    area: float
    f1: float
    f2: float
    grad_nu: float
    slice_lhs: float
    xi0: np.ndarray = field(repr=False)
    xi1: np.ndarray = field(repr=False)
    xi2: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)

    @property
    def slice_rhs(self):
        return self.area + self.f1

    @property
    def slicing_ok(self):
        return bool(self.slice_lhs <= self.slice_rhs * (1.0 + 1e-6))


def density_fields(values, dx):
    """Pointwise ``(xi0, xi1, xi2, grad_nu_norm, mu)`` from second-order differences."""
    u1, u2 = np.gradient(values, dx, edge_order=2)
    g = 1.0 + u1 ** 2 + u2 ** 2
    s = np.sqrt(g)
    nu = np.stack([-u1 / s, -u2 / s, 1.0 / s])
    d1 = np.empty_like(nu)
    d2 = np.empty_like(nu)
    for j in range(3):
        d1[j], d2[j] = np.gradient(nu[j], dx, edge_order=2)
    grad_nu2 = np.sum(d1 ** 2 + d2 ** 2, axis=0)
    mu = u1[None] * d2 - u2[None] * d1
    xi1 = np.sqrt(grad_nu2 + np.sum(mu ** 2, axis=0))
    minors = 0.0
    for j in range(3):
        for k in range(j + 1, 3):
            minors = minors + (d1[j] * d2[k] - d2[j] * d1[k]) ** 2
    xi2 = np.sqrt(minors)
    return s, xi1, xi2, np.sqrt(grad_nu2), mu


def slice_total_curvature(values, dx):
    """Integral over ``x2`` of the total curvature of the sampled curves ``x1 -> u(x1, x2)``."""
    tc = _kernels.line_total_curvature(np.ascontiguousarray(values), dx)
    return float(0.5 * dx * (tc[:-1] + tc[1:]).sum())


def grid_energy_report(f):
    dx = f.dx
    xi0, xi1, xi2, gnu, mu = density_fields(f.values, dx)
    return GridEnergyReport(
        area=_cell_integral(xi0, dx),
        f1=_cell_integral(xi1, dx),
        f2=_cell_integral(xi2, dx),
        grad_nu=_cell_integral(gnu, dx),
        slice_lhs=slice_total_curvature(f.values, dx),
        xi0=xi0, xi1=xi1, xi2=xi2, mu=mu,
    )


def slicing_tc_check(f):
    rep = grid_energy_report(f)
    return rep.slice_lhs, rep.slice_rhs, rep.slicing_ok


def disk_integral(density, dx, center, radius):
    """Cell-average integral of ``density`` over the nodes within ``radius`` of ``center``."""
    n = density.shape[0]
    x = np.arange(n) * dx
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    inside = (X1 - center[0]) ** 2 + (X2 - center[1]) ** 2 <= radius ** 2
    return float(density[inside].sum() * dx * dx)


# ---------------------------------------------------------------------------
# polyhedral graphs on the grid
# ---------------------------------------------------------------------------

def lift_convexity(graph, tol=1e-12):
    """``"convex"``, ``"concave"`` or ``None`` for a piecewise-affine lift."""
    pts = graph.triangulation.points
    planes = graph.planes
    vals = planes[:, 0][:, None] * pts[:, 0] + planes[:, 1][:, None] * pts[:, 1] + planes[:, 2][:, None]
    scale = tol * max(1.0, np.abs(graph.heights).max())
    if np.all(vals <= graph.heights[None, :] + scale):
        return "convex"
    if np.all(vals >= graph.heights[None, :] - scale):
        return "concave"
    return None


def graph_sampler(graph, extension):
    """Sampler of a polyhedral graph and its extension beyond the unit square.

    * ``constant``: nearest-point (clamped) extension of the values on Q;
    * ``envelope``: max (convex lift) or min (concave lift) of the face planes;
    * ``cover``: the triangulation itself must cover the padded grid.
    """
    if extension == "constant":
        def sampler(xs, ys):
            cx, cy = np.clip(xs, 0.0, 1.0), np.clip(ys, 0.0, 1.0)
            out = graph.sample(cx, cy)
            return out
    elif extension == "envelope":
        kind = lift_convexity(graph)
        if kind is None:
            raise PreconditionError("envelope extension needs a convex or concave lift")
        reduce = np.max if kind == "convex" else np.min
        planes = graph.planes

        def sampler(xs, ys):
            X1, X2 = np.meshgrid(xs, ys, indexing="ij")
            stack = planes[:, 0, None, None] * X1 + planes[:, 1, None, None] * X2 + planes[:, 2, None, None]
            return reduce(stack, axis=0)
    elif extension == "cover":
        def sampler(xs, ys):
            return graph.sample(xs, ys)
    else:
        raise ArgumentError(f"unknown extension {extension!r}; choose from {', '.join(EXTENSIONS)}")
    return sampler


def graph_field(graph, n, extension="constant"):
    sampler = graph_sampler(graph, extension)
    x = np.linspace(0.0, 1.0, n)
    vals = sampler(x, x)
    if not np.all(np.isfinite(vals)):
        raise PreconditionError("the triangulation does not cover the unit square")
    return GridField(vals, sampler)


def _segment_to_boundary(pts2):
    """Distance from each point to the boundary of the unit square (negative outside)."""
    return np.min(np.stack([pts2[..., 0], pts2[..., 1], 1 - pts2[..., 0], 1 - pts2[..., 1]]), axis=0)


def check_margin(graph, eps_max, extension):
    """Enforce the boundary precondition of the smoothing comparison."""
    if extension != "constant":
        return
    S = graph.to_surface3d()
    ids, theta = interior_dihedral_angles(S)
    bent = ids[theta > 1e-12]
    e = S.edges[bent]
    pts = graph.triangulation.points
    # the distance to the square's boundary is concave, so its minimum over a segment sits at an end
    d = np.minimum(_segment_to_boundary(pts[e[:, 0]]), _segment_to_boundary(pts[e[:, 1]]))
    if d.size and d.min() <= 2.0 * eps_max:
        raise PreconditionError(
            f"a bent edge comes within {d.min():.3g} of the boundary; need > 2 eps = {2 * eps_max:.3g} "
            "(use a lift that is constant near the boundary or another extension)"
        )


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    area: float
    f1: float
    f2: float
    slice_lhs: float
    slice_rhs: float

    def as_row(self):
        return {"eps": self.eps, "A": self.area, "F1": self.f1, "F2": self.f2,
                "slice_lhs": self.slice_lhs, "slice_rhs": self.slice_rhs}


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple
    poly_area: float
    poly_e_h: float
    poly_e_h_tilde: float
    poly_e_k: float

    @property
    def f1_bound(self):
        """``(pi / 2) E_H(P)``, the uniform bound for ``F1``."""
        return 0.5 * np.pi * self.poly_e_h

    @property
    def f2_constant(self):
        """Measured ``max F2 / E_K(P)`` (NaN when ``E_K(P) = 0``)."""
        if self.poly_e_k == 0:
            return float("nan")
        return max(r.f2 for r in self.rows) / self.poly_e_k


def smoothing_convergence_check(graph, n, eps_mults, extension="constant"):
    """Mollify a polyhedral graph at several radii ``eps = k dx`` and tabulate the energies."""
    dx = 1.0 / (n - 1)
    eps_list = [k * dx for k in eps_mults]
    check_margin(graph, max(eps_list), extension)
    f = graph_field(graph, n, extension)
    rows = []
    for eps in eps_list:
        rep = grid_energy_report(mollify(f, MollifierSpec(eps)))
        rows.append(ConvergenceRow(eps, rep.area, rep.f1, rep.f2, rep.slice_lhs, rep.slice_rhs))
    poly = energy_report(graph.to_surface3d())
    return ConvergenceTable(tuple(rows), poly.area, poly.e_h, poly.e_h_tilde, poly.e_k)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def pyramid_graph(height=0.5):
    """Square pyramid over the whole square: apex over the centre, corners at 0."""
    from .trisurf import GraphSurface, Triangulation2D

    pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], dtype=float)
    tris = np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]])
    return GraphSurface(Triangulation2D(pts, tris), np.array([0, 0, 0, 0, height], dtype=float))


def roof_graph(height=0.5):
    """Ridge along ``x1 = 1/2`` (the tent ``height (1 - |2 x1 - 1|)``)."""
    from .trisurf import GraphSurface, Triangulation2D

    pts = np.array([[0, 0], [0.5, 0], [1, 0], [0, 1], [0.5, 1], [1, 1]], dtype=float)
    tris = np.array([[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]])
    return GraphSurface(Triangulation2D(pts, tris), np.array([0, height, 0, 0, height, 0], dtype=float))


def paraboloid_field(n):
    return GridField.from_function(lambda x1, x2: 0.5 * (x1 ** 2 + x2 ** 2), n)


def paraboloid_gauss_energy(samples=2001):
    """``int_Q |K| sqrt(g)`` for ``u = (x1^2 + x2^2) / 2`` with ``K sqrt(g) = g^(-3/2)``.

    Tensor Gauss-Legendre quadrature, independent of the grid code.
    """
    x, w = np.polynomial.legendre.leggauss(samples // 20 + 20)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    g = 1.0 + X1 ** 2 + X2 ** 2
    return float(np.einsum("i,j,ij->", w, w, g ** -1.5))


@dataclass(frozen=True)
class LanternPatch:
    graph: object
    vertices2d: np.ndarray  # projected interior vertices inside the window (unit-square coords)
    envelope_area: float  # per-vertex envelope area (all stars congruent)
    params: object
    scale: float


def lantern_patch_graph(m=16, n=16, window=0.5):
    """A block of the lantern seen as a graph over the plane tangent to the cylinder.

    The cylinder (R = H = 1) is turned so its axis is the ``x2`` direction and
    the tile normals near angle 0 point up; the projected tiles are scaled so
    that a ``window x window`` square centred on a vertex becomes the unit
    square.  Tiles cover the square with room to spare for padding.
    """
    from .gauss_sphere import envelope_report
    from .lantern import LanternParams, build_lantern, lantern_vertex_diagnostics
    from .trisurf import GraphSurface, Triangulation2D

    p = LanternParams(m, n)
    S = build_lantern(p)
    diag = lantern_vertex_diagnostics(p, surface=S)
    c = S.points[diag.vertex]
    phi = np.arctan2(S.points[:, 1], S.points[:, 0])
    # rotate about the axis so the chosen vertex sits at angle 0
    phi0 = np.arctan2(c[1], c[0])
    rel = np.angle(np.exp(1j * (phi - phi0)))
    # keep tiles whose corners stay within 70 degrees of the vertex
    keep = np.all(np.abs(rel[S.triangles]) < np.deg2rad(70), axis=1)
    tris = S.triangles[keep]
    used = np.unique(tris)
    remap = -np.ones(len(S.points), dtype=np.int64)
    remap[used] = np.arange(used.size)
    # graph coordinates: tangential (sin), axial (z), height (cos)
    x1 = np.sin(rel[used])
    x2 = S.points[used, 2] - c[2]
    w = np.cos(rel[used])
    s = 1.0 / window
    pts2 = np.column_stack([0.5 + s * x1, 0.5 + s * x2])
    tri2 = remap[tris]
    # the lantern is oriented outward; projection keeps that orientation CCW
    a, b = pts2[tri2[:, 1]] - pts2[tri2[:, 0]], pts2[tri2[:, 2]] - pts2[tri2[:, 0]]
    area = 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    flip = area < 0
    tri2[flip] = tri2[flip][:, [0, 2, 1]]
    graph = GraphSurface(Triangulation2D(pts2, tri2), s * w)
    # interior lantern vertices that land inside the unit square
    inner = S.interior_vertices
    inner = inner[np.isin(inner, used)]
    v2 = pts2[remap[inner]]
    inside = np.all((v2 > 0) & (v2 < 1), axis=1)
    env = envelope_report(diag.normals, 2 * np.pi, align=True).area
    return LanternPatch(graph, v2[inside], env, p, s)


def lantern_patch_check(patch, n_grid, eps_mult=8.0, radius=None):
    """Smoothed ``F2`` collected in a disk around each interior vertex.

    Returns ``(per_vertex_f2, envelope_area, e_k)``; the polyhedral Gauss
    energy ``E_K`` of the patch is 0 while the per-vertex values are not.
    """
    f = graph_field(patch.graph, n_grid, "cover")
    dx = f.dx
    eps = eps_mult * dx
    rep = grid_energy_report(mollify(f, MollifierSpec(eps)))
    # half the distance to the nearest other vertex keeps disks disjoint
    v = patch.vertices2d
    if radius is None:
        dmin = np.min([np.linalg.norm(np.delete(v, i, axis=0) - v[i], axis=1).min() for i in range(len(v))])
        radius = 0.5 * dmin
    far = _segment_to_boundary(v) > radius
    vals = np.array([disk_integral(rep.xi2, dx, c, radius) for c in v[far]])
    e_k = energy_report(patch.graph.to_surface3d()).e_k
    return vals, patch.envelope_area, e_k, radius
