"""Spherical polygons on the Gauss sphere and envelopes of vertex-star normals.

The geodesic convex envelope of a set of unit vectors in the open upper
hemisphere is built in the gnomonic chart ``p -> (p1/p3, p2/p3)``, where great
circles become straight lines, so an ordinary planar convex hull does the job.
Areas are computed from the vertex angles (spherical excess); an independent
fan triangulation with l'Huilier's formula is kept as a cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .curvature import PARABOLIC_TOL, angle_defect
from .errors import ArgumentError, GeodesicError, HemisphereError, PreconditionError
from .trisurf import vertex_star

HEMISPHERE_DELTA = 1e-6
HULL_TOL = 1e-12
UNIT_TOL = 1e-12


def as_unit_vectors(vectors, tol=UNIT_TOL):
    """Validate an (n, 3) array of unit vectors and return it as float64."""
    v = np.array(vectors, dtype=float).reshape(-1, 3)
    if not np.all(np.isfinite(v)):
        raise ArgumentError("unit vectors must be finite")
    bad = np.abs(np.linalg.norm(v, axis=1) - 1.0) > tol
    if np.any(bad):
        raise ArgumentError(f"vector {int(np.argmax(bad))} is not of unit length")
    return v


@dataclass(frozen=True)
class SphericalPolygon:
    vertices: np.ndarray
    convex: bool = True

    def __post_init__(self):
        v = as_unit_vectors(self.vertices)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class EnvelopeReport:
    polygon: SphericalPolygon
    area: float
    gamma: np.ndarray
    theta_sum: float

    @property
    def bound(self):
        return 2.0 * np.pi * self.theta_sum

    @property
    def ok(self):
        return bool(self.area <= self.bound)

    def as_row(self):
        return {"k": len(self.polygon), "area": self.area, "theta_sum": self.theta_sum,
                "bound": self.bound, "ok": self.ok}


def _arc(a, b):
    c = np.cross(a, b)
    return np.arctan2(np.linalg.norm(c, axis=-1), np.einsum("...i,...i->...", a, b))


def _on_one_geodesic(v):
    if len(v) <= 2:
        return True
    # smallest singular value of the vertex matrix vanishes iff a plane through 0 holds them
    return np.linalg.svd(v, compute_uv=False)[-1] <= 1e-12


def _check_antipodes(v):
    nxt = np.roll(v, -1, axis=0)
    if np.any(np.einsum("ij,ij->i", v, nxt) <= -1.0 + 1e-12):
        raise GeodesicError("consecutive vertices are antipodal; the joining geodesic is undefined")


def vertex_angles(poly):
    """Angles ``gamma_j`` between the geodesic tangents toward both neighbours."""
    v = poly.vertices
    prev = np.roll(v, 1, axis=0)
    nxt = np.roll(v, -1, axis=0)
    t1 = prev - np.einsum("ij,ij->i", prev, v)[:, None] * v
    t2 = nxt - np.einsum("ij,ij->i", nxt, v)[:, None] * v
    return np.arctan2(np.linalg.norm(np.cross(t1, t2), axis=1), np.einsum("ij,ij->i", t1, t2))


def spherical_polygon_area(poly):
    """Area of a convex spherical polygon, ``sum gamma_j - (k - 2) pi``.

    Polygons with at most two vertices, or with all vertices on one great
    circle, have area 0.
    """
    v = poly.vertices
    if len(v) <= 2:
        return 0.0
    _check_antipodes(v)
    if _on_one_geodesic(v):
        return 0.0
    g = vertex_angles(poly)
    return float(max(g.sum() - (len(v) - 2) * np.pi, 0.0))


def lhuilier_triangle_area(a, b, c):
    """Spherical excess of the triangle ``abc`` from its side lengths."""
    sa, sb, sc = _arc(b, c), _arc(c, a), _arc(a, b)
    s = 0.5 * (sa + sb + sc)
    prod = np.tan(s / 2) * np.tan((s - sa) / 2) * np.tan((s - sb) / 2) * np.tan((s - sc) / 2)
    return 4.0 * np.arctan(np.sqrt(np.maximum(prod, 0.0)))


def lhuilier_fan_area(poly):
    """Area by fanning from the first vertex and summing l'Huilier excesses."""
    v = poly.vertices
    if len(v) <= 2:
        return 0.0
    _check_antipodes(v)
    return float(np.sum(lhuilier_triangle_area(v[0], v[1:-1], v[2:])))


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------

def _convex_hull_2d(pts, tol=HULL_TOL):
    """Counterclockwise hull (monotone chain), collinear points dropped."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def chain(seq):
        out = []
        for q in seq:
            while len(out) >= 2 and cross(p[out[-2]], p[out[-1]], p[q]) <= tol:
                out.pop()
            out.append(q)
        return out

    idx = list(range(len(p)))
    lower = chain(idx)
    upper = chain(idx[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and np.all(p[hull[0]] == p[hull[1]]):
        hull = hull[:1]
    return order[hull] if hull else order[:1]


def geodesic_envelope(normals, delta=HEMISPHERE_DELTA):
    """Geodesically convex envelope of unit vectors with ``z >= delta``."""
    n = as_unit_vectors(normals)
    if len(n) == 0:
        raise ArgumentError("need at least one normal")
    low = n[:, 2] < delta
    if np.any(low):
        raise HemisphereError(f"normal {int(np.argmax(low))} has z < {delta:g}")
    proj = n[:, :2] / n[:, 2:3]
    hull = _convex_hull_2d(proj)
    return SphericalPolygon(n[hull], convex=True)


def rotation_to_pole(direction):
    """Rotation matrix taking ``direction`` to ``(0, 0, 1)``."""
    a = np.asarray(direction, dtype=float)
    a = a / np.linalg.norm(a)
    c = a[2]
    v = np.array([a[1], -a[0], 0.0])  # a x e3
    s2 = v @ v
    if s2 < 1e-30:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K * ((1.0 - c) / s2)


def star_normals(surface, vertex):
    """Face normals of the star of ``vertex`` in cyclic order."""
    faces, _ = vertex_star(surface, vertex)
    return surface.face_normals[faces]


def envelope_report(normals, theta_sum, align=False):
    n = as_unit_vectors(normals)
    if align:
        mean = n.sum(axis=0)
        if np.linalg.norm(mean) < 1e-12:
            raise HemisphereError("normals average to zero; no pole to align with")
        n = n @ rotation_to_pole(mean).T
    poly = geodesic_envelope(n)
    area = spherical_polygon_area(poly)
    gamma = vertex_angles(poly) if len(poly) >= 3 else np.zeros(0)
    return EnvelopeReport(poly, area, gamma, float(theta_sum))


def envelope_bound_check(surface, vertex, align=False):
    """Envelope of the star normals at an interior vertex, with the bound ``2 pi sum theta_j``.

    ``align=True`` first rotates the mean normal to the pole; surfaces that
    are not graphs over the (x, y) plane (lantern, prism) need it.
    """
    rec = angle_defect(surface, vertex)
    return envelope_report(star_normals(surface, vertex), rec.angle_sum, align=align)


@dataclass(frozen=True)
class EllipticCheck:
    area: float
    defect: float

    @property
    def error(self):
        return abs(self.area - self.defect)

    def __iter__(self):
        return iter((self.area, self.defect, self.error))


def elliptic_identity_check(surface, vertex, tol=PARABOLIC_TOL, align=False):
    """Envelope area against the angle defect at an elliptic vertex."""
    rec = angle_defect(surface, vertex, tol)
    if rec.defect <= tol:
        raise PreconditionError(
            f"vertex {rec.vertex_id} is {rec.vertex_class} (defect {rec.defect:.3g}); the identity needs an elliptic vertex"
        )
    rep = envelope_report(star_normals(surface, vertex), rec.angle_sum, align=align)
    return EllipticCheck(rep.area, rec.defect)


def random_vertex_star(rng, k_range=(3, 9), height_scale=1.0):
    """Random graph-surface star: a center over a perturbed ring of ``k`` points.

    Returns ``(surface, center_index)``.  The ring is star-shaped around the
    origin so the projected star is a valid fan of CCW triangles.
    """
    from .trisurf import TriangulatedSurface3D

    k = int(rng.integers(k_range[0], k_range[1] + 1))
    base = np.sort(rng.uniform(0.0, 2.0 * np.pi, k))
    # keep every angular gap below pi so the fan is star-shaped
    while np.max(np.diff(np.concatenate([base, [base[0] + 2 * np.pi]]))) >= np.pi * 0.95:
        base = np.sort(rng.uniform(0.0, 2.0 * np.pi, k))
    r = rng.uniform(0.3, 1.0, k)
    ring = np.column_stack([r * np.cos(base), r * np.sin(base), height_scale * rng.normal(size=k)])
    center = np.array([[0.0, 0.0, height_scale * rng.normal()]])
    pts = np.vstack([center, ring])
    tris = np.array([[0, 1 + i, 1 + (i + 1) % k] for i in range(k)])
    return TriangulatedSurface3D(pts, tris), 0


def convex_quadratic_lift(rng, k_range=(2, 8)):
    """Random convex quadratic sampled on a regular grid of ``[0,1]^2``.

    On the grid with (+1, +1) diagonals the interpolant of
    ``a x^2 + 2 b x y + c y^2`` is convex across horizontal, vertical and
    diagonal edges iff ``-min(a, c) <= b <= 0``, so ``b`` is drawn strictly
    inside that range and every interior vertex is elliptic.
    """
    from .trisurf import GraphSurface, regular_grid_triangulation

    k = int(rng.integers(k_range[0], k_range[1] + 1))
    a, c = rng.uniform(0.2, 3.0, 2)
    b = -rng.uniform(0.05, 0.95) * min(a, c)
    lin = rng.normal(size=2)
    tri = regular_grid_triangulation(k)
    x, y = tri.points.T
    return GraphSurface(tri, a * x * x + 2 * b * x * y + c * y * y + lin[0] * x + lin[1] * y)
