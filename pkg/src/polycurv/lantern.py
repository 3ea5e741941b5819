"""Schwarz lantern triangulations of a cylinder and inscribed prisms.

The lantern ``P_{m,n}`` of a cylinder of radius R and height H puts vertices
at angle ``pi i / m`` and height ``H j / n`` whenever ``i`` and ``j`` have the
same parity; each of the ``n`` horizontal strips carries ``2m`` congruent
isosceles triangles.  Closed forms for its area and for the edge mean
curvature (split into horizontal "base" edges, total F1, and slanted "lateral"
edges, total F2) are checked against direct summation over the mesh.
"""

from dataclasses import dataclass

import numpy as np

from .curvature import angle_defect, energy_report, interior_dihedral_angles, vertex_angle_sums
from .errors import ArgumentError
from .gauss_sphere import envelope_report, star_normals
from .trisurf import TriangulatedSurface3D, vertex_star


@dataclass(frozen=True)
class LanternParams:
    m: int
    n: int
    R: float = 1.0
    H: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 4 or self.m % 2:
            raise ArgumentError(f"m must be an even integer >= 4, got {self.m}")
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise ArgumentError(f"n must be an even integer >= 2, got {self.n}")
        if not (self.R > 0 and self.H > 0 and np.isfinite(self.R) and np.isfinite(self.H)):
            raise ArgumentError("R and H must be positive and finite")

    @property
    def alpha(self):
        return np.pi / self.m

    @property
    def b(self):
        return 2.0 * self.R * np.sin(self.alpha)

    @property
    def d(self):
        return 2.0 * self.R * np.sin(self.alpha / 2.0) ** 2

    @property
    def h(self):
        return np.hypot(self.H / self.n, self.d)

    @property
    def n_interior_vertices(self):
        return self.m * (self.n - 1)


@dataclass(frozen=True)
class PrismParams:
    n: int
    R: float = 1.0
    H: float = 1.0
    slices: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ArgumentError(f"prism needs n >= 3 sides, got {self.n}")
        if int(self.slices) != self.slices or self.slices < 1:
            raise ArgumentError("slices must be >= 1")
        if not (self.R > 0 and self.H > 0):
            raise ArgumentError("R and H must be positive")

    @property
    def side(self):
        return 2.0 * self.R * np.sin(np.pi / self.n)


def _orient_outward(points, tris):
    p = points[tris]
    nrm = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    radial = p.mean(axis=1) * np.array([1.0, 1.0, 0.0])
    flip = np.einsum("ij,ij->i", nrm, radial) < 0
    tris = tris.copy()
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def lantern_vertex_id(p, i, j):
    """Mesh index of the vertex at angle ``pi i / m`` and height ``H j / n``."""
    if (i - j) % 2:
        raise ArgumentError("lantern vertices need i and j of equal parity")
    return j * p.m + ((i - (j % 2)) % (2 * p.m)) // 2


def build_lantern(p):
    m, n = p.m, p.n
    pts = np.empty(((n + 1) * m, 3))
    for j in range(n + 1):
        for k in range(m):
            phi = (2 * k + (j % 2)) * p.alpha
            pts[j * m + k] = (p.R * np.cos(phi), p.R * np.sin(phi), p.H * j / n)
    tris = []
    for j in range(n):
        for k in range(m):
            i = 2 * k + (j % 2)
            # base on level j, apex above; then base on level j + 1, apex below
            tris.append((lantern_vertex_id(p, i, j), lantern_vertex_id(p, i + 2, j), lantern_vertex_id(p, i + 1, j + 1)))
            tris.append((lantern_vertex_id(p, i + 1, j + 1), lantern_vertex_id(p, i + 3, j + 1), lantern_vertex_id(p, i + 2, j)))
    tris = _orient_outward(pts, np.array(tris, dtype=np.int64))
    return TriangulatedSurface3D(pts, tris)


def closed_form_area(p):
    return 2.0 * p.m * p.n * p.R * np.sin(p.alpha) * np.sqrt((p.H / p.n) ** 2 + 4.0 * p.R ** 2 * np.sin(p.alpha / 2) ** 4)


def closed_form_f1(p):
    """Half-angle mean curvature on the horizontal edges, as a closed formula."""
    return 2.0 * p.m * (p.n - 1) * p.R * np.sin(p.alpha) * np.arctan(p.n / p.H * 2.0 * p.R * np.sin(p.alpha / 2) ** 2)


def _lateral_configuration(p):
    a = p.alpha
    z = p.H / p.n
    A = np.array([p.R, 0.0, 0.0])
    B = np.array([p.R * np.cos(2 * a), p.R * np.sin(2 * a), 0.0])
    C = np.array([p.R * np.cos(a), p.R * np.sin(a), z])
    D = np.array([p.R * np.cos(a), -p.R * np.sin(a), z])
    return A, B, C, D


def lateral_dihedral_angle(p):
    """Exact exterior angle at a slanted edge, from the normals of two adjacent tiles."""
    A, B, C, D = _lateral_configuration(p)
    n1 = np.cross(B - A, C - A)
    n2 = np.cross(C - A, D - A)
    return float(np.arctan2(np.linalg.norm(np.cross(n1, n2)), n1 @ n2))


def base_dihedral_angle(p):
    return float(2.0 * np.arctan(p.d * p.n / p.H))


def closed_form_f2(p):
    """Half-angle mean curvature on the slanted edges (exact dihedral angle)."""
    return 2.0 * p.m * p.n * np.sqrt(p.h ** 2 + (p.b / 2) ** 2) * lateral_dihedral_angle(p) / 2.0


def f2_arcsin_asymptotic(p):
    """F2 with the simplified arcsin angle; NaN when the arcsin argument exceeds 1."""
    arg = (p.H / p.n) / p.h ** 2 * np.sin(p.alpha)
    if arg > 1.0:
        return float("nan")
    return 2.0 * p.m * p.n * np.sqrt(p.h ** 2 + (p.b / 2) ** 2) * np.arcsin(arg) / 2.0


@dataclass(frozen=True)
class LanternConsistency:
    params: LanternParams
    base_count: int
    lateral_count: int
    base_sum: float
    lateral_sum: float
    f1: float
    f2: float

    @property
    def f1_rel_err(self):
        return abs(self.base_sum - self.f1) / max(abs(self.f1), 1e-300)

    @property
    def f2_rel_err(self):
        return abs(self.lateral_sum - self.f2) / max(abs(self.f2), 1e-300)

    @property
    def lower_bound_margin(self):
        """``(F1 + F2) / (pi H)``."""
        return (self.f1 + self.f2) / (np.pi * self.params.H)

    def ok(self, rel=1e-8, eps=1e-3):
        return (
            self.base_count == self.params.m * (self.params.n - 1)
            and self.lateral_count == 2 * self.params.m * self.params.n
            and self.f1_rel_err <= rel
            and self.f2_rel_err <= rel
            and self.lower_bound_margin >= 1.0 - eps
        )


def lantern_mean_curvature_consistency(p, surface=None):
    S = build_lantern(p) if surface is None else surface
    ids, theta = interior_dihedral_angles(S)
    e = S.edges[ids]
    z = S.points[:, 2]
    base = np.abs(z[e[:, 0]] - z[e[:, 1]]) <= 1e-12 * p.H
    contrib = S.edge_lengths[ids] * theta / 2.0
    return LanternConsistency(
        params=p,
        base_count=int(base.sum()),
        lateral_count=int((~base).sum()),
        base_sum=float(contrib[base].sum()),
        lateral_sum=float(contrib[~base].sum()),
        f1=float(closed_form_f1(p)),
        f2=float(closed_form_f2(p)),
    )


def lower_semicontinuity_sweep(values_m, values_n, R=1.0, H=1.0):
    """``(F1 + F2) / (pi H)`` over a parameter grid, as rows ``(m, n, ratio)``."""
    rows = []
    for m in values_m:
        for n in values_n:
            p = LanternParams(m, n, R, H)
            rows.append((m, n, (closed_form_f1(p) + closed_form_f2(p)) / (np.pi * H)))
    return rows


SWEEP_MODES = ("m=n", "m=n^2", "n=m^2", "n=m^4")


def sweep_params(mode, values, R=1.0, H=1.0):
    """Parameters along one of the classical refinement paths.

    For ``m=n`` and ``m=n^2`` the list gives ``n``; for ``n=m^2`` and
    ``n=m^4`` it gives ``m``.
    """
    out = []
    for v in values:
        v = int(v)
        if mode == "m=n":
            out.append(LanternParams(v, v, R, H))
        elif mode == "m=n^2":
            out.append(LanternParams(v * v, v, R, H))
        elif mode == "n=m^2":
            out.append(LanternParams(v, v * v, R, H))
        elif mode == "n=m^4":
            out.append(LanternParams(v, v ** 4, R, H))
        else:
            raise ArgumentError(f"unknown sweep mode {mode!r}; choose from {', '.join(SWEEP_MODES)}")
    return out


def lantern_row(p, with_mesh=True):
    """Sweep row ``n, m, area, f1, f2, e_k, defect_max``.

    Without the mesh, ``e_k`` and ``defect_max`` are NaN and ``area`` comes
    from the closed form (useful where the mesh would be huge).
    """
    row = {"n": p.n, "m": p.m, "area": float(closed_form_area(p)),
           "f1": float(closed_form_f1(p)), "f2": float(closed_form_f2(p)),
           "e_k": float("nan"), "defect_max": float("nan")}
    if with_mesh:
        S = build_lantern(p)
        rep = energy_report(S)
        sums = vertex_angle_sums(S)[S.interior_vertices]
        row["area"] = rep.area
        row["e_k"] = rep.e_k
        row["defect_max"] = float(np.max(np.abs(2 * np.pi - sums))) if sums.size else 0.0
    return row


# ---------------------------------------------------------------------------
# vertex star diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LanternVertexDiagnostics:
    params: LanternParams
    vertex: int
    normals: np.ndarray
    d1: float
    d2: float
    envelope_area: float
    defect: float

    @property
    def total_envelope(self):
        """Per-vertex area times the number of interior vertices (all stars are congruent)."""
        return self.envelope_area * self.params.n_interior_vertices

    def as_row(self):
        return {"d1": self.d1, "d2": self.d2, "envelope_area": self.envelope_area, "total_envelope": self.total_envelope}


def canonical_vertex(p):
    j = p.n // 2
    return lantern_vertex_id(p, j % 2, j)


def lantern_vertex_diagnostics(p, require_unit=True, surface=None):
    """Star normals ``N1..N6`` of a canonical interior vertex and their spread.

    ``N1`` is the tile whose base lies below the vertex; the rest follow the
    cyclic order of the star, so ``N4`` is the tile whose base lies above.
    ``d1 = |N2 - N5|`` and ``d2 = |N1 - N4|``.
    """
    if require_unit and (p.R != 1.0 or p.H != 1.0):
        raise ArgumentError("vertex diagnostics are defined for R = H = 1")
    S = build_lantern(p) if surface is None else surface
    v = canonical_vertex(p)
    faces, ring = vertex_star(S, v)
    if len(faces) != 6:
        raise ArgumentError(f"expected 6 tiles around a lantern vertex, got {len(faces)}")
    zv = S.points[v, 2]
    # tile whose two other corners both sit one level below
    other_z = np.array([[S.points[c, 2] for c in S.triangles[f] if c != v] for f in faces])
    below = np.flatnonzero(np.all(other_z < zv - 1e-12, axis=1))
    start = int(below[0])
    N = star_normals(S, v)
    N = np.roll(N, -start, axis=0)
    d1 = float(np.linalg.norm(N[1] - N[4]))
    d2 = float(np.linalg.norm(N[0] - N[3]))
    rec = angle_defect(S, v)
    env = envelope_report(N, rec.angle_sum, align=True)
    return LanternVertexDiagnostics(p, v, N, d1, d2, env.area, rec.defect)


# ---------------------------------------------------------------------------
# prisms
# ---------------------------------------------------------------------------

def build_prism(p):
    """Lateral surface of the inscribed regular ``n``-gon prism.

    Each rectangular face carries a ``slices x slices`` grid, every cell cut
    along one diagonal.
    """
    cols = p.n * p.slices
    corners = np.column_stack([p.R * np.cos(2 * np.pi * np.arange(p.n + 1) / p.n),
                               p.R * np.sin(2 * np.pi * np.arange(p.n + 1) / p.n)])
    c = np.arange(cols)
    k, t = c // p.slices, (c % p.slices) / p.slices
    xy = (1.0 - t)[:, None] * corners[k] + t[:, None] * corners[k + 1]
    z = p.H * np.arange(p.slices + 1) / p.slices
    pts = np.column_stack([np.tile(xy, (p.slices + 1, 1)), np.repeat(z, cols)])

    def vid(col, row):
        return row * cols + col % cols

    tris = []
    for r in range(p.slices):
        for q in range(cols):
            tris.append((vid(q, r), vid(q + 1, r), vid(q + 1, r + 1)))
            tris.append((vid(q, r), vid(q + 1, r + 1), vid(q, r + 1)))
    return TriangulatedSurface3D(pts, _orient_outward(pts, np.array(tris, dtype=np.int64)))


@dataclass(frozen=True)
class PrismReport:
    params: PrismParams
    area: float
    lateral_area: float
    e_h_tilde_half: float
    e_k: float
    max_abs_defect: float
    max_envelope_area: float

    @property
    def expected_e_h_tilde_half(self):
        return np.pi * self.params.H

    @property
    def rel_err(self):
        return abs(self.e_h_tilde_half - self.expected_e_h_tilde_half) / self.expected_e_h_tilde_half

    def ok(self, rel=1e-12, tol=1e-12):
        return self.rel_err <= rel and self.max_abs_defect <= tol and self.max_envelope_area <= tol

    def as_row(self):
        return {"n": self.params.n, "slices": self.params.slices, "area": self.area,
                "lateral_area": self.lateral_area, "e_h_tilde_half": self.e_h_tilde_half,
                "e_k": self.e_k, "max_abs_defect": self.max_abs_defect,
                "max_envelope_area": self.max_envelope_area}


def prism_report(p, surface=None):
    S = build_prism(p) if surface is None else surface
    rep = energy_report(S)
    inner = S.interior_vertices
    sums = vertex_angle_sums(S)[inner]
    env = 0.0
    for v, s in zip(inner, sums):
        env = max(env, envelope_report(star_normals(S, v), s, align=True).area)
    return PrismReport(
        params=p,
        area=rep.area,
        lateral_area=p.n * p.side * p.H,
        e_h_tilde_half=rep.e_h_tilde_half,
        e_k=rep.e_k,
        max_abs_defect=float(np.max(np.abs(2 * np.pi - sums))) if sums.size else 0.0,
        max_envelope_area=float(env),
    )
