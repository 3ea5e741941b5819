"""Edge and vertex curvature of triangulated surfaces.

Mean curvature lives on interior edges, through the exterior dihedral angle
``theta_e`` between the two face normals.  Gauss curvature lives on interior
vertices as the angle defect ``2 pi - sum of tile angles``.  Both are
aggregated in :class:`EnergyReport`.

Two edge conventions are carried side by side: ``e_h`` sums
``L(e) * 2 sin(theta_e / 2)`` and ``e_h_tilde`` sums ``L(e) * theta_e``.  Neither
includes the factor 1/2 of ``H = (k1 + k2) / 2``; the ``*_half`` properties do.
"""

import csv
from dataclasses import dataclass, asdict

import numpy as np

from . import _kernels
from .errors import ArgumentError, BoundaryError

PARABOLIC_TOL = 1e-9

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class EdgeCurvatureRecord:
    edge_id: int
    length: float
    theta: float
    sullivan: float
    angle_version: float


@dataclass(frozen=True)
class VertexCurvatureRecord:
    vertex_id: int
    angle_sum: float
    defect: float
    vertex_class: str


@dataclass(frozen=True)
class EnergyReport:
    area: float
    e_h: float
    e_h_tilde: float
    e_k: float
    e_k_tilde: float

    @property
    def total(self):
        return self.area + self.e_h + self.e_k

    @property
    def e_h_half(self):
        return 0.5 * self.e_h

    @property
    def e_h_tilde_half(self):
        return 0.5 * self.e_h_tilde

    def as_row(self):
        row = asdict(self)
        row["total"] = self.total
        return row


REPORT_COLUMNS = ("area", "e_h", "e_h_tilde", "e_k", "e_k_tilde", "total")


def classify_defect(defect, tol=PARABOLIC_TOL):
    if defect > tol:
        return ELLIPTIC
    if defect < -tol:
        return HYPERBOLIC
    return PARABOLIC


# ---------------------------------------------------------------------------
# edges
# ---------------------------------------------------------------------------

def interior_dihedral_angles(surface):
    """``(edge_ids, theta)`` for all interior edges, in edge-index order."""
    ids = surface.interior_edges
    f = surface.edge_faces[ids]
    nrm = surface.face_normals
    theta = _kernels.pair_angles(np.ascontiguousarray(nrm[f[:, 0]]), np.ascontiguousarray(nrm[f[:, 1]]))
    return ids, theta


def dihedral_angle(surface, edge):
    """Exterior dihedral angle at an interior edge, ``atan2(|n1 x n2|, n1 . n2)``."""
    e = int(edge)
    if e < 0 or e >= len(surface.edges):
        raise ArgumentError(f"edge {e} out of range")
    f0, f1 = surface.edge_faces[e]
    if f1 < 0:
        raise BoundaryError(f"edge {e} is a boundary edge")
    n = surface.face_normals
    return float(_kernels.pair_angles_numpy(n[f0][None], n[f1][None])[0])


def edge_records(surface):
    ids, theta = interior_dihedral_angles(surface)
    length = surface.edge_lengths[ids]
    sull = length * 2.0 * np.sin(theta / 2.0)
    ang = length * theta
    return [EdgeCurvatureRecord(int(i), float(l), float(t), float(s), float(a))
            for i, l, t, s, a in zip(ids, length, theta, sull, ang)]


def mean_curvature_energy(surface):
    """``(E_H, E~_H)``: sums of ``L 2 sin(theta/2)`` and ``L theta`` over interior edges."""
    ids, theta = interior_dihedral_angles(surface)
    length = surface.edge_lengths[ids]
    return float(np.sum(length * 2.0 * np.sin(theta / 2.0))), float(np.sum(length * theta))


# ---------------------------------------------------------------------------
# vertices
# ---------------------------------------------------------------------------

def vertex_angle_sums(surface):
    """Sum of the 3D tile angles at every vertex (boundary ones included)."""
    ang = _kernels.corner_angles(surface.points, surface.triangles)
    return np.bincount(surface.triangles.ravel(), weights=ang.ravel(), minlength=len(surface.points))


def angle_defect(surface, vertex, tol=PARABOLIC_TOL):
    v = int(vertex)
    if v < 0 or v >= len(surface.points):
        raise ArgumentError(f"vertex {v} out of range")
    if surface.boundary_vertex_mask[v] or not surface.used_vertex_mask[v]:
        raise BoundaryError(f"vertex {v} is not an interior vertex")
    rows, cols = np.nonzero(surface.triangles == v)
    ang = _kernels.corner_angles_numpy(surface.points, surface.triangles[rows])
    s = float(ang[np.arange(len(rows)), cols].sum())
    d = 2.0 * np.pi - s
    return VertexCurvatureRecord(v, s, d, classify_defect(d, tol))


def vertex_records(surface, tol=PARABOLIC_TOL):
    sums = vertex_angle_sums(surface)
    out = []
    for v in surface.interior_vertices:
        d = 2.0 * np.pi - sums[v]
        out.append(VertexCurvatureRecord(int(v), float(sums[v]), float(d), classify_defect(d, tol)))
    return out


def energy_report(surface):
    e_h, e_h_tilde = mean_curvature_energy(surface)
    inner = surface.interior_vertices
    sums = vertex_angle_sums(surface)[inner]
    defects = 2.0 * np.pi - sums
    return EnergyReport(
        area=surface.area,
        e_h=e_h,
        e_h_tilde=e_h_tilde,
        e_k=float(np.sum(np.abs(defects))),
        e_k_tilde=float(np.sum(sums)),
    )


# ---------------------------------------------------------------------------
# refinement sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelaxedSummary:
    """Summary of one refinement family.

    ``liminf_estimate`` is the smaller total energy of the two finest levels,
    a finite-data stand-in for the liminf along this family.  Since the
    relaxed energy is an infimum over all inscribed sequences, the liminf of
    one family only bounds it from above; no claim about the infimum is made.
    """

    meshes: tuple
    totals: tuple
    running_infimum: tuple
    liminf_estimate: float


def relaxed_sequence(u, family):
    """Energy reports of ``P(u, Delta_h)`` along a family with decreasing mesh."""
    from .trisurf import inscribe_graph

    family = list(family)
    if len(family) < 2:
        raise ArgumentError("a refinement family needs at least 2 triangulations")
    meshes = [t.mesh for t in family]
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise ArgumentError("triangulation meshes must be strictly decreasing")
    reports = [energy_report(inscribe_graph(u, t).to_surface3d()) for t in family]
    totals = np.array([r.total for r in reports])
    tail = totals[-2:]
    summary = RelaxedSummary(
        meshes=tuple(meshes),
        totals=tuple(float(x) for x in totals),
        running_infimum=tuple(float(x) for x in np.minimum.accumulate(totals)),
        liminf_estimate=float(tail.min()),
    )
    return reports, summary


# ---------------------------------------------------------------------------
# CSV dumps
# ---------------------------------------------------------------------------

def _fmt(x):
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def write_edge_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["edge_id", "length", "theta", "sullivan"])
        for r in records:
            w.writerow([r.edge_id, _fmt(r.length), _fmt(r.theta), _fmt(r.sullivan)])


def write_vertex_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex_id", "angle_sum", "defect", "class"])
        for r in records:
            w.writerow([r.vertex_id, _fmt(r.angle_sum), _fmt(r.defect), r.vertex_class])
