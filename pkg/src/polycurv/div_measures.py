"""Edge-supported measures of a polyhedral graph.

For a piecewise-affine ``u`` the unit normal ``nu = (-grad u, 1) / sqrt(1 + |grad u|^2)``
and the fields ``sigma^j = nu^j (-d2 u, d1 u)`` are constant per triangle, so
the measures ``D nu^j`` and ``div sigma^j`` live on the interior edges of the
planar triangulation.  Their joint variation on an edge is the jump of the
field times the edge length; the sum over edges reproduces ``E_H`` of the lift.
"""

from dataclasses import dataclass

import numpy as np

from .curvature import dihedral_angle, mean_curvature_energy
from .errors import ArgumentError, BoundaryError


@dataclass(frozen=True)
class SigmaField:
    """``values[t, j]`` is the constant vector ``sigma^j`` on triangle ``t``."""

    values: np.ndarray


def sigma_fields(graph):
    g = graph.gradients
    nu = graph.normals
    rot = np.column_stack([-g[:, 1], g[:, 0]])
    return SigmaField(nu[:, :, None] * rot[:, None, :])


@dataclass(frozen=True)
class EdgeMeasureRecord:
    edge_id: int
    normal: np.ndarray  # unit planar normal n_e
    nu_jump: np.ndarray  # (3,): nu_2^j - nu_1^j (the D nu^j density is this times n_e)
    sigma_jump: np.ndarray  # (3,): (sigma_2^j - sigma_1^j) . n_e
    length2d: float
    mass: float


def _sides(graph, ids):
    """Edge normals and the faces on their negative / positive side."""
    tri = graph.triangulation
    pts = tri.points
    e = tri.edges[ids]
    t = pts[e[:, 1]] - pts[e[:, 0]]
    length = np.linalg.norm(t, axis=1)
    t = t / length[:, None]
    n = np.column_stack([-t[:, 1], t[:, 0]])
    faces = tri.edge_faces[ids]
    # the corner of face 0 opposite to the edge tells which side it is on
    f0 = tri.triangles[faces[:, 0]]
    third = np.where(f0 == e[:, [0]], -1, f0)
    third = np.where(third == e[:, [1]], -1, third).max(axis=1)
    s0 = np.einsum("ij,ij->i", pts[third] - pts[e[:, 0]], n)
    neg = np.where(s0 < 0, faces[:, 0], faces[:, 1])
    pos = np.where(s0 < 0, faces[:, 1], faces[:, 0])
    return n, neg, pos, length


def _masses(graph, ids):
    n, t1, t2, length = _sides(graph, ids)
    nu = graph.normals
    sig = sigma_fields(graph).values
    dnu = nu[t2] - nu[t1]
    dsig = np.einsum("ejk,ek->ej", sig[t2] - sig[t1], n)
    mass = length * np.sqrt(np.sum(dnu ** 2, axis=1) + np.sum(dsig ** 2, axis=1))
    return n, dnu, dsig, length, mass


def edge_measure(graph, edge):
    tri = graph.triangulation
    e = int(edge)
    if e < 0 or e >= len(tri.edges):
        raise ArgumentError(f"edge {e} out of range")
    if tri.edge_faces[e, 1] < 0:
        raise BoundaryError(f"edge {e} lies on the boundary")
    n, dnu, dsig, length, mass = _masses(graph, np.array([e]))
    return EdgeMeasureRecord(e, n[0], dnu[0], dsig[0], float(length[0]), float(mass[0]))


def edge_measures(graph):
    ids = graph.triangulation.interior_edges
    n, dnu, dsig, length, mass = _masses(graph, ids)
    return [EdgeMeasureRecord(int(i), n[k], dnu[k], dsig[k], float(length[k]), float(mass[k]))
            for k, i in enumerate(ids)]


def total_mass(graph):
    ids = graph.triangulation.interior_edges
    return float(np.sum(_masses(graph, ids)[-1]))


def mu_density(graph):
    """``mu^j = d1 u d2 nu^j - d2 u d1 nu^j`` per triangle.

    The normal is constant on each triangle, so its derivatives, and with them
    every ``mu^j``, vanish identically.
    """
    g = graph.gradients
    dnu = np.zeros((len(g), 3, 2))
    return g[:, None, 0] * dnu[:, :, 1] - g[:, None, 1] * dnu[:, :, 0]


@dataclass(frozen=True)
class MassSummary:
    total_mass: float
    e_h: float

    @property
    def rel_err(self):
        if self.e_h == 0.0:
            return abs(self.total_mass)
        return abs(self.total_mass - self.e_h) / self.e_h


def mass_summary(graph):
    e_h, _ = mean_curvature_energy(graph.to_surface3d())
    return MassSummary(total_mass(graph), e_h)


def edge_rows(graph):
    """Per-edge rows ``edge_id, length2d, length3d, theta, mass``."""
    S = graph.to_surface3d()
    rows = []
    for r in edge_measures(graph):
        a, b = graph.triangulation.edges[r.edge_id]
        k = S.edge_index(a, b)
        rows.append({"edge_id": r.edge_id, "length2d": r.length2d, "length3d": float(S.edge_lengths[k]),
                     "theta": dihedral_angle(S, k), "mass": r.mass})
    return rows


def random_grid_graph(rng, k=8, scale=1.0):
    """Lift of i.i.d. normal heights on the regular ``k x k`` grid."""
    from .trisurf import GraphSurface, regular_grid_triangulation

    tri = regular_grid_triangulation(k)
    return GraphSurface(tri, scale * rng.normal(size=len(tri.points)))
