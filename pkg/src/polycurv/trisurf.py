"""Triangulations of the unit square, inscribed polyhedral graphs, general
triangulated surfaces in R^3, and OFF file input/output.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ArgumentError,
    BoundaryError,
    InvalidMeshError,
    OffParseError,
    TopologyError,
)


def _edge_table(triangles, n_points):
    """Unique undirected edges and their incident faces.

    Returns ``edges`` (E, 2) sorted pairs in lexicographic order, ``edge_faces``
    (E, 2) with -1 for a missing second face, and ``face_edges`` (T, 3) where
    column c is the edge opposite to corner c.
    """
    tri = np.asarray(triangles, dtype=np.int64)
    directed = np.stack([tri[:, [1, 2]], tri[:, [2, 0]], tri[:, [0, 1]]], axis=1).reshape(-1, 2)
    und = np.sort(directed, axis=1)
    keys = und[:, 0] * n_points + und[:, 1]
    uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if np.any(counts > 2):
        raise TopologyError("an edge is shared by more than two triangles")
    # directed duplicates mean two faces traverse the edge the same way
    dkeys = directed[:, 0] * n_points + directed[:, 1]
    if np.unique(dkeys).size != dkeys.size:
        raise InvalidMeshError("inconsistent triangle orientation across an edge")
    edges = np.column_stack([uniq // n_points, uniq % n_points])
    edge_faces = np.full((uniq.size, 2), -1, dtype=np.int64)
    face_of = np.repeat(np.arange(tri.shape[0]), 3)
    order = np.argsort(inverse, kind="stable")
    slot = np.zeros(uniq.size, dtype=np.int64)
    for idx in order:
        e = inverse[idx]
        edge_faces[e, slot[e]] = face_of[idx]
        slot[e] += 1
    face_edges = inverse.reshape(-1, 3)
    return edges, edge_faces, face_edges


class Triangulation2D:
    """Conforming triangulation of a planar domain with CCW triangles."""

    def __init__(self, points, triangles):
        self.points = np.array(points, dtype=float)
        self.triangles = np.array(triangles, dtype=np.int64)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise InvalidMeshError("points must have shape (n, 2)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise InvalidMeshError("triangles must have shape (t, 3)")
        if self.triangles.min() < 0 or self.triangles.max() >= len(self.points):
            raise InvalidMeshError("triangle index out of range")
        areas = self.signed_areas
        scale = self.diameters.max() ** 2
        if np.any(areas <= 1e-14 * scale):
            bad = int(np.argmax(areas <= 1e-14 * scale))
            raise InvalidMeshError(f"triangle {bad} is degenerate or clockwise")
        self.edges, self.edge_faces, self.face_edges = _edge_table(self.triangles, len(self.points))
        for arr in (self.points, self.triangles, self.edges, self.edge_faces, self.face_edges):
            arr.setflags(write=False)

    @property
    def signed_areas(self):
        p = self.points[self.triangles]
        u = p[:, 1] - p[:, 0]
        v = p[:, 2] - p[:, 0]
        return 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    @property
    def diameters(self):
        p = self.points[self.triangles]
        d = [np.linalg.norm(p[:, a] - p[:, b], axis=1) for a, b in ((0, 1), (1, 2), (2, 0))]
        return np.max(d, axis=0)

    @property
    def mesh(self):
        """Largest triangle diameter."""
        return float(self.diameters.max())

    @property
    def interior_edges(self):
        return np.flatnonzero(self.edge_faces[:, 1] >= 0)

    def __len__(self):
        return len(self.triangles)


def regular_grid_triangulation(k):
    """(k+1)^2 grid points on [0,1]^2, every cell split along its (+1,+1) diagonal."""
    if k < 1:
        raise ArgumentError("grid resolution k must be >= 1")
    g = np.arange(k + 1) / k
    X, Y = np.meshgrid(g, g, indexing="xy")
    points = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((k + 1) ** 2).reshape(k + 1, k + 1)  # idx[row=y, col=x]
    p00 = idx[:-1, :-1].ravel()
    p10 = idx[:-1, 1:].ravel()
    p01 = idx[1:, :-1].ravel()
    p11 = idx[1:, 1:].ravel()
    tris = np.concatenate([np.column_stack([p00, p10, p11]), np.column_stack([p00, p11, p01])])
    return Triangulation2D(points, tris)


class GraphSurface:
    """Piecewise-affine function on a 2D triangulation (an inscribed polyhedral graph)."""

    def __init__(self, triangulation, heights):
        self.triangulation = triangulation
        self.heights = np.array(heights, dtype=float)
        if self.heights.shape != (len(triangulation.points),):
            raise ArgumentError("need exactly one height per triangulation point")
        if not np.all(np.isfinite(self.heights)):
            raise ArgumentError("heights must be finite")
        self.heights.setflags(write=False)
        self._grad = None

    @property
    def gradients(self):
        """Per-triangle constant gradient ``(d1 u, d2 u)``."""
        if self._grad is None:
            tri = self.triangulation
            p = tri.points[tri.triangles]
            z = self.heights[tri.triangles]
            A = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=1)  # (T, 2, 2)
            rhs = np.stack([z[:, 1] - z[:, 0], z[:, 2] - z[:, 0]], axis=1)
            self._grad = np.linalg.solve(A, rhs[..., None])[..., 0]
            self._grad.setflags(write=False)
        return self._grad

    @property
    def normals(self):
        """Upward unit normals ``(-d1 u, -d2 u, 1) / sqrt(1 + |grad u|^2)``."""
        g = self.gradients
        n = np.column_stack([-g[:, 0], -g[:, 1], np.ones(len(g))])
        return n / np.linalg.norm(n, axis=1)[:, None]

    @property
    def planes(self):
        """Per-triangle ``(a, b, c)`` with ``u = a x + b y + c``."""
        tri = self.triangulation
        g = self.gradients
        p0 = tri.points[tri.triangles[:, 0]]
        c = self.heights[tri.triangles[:, 0]] - g[:, 0] * p0[:, 0] - g[:, 1] * p0[:, 1]
        return np.column_stack([g, c])

    def to_surface3d(self):
        pts = np.column_stack([self.triangulation.points, self.heights])
        return TriangulatedSurface3D(pts, self.triangulation.triangles)

    def sample(self, xs, ys):
        """Values on the tensor grid ``xs x ys`` (NaN where no triangle covers a node)."""
        tri = self.triangulation
        return _kernels.rasterize(
            np.ascontiguousarray(xs, dtype=float),
            np.ascontiguousarray(ys, dtype=float),
            np.ascontiguousarray(tri.points[tri.triangles]),
            np.ascontiguousarray(self.planes),
        )


def inscribe_graph(u, triangulation):
    """Inscribed polyhedral surface: ``u`` sampled on the 0-skeleton of ``triangulation``."""
    pts = triangulation.points
    heights = np.array([float(u(p)) for p in pts])
    if not np.all(np.isfinite(heights)):
        raise ArgumentError("u is not finite at every triangulation point")
    return GraphSurface(triangulation, heights)


class TriangulatedSurface3D:
    """Oriented triangulated surface in R^3 with edge adjacency.

    Interior edges have exactly two incident faces traversing them in
    opposite directions; boundary edges have one.
    """

    def __init__(self, points, triangles):
        self.points = np.array(points, dtype=float)
        self.triangles = np.array(triangles, dtype=np.int64)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise InvalidMeshError("points must have shape (n, 3)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise InvalidMeshError("triangles must have shape (t, 3)")
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= len(self.points)):
            raise InvalidMeshError("triangle index out of range")
        if not np.all(np.isfinite(self.points)):
            raise InvalidMeshError("points must be finite")
        cross = self._cross()
        dbl_area = np.linalg.norm(cross, axis=1)
        p = self.points[self.triangles]
        scale = max(np.abs(p - p[:, :1]).max(), 1e-300) ** 2
        if np.any(dbl_area <= 1e-14 * scale):
            raise InvalidMeshError(f"triangle {int(np.argmax(dbl_area <= 1e-14 * scale))} is degenerate")
        self.edges, self.edge_faces, self.face_edges = _edge_table(self.triangles, len(self.points))
        boundary = self.edge_faces[:, 1] < 0
        self.boundary_vertex_mask = np.zeros(len(self.points), dtype=bool)
        self.boundary_vertex_mask[self.edges[boundary].ravel()] = True
        used = np.zeros(len(self.points), dtype=bool)
        used[self.triangles.ravel()] = True
        self.used_vertex_mask = used
        self._normals = cross / dbl_area[:, None]
        self._areas = 0.5 * dbl_area
        for arr in (self.points, self.triangles, self.edges, self.edge_faces, self.face_edges,
                    self.boundary_vertex_mask, self.used_vertex_mask, self._normals, self._areas):
            arr.setflags(write=False)
        self._stars = {}

    def _cross(self):
        p = self.points[self.triangles]
        return np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])

    @property
    def face_normals(self):
        return self._normals

    @property
    def face_areas(self):
        return self._areas

    @property
    def area(self):
        return float(self._areas.sum())

    @property
    def interior_edges(self):
        return np.flatnonzero(self.edge_faces[:, 1] >= 0)

    @property
    def interior_vertices(self):
        return np.flatnonzero(self.used_vertex_mask & ~self.boundary_vertex_mask)

    @property
    def edge_lengths(self):
        e = self.edges
        return np.linalg.norm(self.points[e[:, 1]] - self.points[e[:, 0]], axis=1)

    def edge_index(self, a, b):
        """Index of the undirected edge {a, b}."""
        lo, hi = min(a, b), max(a, b)
        k = np.searchsorted(self.edges[:, 0] * len(self.points) + self.edges[:, 1], lo * len(self.points) + hi)
        if k >= len(self.edges) or tuple(self.edges[k]) != (lo, hi):
            raise ArgumentError(f"({a}, {b}) is not an edge")
        return int(k)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        """Copy moved by ``x -> R x + t``."""
        R = np.asarray(rotation, dtype=float)
        return TriangulatedSurface3D(self.points @ R.T + np.asarray(translation, dtype=float), self.triangles)


def vertex_star(surface, vertex):
    """Triangles around an interior vertex, in cyclic (counterclockwise) order.

    Returns ``(faces, ring)``: ``faces[i]`` is the triangle ``(vertex, ring[i],
    ring[i+1])`` with indices taken cyclically.
    """
    vertex = int(vertex)
    cached = surface._stars.get(vertex)
    if cached is not None:
        return cached
    if vertex < 0 or vertex >= len(surface.points):
        raise ArgumentError(f"vertex {vertex} out of range")
    if surface.boundary_vertex_mask[vertex]:
        raise BoundaryError(f"vertex {vertex} lies on the boundary")
    faces = np.flatnonzero(np.any(surface.triangles == vertex, axis=1))
    if faces.size == 0:
        raise TopologyError(f"vertex {vertex} belongs to no triangle")
    nxt = {}
    face_of = {}
    for f in faces:
        t = surface.triangles[f]
        c = int(np.flatnonzero(t == vertex)[0])
        a, b = int(t[(c + 1) % 3]), int(t[(c + 2) % 3])
        if a in nxt:
            raise TopologyError(f"vertex {vertex} has a non-manifold link")
        nxt[a] = b
        face_of[a] = int(f)
    start = min(nxt)
    ring = [start]
    order = [face_of[start]]
    cur = nxt[start]
    while cur != start:
        if cur not in nxt or len(ring) > len(nxt):
            raise TopologyError(f"link of vertex {vertex} is not a single closed cycle")
        ring.append(cur)
        order.append(face_of[cur])
        cur = nxt[cur]
    if len(ring) != len(nxt):
        raise TopologyError(f"link of vertex {vertex} has several components")
    result = (np.array(order, dtype=np.int64), np.array(ring, dtype=np.int64))
    surface._stars[vertex] = result
    return result


# ---------------------------------------------------------------------------
# OFF files
# ---------------------------------------------------------------------------

def _off_tokens(lines):
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if text:
            yield lineno, text


def load_off(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    it = _off_tokens(lines)
    try:
        lineno, header = next(it)
    except StopIteration:
        raise OffParseError("empty file") from None
    if header.split()[0] != "OFF":
        raise OffParseError(f"expected 'OFF' header, got {header!r}", lineno)
    rest = header.split()[1:]
    if rest:
        counts_line, counts = lineno, rest
    else:
        try:
            counts_line, text = next(it)
        except StopIteration:
            raise OffParseError("missing counts line", lineno) from None
        counts = text.split()
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise OffParseError(f"bad counts {' '.join(counts)!r}", counts_line) from None
    if nv < 0 or nf < 0:
        raise OffParseError("negative counts", counts_line)
    pts = np.empty((nv, 3))
    for i in range(nv):
        try:
            lineno, text = next(it)
        except StopIteration:
            raise OffParseError(f"expected {nv} vertices, found {i}", len(lines)) from None
        parts = text.split()
        try:
            pts[i] = [float(x) for x in parts[:3]]
        except ValueError:
            raise OffParseError(f"bad vertex {text!r}", lineno) from None
        if len(parts) < 3:
            raise OffParseError(f"vertex needs 3 coordinates, got {text!r}", lineno)
    tris = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        try:
            lineno, text = next(it)
        except StopIteration:
            raise OffParseError(f"expected {nf} faces, found {i}", len(lines)) from None
        try:
            parts = [int(x) for x in text.split()]
        except ValueError:
            raise OffParseError(f"bad face {text!r}", lineno) from None
        if len(parts) != 4 or parts[0] != 3:
            raise OffParseError(f"only triangular faces '3 i j k' are supported, got {text!r}", lineno)
        if min(parts[1:]) < 0 or max(parts[1:]) >= nv:
            raise OffParseError(f"face index out of range in {text!r}", lineno)
        tris[i] = parts[1:]
    try:
        return TriangulatedSurface3D(pts, tris)
    except InvalidMeshError as exc:
        raise OffParseError(f"invalid mesh: {exc}") from exc


def save_off(surface, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(surface.points)} {len(surface.triangles)} 0\n")
        for x, y, z in surface.points:
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for i, j, k in surface.triangles:
            fh.write(f"3 {i} {j} {k}\n")


def graph_from_surface(surface):
    """Reinterpret a surface as a graph over the (x, y) plane.

    Every triangle must project to a nondegenerate counterclockwise triangle.
    """
    try:
        tri = Triangulation2D(surface.points[:, :2], surface.triangles)
    except InvalidMeshError as exc:
        raise InvalidMeshError(f"projection to (x, y) is not injective per triangle: {exc}") from exc
    return GraphSurface(tri, surface.points[:, 2])


def load_off_graph(path):
    return graph_from_surface(load_off(path))
