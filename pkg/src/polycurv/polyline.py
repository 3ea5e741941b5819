"""Planar polygonal curves: length, turning angles, total curvature and
curvature force, the jump variation of the unit normal, and the polygonal
approximations of the graph of the primitive of the Cantor-Vitali function.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, InvalidCurveError, ResourceError

MAX_CANTOR_LEVEL = 12


@dataclass(frozen=True)
class PolygonalCurve:
    """Ordered planar vertex list.

    For a closed curve the closing edge from the last vertex back to the
    first one is implicit; the first and last vertices must differ.
    """

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidCurveError(f"vertices must have shape (n, 2), got {v.shape}")
        if v.shape[0] < 2:
            raise InvalidCurveError("a polygonal curve needs at least 2 vertices")
        if self.closed and v.shape[0] < 3:
            raise InvalidCurveError("a closed polygonal curve needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise InvalidCurveError("vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        e = self.edge_vectors
        if np.any(np.all(e == 0.0, axis=1)):
            raise InvalidCurveError("consecutive vertices coincide (zero-length edge)")

    @property
    def edge_vectors(self):
        v = self.vertices
        e = np.diff(v, axis=0)
        if self.closed:
            e = np.vstack([e, v[:1] - v[-1:]])
        return e

    @property
    def length(self):
        return float(np.linalg.norm(self.edge_vectors, axis=1).sum())

    @property
    def mesh(self):
        """Longest edge."""
        return float(np.linalg.norm(self.edge_vectors, axis=1).max())

    @classmethod
    def from_csv(cls, path, closed=False):
        """Read a curve from a CSV file with header ``x,y``."""
        import csv

        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:2]] != ["x", "y"]:
                raise InvalidCurveError(f"{path}: expected header 'x,y'")
            pts = [(float(row["x"]), float(row["y"])) for row in reader]
        return cls(np.array(pts, dtype=float).reshape(-1, 2), closed=closed)


@dataclass(frozen=True)
class CurveCurvatureReport:
    length: float
    turning_angles: np.ndarray
    tc: float
    tc_star: float
    max_turning: float

    def as_row(self):
        return {"length": self.length, "tc": self.tc, "tc_star": self.tc_star, "max_turning": self.max_turning}


def junction_angles(edges, closed=False):
    """Angles between consecutive edge vectors, closing junction last.

    Uses ``atan2(|e_i x e_i+1|, e_i . e_i+1)``, which is the arccos of the
    normalised dot product without its loss of accuracy near 0 and pi.
    """
    e = np.asarray(edges, dtype=float)
    a, b = e[:-1], e[1:]
    if closed:
        a = np.vstack([a, e[-1:]])
        b = np.vstack([b, e[:1]])
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.einsum("ij,ij->i", a, b)
    return np.arctan2(np.abs(cross), dot)


def turning_angles(curve):
    return junction_angles(curve.edge_vectors, curve.closed)


def _report_from_angles(length, theta):
    theta = np.asarray(theta, dtype=float)
    return CurveCurvatureReport(
        length=float(length),
        turning_angles=theta,
        tc=float(theta.sum()),
        tc_star=float((2.0 * np.sin(theta / 2.0)).sum()),
        max_turning=float(theta.max()) if theta.size else 0.0,
    )


def curvature_report(curve):
    return _report_from_angles(curve.length, turning_angles(curve))


def total_curvature(curve):
    """Sum of the turning angles."""
    return curvature_report(curve).tc


def curvature_force(curve):
    """Sum of ``2 sin(theta_i / 2)`` over the turning angles."""
    return curvature_report(curve).tc_star


def unit_normals(curve):
    """Piecewise-constant unit normal ``e^perp / |e|`` with ``(a, b)^perp = (b, -a)``."""
    e = curve.edge_vectors
    perp = np.column_stack([e[:, 1], -e[:, 0]])
    return perp / np.linalg.norm(perp, axis=1)[:, None]


def polygonal_normal_variation(curve):
    """Total variation in R^2 of the unit normal: sum of its jump sizes.

    Computed from the normals themselves, independently of the turning
    angles, so that it can be checked against :func:`curvature_force`.
    """
    nu = unit_normals(curve)
    jumps = np.diff(nu, axis=0)
    if curve.closed:
        jumps = np.vstack([jumps, nu[:1] - nu[-1:]])
    return float(np.linalg.norm(jumps, axis=1).sum())


def inscribe_curve(c, partition, closed=False):
    """Polygonal curve with vertices ``c(t_i)`` for a strictly increasing partition of [0, 1]."""
    t = np.asarray(partition, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ArgumentError("partition needs at least two parameters")
    if np.any(np.diff(t) <= 0):
        raise ArgumentError("partition must be strictly increasing")
    if t[0] < 0.0 or t[-1] > 1.0:
        raise ArgumentError("partition must lie in [0, 1]")
    pts = np.array([np.asarray(c(ti), dtype=float) for ti in t])
    return PolygonalCurve(pts, closed=closed)


# ---------------------------------------------------------------------------
# Cantor-Vitali example
# ---------------------------------------------------------------------------

def _cantor_node_values(k):
    """Integer values ``2^k v_k(h 3^-k)`` of the k-th Cantor-Vitali approximation."""
    vals = np.array([0, 1], dtype=np.int64)
    for level in range(k):
        half = np.int64(1) << level
        vals = np.concatenate([vals, np.full(vals.size - 2, half, dtype=np.int64), half + vals])
    return vals


@dataclass(frozen=True)
class CantorApproximation:
    """Polygonal ``P_k`` inscribed in the graph of ``u(t) = int_0^t v``.

    ``node_values`` holds ``2^k v_k`` at the partition points as exact
    integers; ``heights`` are ``u_k`` at the same points; ``slopes`` are the
    edge slopes of ``P_k`` (exact dyadic rationals, hence exact floats).
    """

    level: int
    partition: np.ndarray
    node_values: np.ndarray = field(repr=False)
    heights: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    polygonal: PolygonalCurve = field(repr=False)

    @property
    def turning_angles(self):
        # edge directions (1, s): the cross product s_{i+1} - s_i is exact,
        # so junctions between equal slopes give exactly 0
        directions = np.column_stack([np.ones_like(self.slopes), self.slopes])
        return junction_angles(directions)

    @property
    def corner_count(self):
        """Vertices with nonzero turning angle, counted on the exact slopes."""
        v = self.node_values
        return int(np.count_nonzero(v[2:] != v[:-2]))

    def report(self):
        return _report_from_angles(self.polygonal.length, self.turning_angles)


def cantor_polygonal(k):
    if k < 0:
        raise ArgumentError("Cantor level must be >= 0")
    if k > MAX_CANTOR_LEVEL:
        raise ResourceError(f"Cantor level {k} exceeds {MAX_CANTOR_LEVEL} (3^k + 1 partition points)")
    V = _cantor_node_values(k)
    n_int = 3 ** k
    # u_k(t_h) = 3^-k 2^-(k+1) sum_{i<=h} (V_{i-1} + V_i): v_k is linear on each cell
    cell = V[:-1] + V[1:]
    num = np.concatenate([[0], np.cumsum(cell)])
    denom = float(n_int * (1 << (k + 1)))
    heights = num.astype(float) / denom
    t = np.arange(n_int + 1, dtype=float) / n_int
    slopes = cell.astype(float) / float(1 << (k + 1))
    poly = PolygonalCurve(np.column_stack([t, heights]))
    return CantorApproximation(level=k, partition=t, node_values=V, heights=heights, slopes=slopes, polygonal=poly)
