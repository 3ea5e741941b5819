import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycurv.curvature import dihedral_angle
from polycurv.div_measures import (
    edge_measure,
    edge_measures,
    edge_rows,
    mass_summary,
    mu_density,
    random_grid_graph,
    sigma_fields,
    total_mass,
)
from polycurv.errors import ArgumentError, BoundaryError
from polycurv.trisurf import GraphSurface, Triangulation2D, regular_grid_triangulation


def rotated(graph, angle):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    tri = graph.triangulation
    return GraphSurface(Triangulation2D(tri.points @ R.T, tri.triangles), graph.heights)


def test_affine_graph_has_no_mass():
    t = regular_grid_triangulation(4)
    x, y = t.points.T
    g = GraphSurface(t, 0.3 * x - 2 * y)
    assert total_mass(g) == pytest.approx(0.0, abs=1e-14)
    assert mass_summary(g).e_h == pytest.approx(0.0, abs=1e-14)


def test_sigma_field_shape_and_definition():
    g = random_grid_graph(np.random.default_rng(0), k=3)
    sig = sigma_fields(g).values
    assert sig.shape == (len(g.triangulation), 3, 2)
    grad = g.gradients
    np.testing.assert_allclose(sig[:, 2, 0], -g.normals[:, 2] * grad[:, 1])
    np.testing.assert_allclose(sig[:, 2, 1], g.normals[:, 2] * grad[:, 0])


def test_mu_vanishes():
    g = random_grid_graph(np.random.default_rng(1), k=4)
    assert np.all(mu_density(g) == 0.0)


def test_single_fold_mass():
    # fold along the diagonal of the unit square, checked against L * 2 sin(theta / 2)
    t = regular_grid_triangulation(1)
    g = GraphSurface(t, [0.0, 0.0, 0.0, 1.0])
    (rec,) = edge_measures(g)
    S = g.to_surface3d()
    th = dihedral_angle(S, S.edge_index(0, 3))
    assert rec.mass == pytest.approx(np.sqrt(3) * 2 * np.sin(th / 2), rel=1e-13)
    assert rec.length2d == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(np.abs(rec.normal), [np.sqrt(0.5)] * 2)


def test_edge_measure_errors():
    g = random_grid_graph(np.random.default_rng(2), k=2)
    bnd = int(np.flatnonzero(g.triangulation.edge_faces[:, 1] < 0)[0])
    with pytest.raises(BoundaryError):
        edge_measure(g, bnd)
    with pytest.raises(ArgumentError):
        edge_measure(g, 10_000)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 2**31 - 1), st.floats(0.01, 10.0))
def test_total_mass_equals_edge_energy(k, seed, scale):
    g = random_grid_graph(np.random.default_rng(seed), k=k, scale=scale)
    s = mass_summary(g)
    assert s.rel_err <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0, 2 * np.pi))
def test_masses_rotation_invariant(seed, angle):
    g = random_grid_graph(np.random.default_rng(seed), k=5)
    a = np.array([r.mass for r in edge_measures(g)])
    b = np.array([r.mass for r in edge_measures(rotated(g, angle))])
    np.testing.assert_allclose(b, a, rtol=1e-9, atol=1e-12)


def test_edge_rows_per_edge_identity():
    g = random_grid_graph(np.random.default_rng(3), k=4)
    for row in edge_rows(g):
        assert row["mass"] == pytest.approx(row["length3d"] * 2 * np.sin(row["theta"] / 2), rel=1e-10, abs=1e-14)
        assert row["length3d"] >= row["length2d"]
