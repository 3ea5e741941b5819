import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polycurv.errors import ArgumentError, PreconditionError, ResolutionError
from polycurv.smoothing import (
    GridField,
    MollifierSpec,
    density_fields,
    disk_integral,
    graph_field,
    grid_energy_report,
    lantern_patch_check,
    lantern_patch_graph,
    lift_convexity,
    mollify,
    paraboloid_field,
    paraboloid_gauss_energy,
    pyramid_graph,
    roof_graph,
    slice_total_curvature,
    smoothing_convergence_check,
)
from polycurv.trisurf import GraphSurface, regular_grid_triangulation


def test_kernel_normalised_and_symmetric():
    k = MollifierSpec(0.1).kernel(0.01)
    assert k.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(k, k[::-1, ::-1])
    np.testing.assert_allclose(k, k.T)
    assert k[10, 10] == k.max()


def test_kernel_resolution_guard():
    with pytest.raises(ResolutionError):
        MollifierSpec(0.03).kernel(0.01)
    MollifierSpec(0.04).kernel(0.01)
    with pytest.raises(ArgumentError):
        MollifierSpec(0.0)


def test_grid_validation():
    with pytest.raises(ResolutionError):
        GridField(np.zeros((9, 9)))
    with pytest.raises(ArgumentError):
        GridField(np.zeros((20, 21)))
    with pytest.raises(ArgumentError):
        GridField(np.full((20, 20), np.nan))


def test_mollify_preserves_affine():
    f = GridField.from_function(lambda x, y: 2 * x - y + 0.5, 65)
    g = mollify(f, MollifierSpec(8 * f.dx))
    np.testing.assert_allclose(g.values, f.values, atol=1e-12)


def test_plane_energies():
    f = GridField.from_function(lambda x, y: 2 * x - y, 33)
    rep = grid_energy_report(f)
    assert rep.area == pytest.approx(np.sqrt(6), rel=1e-12)
    assert rep.f1 == pytest.approx(0, abs=1e-10)
    assert rep.f2 == pytest.approx(0, abs=1e-10)
    assert rep.slice_lhs == pytest.approx(0, abs=1e-10)


def test_paraboloid_gauss_oracle():
    # integral of (1 + x^2 + y^2)^(-3/2) over the unit square is pi / 6
    assert paraboloid_gauss_energy() == pytest.approx(np.pi / 6, rel=1e-12)


@pytest.mark.parametrize("n", [65, 129])
def test_paraboloid_f2_converges(n):
    rep = grid_energy_report(paraboloid_field(n))
    assert rep.f2 == pytest.approx(np.pi / 6, rel=2e-4)
    assert rep.slicing_ok


def test_densities_on_cylinder_graph():
    # u = sqrt(4 - x1^2): Gauss curvature vanishes, so xi2 is ~0 while xi1 is not
    f = GridField.from_function(lambda x, y: np.sqrt(4 - x * x), 65)
    xi0, xi1, xi2, gnu, mu = density_fields(f.values, f.dx)
    assert np.max(xi2) < 1e-3
    assert np.min(xi1) > 0.4


def test_slice_total_curvature_tent():
    n = 65
    x = np.linspace(0, 1, n)
    vals = np.repeat((0.5 - np.abs(x - 0.5))[:, None], n, axis=1)
    assert slice_total_curvature(vals, 1 / (n - 1)) == pytest.approx(np.pi / 2, rel=1e-12)


fourier = st.lists(st.floats(-0.3, 0.3), min_size=6, max_size=6)


@settings(max_examples=25, deadline=None)
@given(fourier)
def test_slicing_inequality_smooth(c):
    def f(x, y):
        return (c[0] * np.sin(np.pi * x) + c[1] * np.cos(2 * np.pi * y) + c[2] * np.sin(3 * x + 2 * y)
                + c[3] * x * y + c[4] * np.cos(5 * x) * np.sin(4 * y) + c[5] * x ** 3)

    rep = grid_energy_report(GridField.from_function(f, 65))
    assert rep.slicing_ok


def test_lift_convexity():
    assert lift_convexity(pyramid_graph(0.5)) == "concave"
    assert lift_convexity(pyramid_graph(-0.5)) == "convex"
    t = regular_grid_triangulation(2)
    x, y = t.points.T
    assert lift_convexity(GraphSurface(t, (x - 0.5) * (y - 0.5))) is None


def test_extensions():
    g = pyramid_graph(0.5)
    f = graph_field(g, 33, "envelope")
    pad = f.padded(4)
    assert pad.shape == (41, 41)
    # outside the square the envelope keeps falling with slope 1
    assert pad[0, 20] == pytest.approx(-4 * f.dx, abs=1e-12)
    c = graph_field(g, 33, "constant").padded(4)
    assert c[0, 20] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        graph_field(g, 33, "cover").padded(2)
    with pytest.raises(ArgumentError):
        graph_field(g, 33, "mirror")
    t = regular_grid_triangulation(2)
    x, y = t.points.T
    with pytest.raises(PreconditionError):
        graph_field(GraphSurface(t, x * y), 33, "envelope")


def test_boundary_margin_enforced():
    with pytest.raises(PreconditionError):
        smoothing_convergence_check(pyramid_graph(0.5), 65, [4], extension="constant")


def test_pyramid_coarse_convergence():
    tab = smoothing_convergence_check(pyramid_graph(0.5), 129, [4, 8], extension="envelope")
    assert tab.poly_area == pytest.approx(np.sqrt(2))
    for row in tab.rows:
        assert row.area == pytest.approx(tab.poly_area, rel=0.03)
        assert row.f1 <= tab.f1_bound
        assert row.f2 == pytest.approx(tab.poly_e_k, rel=0.05)
        assert row.slice_lhs <= row.slice_rhs
    assert tab.f2_constant < 1.05


def test_roof_mean_curvature():
    tab = smoothing_convergence_check(roof_graph(0.5), 129, [6], extension="envelope")
    assert tab.poly_e_k == pytest.approx(0, abs=1e-12)
    assert np.isnan(tab.f2_constant)
    assert tab.rows[0].f1 == pytest.approx(np.pi / 2, rel=0.03)
    assert tab.rows[0].f2 == pytest.approx(0, abs=1e-6)


def test_disk_integral_of_constant():
    n = 201
    d = np.ones((n, n))
    assert disk_integral(d, 1 / (n - 1), (0.5, 0.5), 0.3) == pytest.approx(np.pi * 0.09, rel=0.01)


@pytest.mark.slow
def test_lantern_patch_gauss_concentration():
    patch = lantern_patch_graph(16, 16, 0.5)
    vals, env, e_k, radius = lantern_patch_check(patch, 257)
    assert e_k < 1e-9
    assert vals.size > 0
    # smoothed Gauss energy concentrates near every vertex although E_K(P) = 0
    assert np.all(vals > 0.25 * env) and np.all(vals < 2 * env)
