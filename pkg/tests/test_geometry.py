import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisomult import geometry as G


def test_validate_rejects_non_expansive():
    with pytest.raises(G.NotExpansive):
        G.validate_dilation(np.array([[0.5]]))
    with pytest.raises(G.NotExpansive):
        G.validate_dilation(np.array([[2.0, 0.0], [0.0, 1.0]]))


def test_validate_rejects_bad_shapes():
    with pytest.raises(G.UnsupportedDimension):
        G.validate_dilation(np.eye(3) * 2.0)
    with pytest.raises(G.UnsupportedDimension):
        G.validate_dilation(np.ones((2, 3)))
    with pytest.raises(G.Singular):
        G.validate_dilation(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_eigen_moduli_diagonal():
    p = G.validate_dilation(np.diag([2.0, 3.0]))
    assert p.b == 6.0
    assert p.m_minus == pytest.approx(2.0, rel=1e-8)
    assert p.m_plus == pytest.approx(3.0, rel=1e-8)
    assert p.lambda_minus < p.m_minus
    assert p.lambda_plus > p.m_plus
    # exponents bracket the isotropy value 1/d only loosely; check defs
    assert p.zeta_minus == pytest.approx(
        math.log(p.lambda_minus) / math.log(p.b))


def test_spectral_radius_matches_eigvals():
    m = np.array([[2.0, 1.0], [0.5, 3.0]])
    want = max(abs(np.linalg.eigvals(m)))
    assert G.spectral_radius(m) == pytest.approx(want, rel=1e-8)


def test_ellipsoid_unit_volume(geo1d, geo2d):
    # det Q = omega_d^2 makes |Delta| exactly 1
    assert np.linalg.det(geo1d.ellipsoid.shape) == pytest.approx(4.0, rel=1e-12)
    assert np.linalg.det(geo2d.ellipsoid.shape) == pytest.approx(
        math.pi ** 2, rel=1e-12)


def test_ellipsoid_1d_closed_form(geo1d):
    # A = [2], r = sqrt(2): sum of (r^2/A^2)^k = 2, normalized to det = 4
    assert geo1d.ellipsoid.shape[0, 0] == pytest.approx(4.0, rel=1e-12)
    assert geo1d.rectangle.half_widths[0] == pytest.approx(0.5, rel=1e-12)


def test_nesting_contraction(geo1d, geo2d):
    for geo in (geo1d, geo2d):
        r = math.sqrt(geo.params.m_minus)
        assert geo.ellipsoid.contraction_ratio <= r ** -2 + 1e-9
        assert geo.adjoint_ellipsoid.contraction_ratio <= r ** -2 + 1e-9


def test_invalid_ratio():
    p = G.validate_dilation(np.array([[2.0]]))
    with pytest.raises(G.InvalidRatio):
        G.construct_ellipsoid(p, r=3.0)
    with pytest.raises(G.InvalidRatio):
        G.construct_ellipsoid(p, r=0.5)


def test_covering_exponent_contains(geo2d):
    # A^-M(R) must land inside the closed ellipsoid; M-1 must not
    geo = geo2d
    verts = geo.rectangle.vertices()
    a_inv = np.linalg.inv(geo.params.matrix)
    mapped = verts @ np.linalg.matrix_power(a_inv, geo.M).T
    assert np.max(geo.ellipsoid.quadratic_form(mapped)) <= 1.0
    if geo.M > 0:
        prev = verts @ np.linalg.matrix_power(a_inv, geo.M - 1).T
        assert np.max(geo.ellipsoid.quadratic_form(prev)) > 1.0


def test_shell_cover_count_isotropic():
    # for A = 2I the scale-(l-N) cells meeting the shell are the 3x3 block
    # around the origin minus the center cell: 8 cells
    geo = G.build_geometry(np.diag([2.0, 2.0]))
    n = geo.N
    count = G.shell_cover_count(geo.adjoint_params, geo.adjoint_rectangle, n, 0)
    count_other = G.shell_cover_count(geo.adjoint_params,
                                      geo.adjoint_rectangle, n, 5)
    assert count == count_other  # independence of the shell scale
    # cells of half-width h whose closure meets the square of half-width
    # 2^N h: |alpha| <= (2^N + 1)/2 per axis, minus the center cell
    span = (2 ** n + 1) // 2
    assert count == (2 * span + 1) ** 2 - 1


@given(st.integers(-20, 20), st.floats(0.1, 50.0), st.booleans())
@settings(max_examples=60, deadline=None)
def test_scale_index_homogeneity_1d(n, x, neg):
    geo = _GEO1
    x = -x if neg else x
    base = geo.qnorm.scale_index(np.array([x]))
    shifted = geo.qnorm.scale_index(np.array([x * 2.0 ** n]))
    assert shifted == base + n


_GEO1 = G.build_geometry(np.array([[2.0]]))
_GEO2 = G.build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))


@given(st.integers(-20, 20),
       st.floats(0.1, 20.0), st.floats(-20.0, 20.0))
@settings(max_examples=60, deadline=None)
def test_scale_index_homogeneity_2d(n, x, y):
    geo = _GEO2
    v = np.array([x, y])
    base = geo.qnorm.scale_index(v)
    a_pow = geo.qnorm.power(n)
    assert geo.qnorm.scale_index(a_pow @ v) == base + n


def test_scale_indices_matches_scalar(geo2d):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-8.0, 8.0, (50, 2))
    pts = pts[np.linalg.norm(pts, axis=1) > 1e-3]
    vec = geo2d.qnorm.scale_indices(pts, -10, 10)
    for p, k in zip(pts, vec):
        assert geo2d.qnorm.scale_index(p) == k


def test_scale_indices_clamping(geo1d):
    pts = np.array([[1e-9], [1e9]])
    idx = geo1d.qnorm.scale_indices(pts, -3, 3)
    assert idx[0] == -4 and idx[1] == 4


def test_quasi_norm_step_values(geo1d):
    # Delta = (-1/2, 1/2): rho = 1 on [1/2, 1), rho = 2 on [1, 2)
    assert geo1d.qnorm.quasi_norm(np.array([0.6])) == 1.0
    assert geo1d.qnorm.quasi_norm(np.array([1.5])) == 2.0
    assert geo1d.qnorm.quasi_norm(np.array([0.3])) == 0.5
    assert geo1d.qnorm.quasi_norm(np.array([0.0])) == 0.0


def test_cell_indices_half_open(geo1d):
    rect = geo1d.adjoint_rectangle
    h = rect.half_widths[0]
    # cell boundaries at (2a+1)h; the boundary point belongs to the right cell
    pts = np.array([[0.0], [h], [-h], [2 * h], [3 * h]])
    alphas = G.cell_indices(geo1d.adjoint_params, rect, 0, pts)
    assert alphas[:, 0].tolist() == [0, 1, 0, 1, 2]


def test_growth_bounds_finite(geo2d):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-4.0, 4.0, (100, 2))
    c = G.growth_bounds(geo2d.qnorm, pts)
    assert 1.0 <= c < math.inf
    with pytest.raises(G.EmptySample):
        G.growth_bounds(geo2d.qnorm, np.zeros((0, 2)))


def test_triangle_constant_stable(geo1d):
    c1 = G.triangle_constant(geo1d.qnorm, 48)
    c2 = G.triangle_constant(geo1d.qnorm, 96)
    assert c1 >= 1.0
    assert abs(c2 - c1) <= 0.10 * c1


def test_geometry_report_shape(geo2d):
    rep = G.geometry_report(geo2d)
    for key in ("b", "m_minus", "m_plus", "zeta_minus", "zeta_plus",
                "Q", "half_widths", "M", "N", "contraction_ratio"):
        assert key in rep
    assert isinstance(rep["b"], float)
    assert rep["M"] >= 0 and rep["N"] >= 0
