import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisomult import spectral as S
from anisomult.geometry import build_geometry
from anisomult.measure import PointMeasure

GEO1 = build_geometry(np.array([[2.0]]))
GEO2 = build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))


def test_grid_validation():
    with pytest.raises(S.SpectralError):
        S.Grid(origin=[0.0], spacing=[0.0], shape=(8,))
    with pytest.raises(S.SpectralError):
        S.Grid(origin=[0.0], spacing=[1.0], shape=(1,))
    g = S.Grid.centered(np.array([2.0]), 8)
    assert g.points().shape == (8, 1)
    assert g.cell_volume == pytest.approx(0.5)


def test_fourier_gaussian_oracle():
    # hat of exp(-pi x^2) is exp(-pi xi^2)
    grid = S.Grid.centered(np.array([8.0]), 2048)
    x = grid.points()[:, 0]
    f = S.SampledFunction(grid=grid, values=np.exp(-math.pi * x ** 2))
    xi = np.linspace(-2.0, 2.0, 9)[:, None]
    got = S.fourier_at(f, xi)
    want = np.exp(-math.pi * xi[:, 0] ** 2)
    assert np.max(np.abs(got - want)) < 1e-12


@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
@settings(max_examples=25, deadline=None)
def test_fourier_linearity(a, b):
    grid = S.Grid.centered(np.array([4.0]), 256)
    x = grid.points()[:, 0]
    f1 = np.exp(-x ** 2)
    f2 = np.sin(x) * np.exp(-x ** 2)
    xi = np.array([[0.3], [1.1]])
    lhs = S.fourier_at(S.SampledFunction(grid=grid, values=a * f1 + b * f2), xi)
    rhs = (a * S.fourier_at(S.SampledFunction(grid=grid, values=f1), xi)
           + b * S.fourier_at(S.SampledFunction(grid=grid, values=f2), xi))
    assert np.max(np.abs(lhs - rhs)) < 1e-10 * (1.0 + abs(a) + abs(b))


def test_atom_invariants():
    atom = S.make_atom(GEO2, 1, np.array([0.5, -0.3]), seed=2)
    v = atom.carrier.values
    assert np.abs(v).max() <= atom.mass_bound
    assert abs(v.sum()) * atom.carrier.quad_weight <= \
        1e-12 * atom.carrier.norm_l1()
    # support inside center + Delta_k
    pts = atom.carrier.grid.points()
    outside = GEO2.qnorm.q_at_scale(atom.k, pts - atom.center) >= 1.0
    assert np.all(v.ravel()[outside] == 0.0)


def test_atom_dilate_covariance():
    # same seed at scales k and k+1: identical normalized profiles
    a0 = S.make_atom(GEO1, 0, np.zeros(1), seed=5)
    a1 = S.make_atom(GEO1, 1, np.zeros(1), seed=5)
    assert np.allclose(a1.carrier.values * GEO1.params.b,
                       a0.carrier.values, rtol=1e-12, atol=1e-15)


def test_atom_resolution_guard():
    with pytest.raises(S.SpectralError):
        S.make_atom(GEO1, 0, np.zeros(1), resolution=16)


def test_verify_atom_decay_bounded():
    atom = S.make_atom(GEO1, 0, np.zeros(1), seed=0)
    c = S.verify_atom_decay(atom, GEO1.adjoint_qnorm, GEO1.params.zeta_minus)
    assert 0.0 < c < math.inf
    with pytest.raises(S.NoValidFrequencies):
        S.verify_atom_decay(atom, GEO1.adjoint_qnorm,
                            GEO1.params.zeta_minus, shells_below=0)


def test_pair_against_measure():
    atom = S.make_atom(GEO1, 0, np.zeros(1), seed=0)
    mu = PointMeasure(points=np.array([[0.7], [1.5]]),
                      weights=np.array([1.0, 2.0]))
    val = S.pair_against_measure(atom, mu, p=1.5)
    direct = np.abs(S.fourier_at(atom.carrier, mu.points))
    assert val == pytest.approx(float((mu.weights @ direct ** 1.5) ** (1 / 1.5)))
    assert S.pair_against_measure(atom, PointMeasure.empty(1)) == 0.0


def test_bessel_series_vs_integral():
    for nu, z in ((0.0, 0.5), (0.5, 1.0), (1.5, 3.0), (2.0, 8.0), (3.0, 11.0)):
        assert S.bessel_j(nu, z) == pytest.approx(
            S.bessel_j_integral(nu, z), abs=1e-11)


def test_bessel_asymptotic_vs_integral():
    for nu, z in ((0.5, 15.0), (1.5, 20.0), (2.5, 40.0), (1.0, 100.0)):
        assert S.bessel_j(nu, z) == pytest.approx(
            S.bessel_j_integral(nu, z), abs=1e-11)


def test_bessel_branch_continuity():
    for nu in (0.5, 1.0, 1.5, 2.5, 3.5):
        lo = S.bessel_j(nu, 12.0 - 1e-9)
        hi = S.bessel_j(nu, 12.0 + 1e-9)
        assert abs(hi - lo) < 1e-8


def test_bochner_riesz_closed_vs_quadrature():
    for d in (1, 2):
        for lam in (1.0, 2.0):
            radii = np.array([0.0, 0.1, 1.0, 10.0])
            closed = S.bochner_riesz_inverse(lam, d, radii)
            quad = S.bochner_riesz_quadrature(lam, d, radii)
            rel = np.abs(closed - quad) / np.maximum(np.abs(closed), 1e-12)
            assert np.max(rel) < 1e-6


def test_bochner_riesz_origin_value():
    # at r = 0 the transform equals the kernel's integral: volume formula
    val = S.bochner_riesz_inverse(1.0, 1, [0.0])[0]
    want = 2.0 * 2.0 / 3.0  # int_{-1}^{1} (1 - u^2) du
    assert val == pytest.approx(want, rel=1e-12)


def test_riesz_decay_product_finite():
    for lam in (1.0, 2.0):
        assert S.riesz_decay_product(lam, 1) < math.inf


def test_chi_identity_cheap():
    freqs = np.array([[0.3], [1.0], [-2.2]])
    for k in (0, 1):
        err = S.chi_transform_check(GEO1, k, 2.0, freqs, resolution=4096)
        assert err < 1e-6


def test_sobolev_1d_gaussian():
    grid = S.Grid.centered(np.array([12.0]), 4096)
    x = grid.points()[:, 0]
    f = S.SampledFunction(grid=grid, values=x * np.exp(-x ** 2 / 2))
    fp = S.SampledFunction(grid=grid,
                           values=(1 - x ** 2) * np.exp(-x ** 2 / 2))
    lhs, rhs, ratio = S.sobolev_sup_sum_1d(f, fp, 1.0)
    assert 0.0 < ratio <= 2.0 * 1.05


def test_sobolev_boundary_guard():
    grid = S.Grid.centered(np.array([2.0]), 256)
    x = grid.points()[:, 0]
    f = S.SampledFunction(grid=grid, values=np.ones_like(x))
    with pytest.raises(S.BoundaryLeak):
        S.sobolev_sup_sum_1d(f, f, 1.0)


def test_sample_shell_lands_on_shell():
    pts = S.sample_shell(GEO2.adjoint_qnorm, 2, 100, seed=0)
    idx = GEO2.adjoint_qnorm.scale_indices(pts, 1, 3)
    assert np.all(idx == 2)
