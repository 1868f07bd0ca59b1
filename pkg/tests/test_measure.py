import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisomult import measure as M
from anisomult.geometry import build_geometry

GEO1 = build_geometry(np.array([[2.0]]))
GEO2 = build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))


def test_point_measure_validation():
    with pytest.raises(M.MeasureError):
        M.PointMeasure(points=np.array([[0.0, 0.0]]), weights=np.array([1.0]))
    with pytest.raises(M.MeasureError):
        M.PointMeasure(points=np.array([[1.0]]), weights=np.array([-1.0]))
    with pytest.raises(M.MeasureError):
        M.PointMeasure(points=np.array([[1.0], [2.0]]), weights=np.array([1.0]))
    with pytest.raises(M.MeasureError):
        M.PointMeasure(points=np.array([[np.inf]]), weights=np.array([1.0]))


def test_point_measure_roundtrip():
    mu = M.PointMeasure(points=np.array([[1.0, 2.0], [3.0, -1.0]]),
                        weights=np.array([0.5, 2.0]))
    mu2 = M.PointMeasure.from_dict(mu.to_dict())
    assert np.array_equal(mu.points, mu2.points)
    assert np.array_equal(mu.weights, mu2.weights)
    assert mu.total_mass == 2.5
    assert M.PointMeasure.empty(2).total_mass == 0.0


def test_bin_measure_hand_cells():
    # Delta* = (-1/2, 1/2): cells at scale 0 have width 1 centered on Z
    mu = M.PointMeasure(points=np.array([[0.6], [1.4], [-0.2]]),
                        weights=np.array([1.0, 2.0, 4.0]))
    cells = M.bin_measure(mu, GEO1, 0)
    assert cells == {(-0,): 4.0, (1,): 3.0} or cells == {(0,): 4.0, (1,): 3.0}


def test_criterion_sum_excludes_center():
    mu = M.PointMeasure(points=np.array([[0.1], [1.0]]),
                        weights=np.array([7.0, 3.0]))
    # alpha = 0 holds the 0.1 point and is excluded
    assert M.criterion_sum(mu, GEO1, 0, 2.0) == pytest.approx(3.0)
    with pytest.raises(M.InvalidExponent):
        M.criterion_sum(mu, GEO1, 0, 0.5)


def test_criterion_sup_exponent_domain():
    mu = M.PointMeasure(points=np.array([[1.0]]), weights=np.array([1.0]))
    with pytest.raises(M.InvalidExponent):
        M.criterion_sup(mu, GEO1, (-2, 2), 2.0)
    with pytest.raises(M.InvalidExponent):
        M.criterion_sup(mu, GEO1, (-2, 2), 0.9)
    rep = M.criterion_sup(mu, GEO1, (-2, 2), 1.0)
    assert rep.p == 1.0 and set(rep.per_k) == set(range(-2, 3))


@given(st.floats(0.1, 10.0))
@settings(max_examples=30, deadline=None)
def test_criterion_linear_in_mass(t):
    mu = M.PointMeasure(points=np.array([[0.7], [1.9], [-3.0]]),
                        weights=np.array([1.0, 0.5, 2.0]))
    base = M.criterion_sup(mu, GEO1, (-3, 3), 1.5)
    scaled = M.criterion_sup(mu.scaled(t), GEO1, (-3, 3), 1.5)
    assert scaled.sup_value == pytest.approx(t * base.sup_value, rel=1e-12)


def test_criterion_sup_endpoint_flag():
    mu = M.PointMeasure(points=np.array([[100.0]]), weights=np.array([1.0]))
    rep = M.criterion_sup(mu, GEO1, (-2, 2), 1.0)
    # single far point: every scanned scale sees one off-center cell
    assert rep.sup_at_endpoint or rep.sup_value == max(rep.per_k.values())


def test_annulus_mass_density_exact():
    # gamma = 1 makes every shell carry mass b - 1 exactly
    mu = M.discretize_density(1.0, GEO1, (-3, 3), 64, seed=0)
    for k in range(-3, 4):
        assert M.annulus_mass(mu, GEO1.adjoint_qnorm, k) == pytest.approx(
            GEO1.params.b - 1.0, rel=1e-12)
    assert M.annulus_mass(mu, GEO1.adjoint_qnorm, 9) == 0.0


def test_annulus_sup_report():
    mu = M.discretize_density(1.0, GEO2, (-2, 2), 32, seed=1)
    rep = M.annulus_sup(mu, GEO2.adjoint_qnorm, (-3, 3))
    assert math.isinf(rep.p)
    assert rep.sup_value == pytest.approx(GEO2.params.b - 1.0, rel=1e-12)
    assert rep.to_dict()["p"] == "inf"


def test_discretize_density_deterministic():
    a = M.discretize_density(1.5, GEO2, (-2, 2), 48, seed=3)
    b = M.discretize_density(1.5, GEO2, (-2, 2), 48, seed=3)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.weights, b.weights)
    c = M.discretize_density(1.5, GEO2, (-2, 2), 48, seed=4)
    assert not np.array_equal(a.points, c.points)


def test_discretize_density_points_on_shells():
    mu = M.discretize_density(1.0, GEO2, (0, 2), 32, seed=0)
    idx = GEO2.adjoint_qnorm.scale_indices(mu.points, -1, 3)
    assert set(idx.tolist()) == {0, 1, 2}


def test_discretize_density_validation():
    with pytest.raises(M.InvalidRange):
        M.discretize_density(1.0, GEO1, (2, 0), 16)
    with pytest.raises(M.InvalidRange):
        M.discretize_density(1.0, GEO1, (0, 2), 0)
