import math

import numpy as np
import pytest

from src.mengerknot import geom
from src.mengerknot.utilities import DomainError

"""
Tests for the geometric primitives.
"""


def test_circumradius_right_triangle():
    # hypotenuse sqrt(2) is the diameter
    assert geom.circumradius((0, 0, 0), (1, 0, 0), (0, 1, 0)) == pytest.approx(math.sqrt(2) / 2, rel=1e-15)


def test_circumradius_equilateral_unit_side():
    a, b, c = (0, 0, 0), (1, 0, 0), (0.5, math.sqrt(3) / 2, 0)
    assert geom.circumradius(a, b, c) == pytest.approx(1 / math.sqrt(3), rel=1e-14)


def test_circumradius_collinear_is_infinite():
    assert geom.circumradius((0, 0, 0), (1, 0, 0), (2, 0, 0)) == math.inf
    assert geom.menger_curvature((0, 0, 0), (1, 0, 0), (2, 0, 0)) == 0.0


def test_circumradius_is_symmetric_in_its_arguments():
    a, b, c = (0.1, 0.2, 0.3), (1.0, -0.5, 0.2), (-0.3, 0.7, 1.1)
    values = [geom.circumradius(*perm) for perm in ((a, b, c), (b, c, a), (c, a, b), (b, a, c))]
    assert max(values) - min(values) <= 1e-14 * values[0]


def test_circumradius_points_on_a_circle():
    radius = 0.37
    angles = (0.1, 1.7, 4.0)
    points = [(radius * math.cos(t), radius * math.sin(t), 0.0) for t in angles]
    assert geom.circumradius(*points) == pytest.approx(radius, rel=1e-13)


def test_circumradius_repeated_point_is_a_domain_error():
    with pytest.raises(DomainError):
        geom.circumradius((0, 0, 0), (0, 0, 0), (1, 1, 0))


def test_circumradius_rejects_non_finite_points():
    with pytest.raises(DomainError):
        geom.circumradius((0, 0, math.nan), (1, 0, 0), (0, 1, 0))


def test_menger_curvature_is_reciprocal_radius():
    a, b, c = (0, 0, 0), (2, 0, 0), (0, 2, 0)
    assert geom.menger_curvature(a, b, c) == pytest.approx(1 / geom.circumradius(a, b, c), rel=1e-15)


def test_tangent_point_radius_on_a_circle():
    # x on the unit circle with its tangent; every other circle point gives radius 1
    x = (1.0, 0.0, 0.0)
    t = (0.0, 1.0, 0.0)
    for angle in (0.3, 2.0, 3.5):
        y = (math.cos(angle), math.sin(angle), 0.0)
        assert geom.tangent_point_radius(x, t, y) == pytest.approx(1.0, rel=1e-12)


def test_tangent_point_radius_on_tangent_line_is_infinite():
    assert geom.tangent_point_radius((0, 0, 0), (1, 0, 0), (3, 0, 0)) == math.inf


def test_tangent_point_radius_is_asymmetric():
    x, tx = np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])
    y, ty = np.array([1.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    forward = geom.tangent_point_radius(x, tx, y)
    backward = geom.tangent_point_radius(y, ty, x)
    assert forward == pytest.approx(1.0)
    assert backward == pytest.approx(math.sqrt(2) / 2)


def test_tangent_point_radius_needs_unit_tangent():
    with pytest.raises(DomainError):
        geom.tangent_point_radius((0, 0, 0), (2, 0, 0), (1, 1, 0))


def test_tangent_point_radius_needs_distinct_points():
    with pytest.raises(DomainError):
        geom.tangent_point_radius((0, 0, 0), (1, 0, 0), (0, 0, 0))


@pytest.mark.parametrize('s, t, expected', [
    (0.1, 0.3, 0.2),
    (0.05, 0.95, 0.1),
    (0.0, 0.5, 0.5),
    (0.25, 0.25, 0.0),
])
def test_intrinsic_distance(s, t, expected):
    assert geom.intrinsic_distance(s, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize('s, t', [(1.0, 0.2), (-0.1, 0.2), (0.2, 1.5)])
def test_intrinsic_distance_outside_unit_interval(s, t):
    with pytest.raises(DomainError):
        geom.intrinsic_distance(s, t)
