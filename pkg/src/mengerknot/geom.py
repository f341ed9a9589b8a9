"""
Geometric primitives: circumradius, Menger curvature, tangent-point radius and intrinsic distance.

Radii are extended reals: a finite positive float, or ``math.inf`` for degenerate
configurations (collinear triples, points on the tangent line). Curvatures are their
reciprocals, with ``1/inf == 0`` exactly.
"""
import math

import numpy as np

from .utilities import DomainError, Utilities as utilities

# a triple is collinear when Area < COLLINEAR_TOL * |b-a| * |c-a|
COLLINEAR_TOL = 1e-14
UNIT_TOL = 1e-9


def _distinct(a, b, c):
    if np.array_equal(a, b) or np.array_equal(b, c) or np.array_equal(a, c):
        raise DomainError('circumradius needs three distinct points, got {}, {}, {}'.format(
            a.tolist(), b.tolist(), c.tolist()))


def circumradius(a, b, c) -> float:
    """
    Radius of the unique circle through three distinct points.

    Computed as R = |a-b| |b-c| |c-a| / (4 Area) with Area = |(b-a) x (c-a)| / 2.

    Parameters
    ----------
    a, b, c : sequence of float
              Three pairwise distinct points of R^3.

    Returns
    -------
    radius : float
             Positive radius, or math.inf when the points are collinear.

    Raises
    ------
    DomainError
        If two of the points coincide or a coordinate is not finite.
    """
    a = utilities.as_point(a, 'a')
    b = utilities.as_point(b, 'b')
    c = utilities.as_point(c, 'c')
    _distinct(a, b, c)
    ab = np.linalg.norm(b - a)
    bc = np.linalg.norm(c - b)
    ca = np.linalg.norm(a - c)
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    if area < COLLINEAR_TOL * ab * ca:
        return math.inf
    return float(ab * bc * ca / (4.0 * area))


def menger_curvature(a, b, c) -> float:
    """
    Menger curvature 1/R(a, b, c); zero for collinear triples.

    Raises
    ------
    DomainError
        If two of the points coincide.
    """
    radius = circumradius(a, b, c)
    if math.isinf(radius):
        return 0.0
    return 1.0 / radius


def tangent_point_radius(x, t, y) -> float:
    """
    Radius of the circle through x and y that is tangent to the line x + tau t at x.

    r_tp = |y-x|^2 / (2 dist(y, line)), with dist(y, line) = |(y-x) x t| for a unit t.

    Parameters
    ----------
    x : sequence of float
        The point of tangency.
    t : sequence of float
        Unit tangent at x; |t| must be 1 within 1e-9.
    y : sequence of float
        Second point on the circle, y != x.

    Returns
    -------
    radius : float
             math.inf when y lies on the tangent line.
    """
    x = utilities.as_point(x, 'x')
    t = utilities.as_point(t, 't')
    y = utilities.as_point(y, 'y')
    if abs(np.linalg.norm(t) - 1.0) > UNIT_TOL:
        raise DomainError('tangent must be a unit vector, |t| = {!r}'.format(float(np.linalg.norm(t))))
    if np.array_equal(x, y):
        raise DomainError('tangent_point_radius needs y != x')
    chord = y - x
    dist = np.linalg.norm(np.cross(chord, t))
    chord2 = float(np.dot(chord, chord))
    if dist < COLLINEAR_TOL * math.sqrt(chord2):
        return math.inf
    return float(chord2 / (2.0 * dist))


def intrinsic_distance(s: float, t: float) -> float:
    """
    Shorter arclength distance min(|s-t|, 1-|s-t|) between two parameters of a unit loop.

    Raises
    ------
    DomainError
        If s or t lies outside [0, 1).
    """
    for name, value in (('s', s), ('t', t)):
        if not (0.0 <= value < 1.0):
            raise DomainError('{} must lie in [0, 1), got {!r}'.format(name, value))
    gap = abs(s - t)
    return min(gap, 1.0 - gap)
