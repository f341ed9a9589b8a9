import json
import math
import os

import numpy as np
import pytest

from src.mengerknot import curve
from src.mengerknot.utilities import CurveConstructionError, CurveFileError, DomainError

"""
Tests for the polygonal loop model, the generators and the curve file format.
"""

SQUARE = [(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]


def unit_square():
    """
    Unit-perimeter square with vertex 0 at the origin.

    Returns
    -------
    PolygonalLoop
    """
    return curve.normalize_to_C(curve.from_vertices(SQUARE))


def test_triangle_length_is_perimeter():
    loop = curve.from_vertices([(0, 0, 0), (3, 0, 0), (0, 4, 0)])
    assert loop.total_length == pytest.approx(12.0, rel=1e-15)
    assert loop.n == 3


def test_square_caches():
    loop = curve.from_vertices(SQUARE)
    assert loop.total_length == 4.0
    np.testing.assert_array_equal(loop.cum_arclength, [0, 1, 2, 3, 4])
    np.testing.assert_allclose(np.linalg.norm(loop.tangents, axis=1), 1.0, atol=1e-12)
    np.testing.assert_array_equal(loop.tangents[3], [0, -1, 0])


def test_loop_is_read_only():
    loop = curve.from_vertices(SQUARE)
    with pytest.raises(ValueError):
        loop.vertices[0, 0] = 5.0


def test_repeated_consecutive_point_names_the_edge():
    with pytest.raises(CurveConstructionError, match='edge 1'):
        curve.from_vertices([(0, 0, 0), (1, 0, 0), (1, 0, 0), (0, 1, 0)])


def test_closing_edge_collapse_is_detected():
    with pytest.raises(CurveConstructionError, match='edge 3'):
        curve.from_vertices([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 0)])


@pytest.mark.parametrize('points', [[(0, 0, 0), (1, 0, 0)], [(0, 0), (1, 0), (0, 1)], [(0, 0, 0), (1, 0, math.inf), (0, 1, 0)]])
def test_invalid_vertex_lists(points):
    with pytest.raises(CurveConstructionError):
        curve.from_vertices(points)


def test_normalize_square():
    loop = unit_square()
    assert loop.total_length == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(loop.vertices[0], [0, 0, 0])
    np.testing.assert_allclose(loop.edge_lengths, 0.25, rtol=1e-15)


def test_normalize_is_idempotent():
    loop = curve.gen_torus_knot(2, 3, 64)
    again = curve.normalize_to_C(loop)
    np.testing.assert_allclose(again.vertices, loop.vertices, atol=1e-15)


def test_normalize_circle_radius():
    theta = 2 * np.pi * np.arange(512) / 512
    loop = curve.normalize_to_C(curve.from_vertices(np.column_stack([np.cos(theta), np.sin(theta), np.zeros(512)])))
    center = loop.vertices.mean(axis=0)
    radius = np.linalg.norm(loop.vertices - center, axis=1)
    np.testing.assert_allclose(radius, 1 / (2 * math.pi), rtol=1e-4)


def test_resample_uniform_square():
    loop = curve.resample_uniform(unit_square(), 8)
    assert loop.n == 8
    np.testing.assert_allclose(loop.edge_lengths, 0.125, rtol=1e-12)
    assert loop.total_length <= 1.0 + 1e-12


def test_resample_uniform_keeps_uniform_vertices():
    loop = curve.gen_circle(32)
    np.testing.assert_allclose(curve.resample_uniform(loop, 32).vertices, loop.vertices, atol=1e-12)


def test_resample_never_lengthens():
    loop = curve.gen_torus_knot(2, 3, 200)
    assert curve.resample_uniform(loop, 37).total_length <= loop.total_length


def test_resample_needs_three_points():
    with pytest.raises(DomainError):
        curve.resample_uniform(unit_square(), 2)


def test_gen_circle_square():
    loop = curve.gen_circle(4)
    np.testing.assert_allclose(loop.edge_lengths, 0.25, rtol=1e-14)
    np.testing.assert_array_equal(loop.vertices[0], [0, 0, 0])


@pytest.mark.parametrize('n', [3, 7, 64])
def test_gen_circle_in_class(n):
    loop = curve.gen_circle(n)
    assert loop.total_length == pytest.approx(1.0, abs=1e-12)
    assert np.all(loop.vertices[:, 2] == 0.0)


def test_gen_circle_rejects_small_n():
    with pytest.raises(DomainError):
        curve.gen_circle(2)


def test_gen_circle_vertex_triples_share_a_radius():
    from src.mengerknot.geom import circumradius

    loop = curve.gen_circle(40)
    v = loop.vertices
    radii = [circumradius(v[i], v[j], v[k]) for i, j, k in ((0, 1, 2), (0, 13, 27), (5, 6, 39), (3, 20, 31))]
    np.testing.assert_allclose(radii, radii[0], rtol=1e-10)


def test_gen_torus_knot_trefoil():
    loop = curve.gen_torus_knot(2, 3, 256, 2.0, 1.0)
    assert loop.n == 256
    assert loop.total_length == pytest.approx(1.0, abs=1e-12)
    assert np.ptp(loop.vertices[:, 2]) > 0


@pytest.mark.parametrize('p, q', [(2, 4), (1, 0), (0, 3), (3, 6)])
def test_gen_torus_knot_rejects_links_and_degenerate_windings(p, q):
    with pytest.raises(DomainError):
        curve.gen_torus_knot(p, q, 64)


def test_gen_torus_knot_rejects_bad_radii():
    with pytest.raises(DomainError):
        curve.gen_torus_knot(2, 3, 64, 1.0, 2.0)


def test_gen_figure_eight():
    loop = curve.gen_figure_eight(128)
    assert loop.total_length == pytest.approx(1.0, abs=1e-12)


def test_gen_pinched_geometry():
    gap = 0.05
    loop = curve.gen_pinched(gap, 128)
    assert loop.total_length == pytest.approx(1.0, abs=1e-12)
    ys = loop.vertices[:, 1] - loop.vertices[0, 1]
    # normalization stretches by 1/length, slightly above 1 for the inscribed polygon
    assert ys.max() == pytest.approx(gap, rel=1e-2)
    assert np.all(loop.vertices[:, 2] == 0.0)


@pytest.mark.parametrize('gap, n', [(0.0, 64), (0.4, 64), (0.1, 4)])
def test_gen_pinched_rejects(gap, n):
    with pytest.raises(DomainError):
        curve.gen_pinched(gap, n)


def test_perturb_zero_amplitude():
    loop = curve.gen_circle(16)
    np.testing.assert_allclose(curve.perturb(loop, 0.0, 3).vertices, loop.vertices, atol=1e-15)


def test_perturb_is_seeded():
    loop = curve.gen_circle(64)
    first = curve.perturb(loop, 0.05, 7)
    second = curve.perturb(loop, 0.05, 7)
    other = curve.perturb(loop, 0.05, 8)
    np.testing.assert_array_equal(first.vertices, second.vertices)
    assert not np.array_equal(first.vertices, other.vertices)
    assert first.total_length == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('amplitude, seed', [(-0.1, 1), (0.1, -1), (0.1, 1.5)])
def test_perturb_rejects(amplitude, seed):
    with pytest.raises(DomainError):
        curve.perturb(curve.gen_circle(8), amplitude, seed)


def test_nodes_are_edge_midpoints():
    loop = unit_square()
    positions, tangents, weights, s = loop.nodes()
    np.testing.assert_allclose(positions[0], [0.125, 0, 0])
    np.testing.assert_allclose(s, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(weights, 0.25)
    points = loop.sample_points()
    assert points[2].s == pytest.approx(0.625)
    np.testing.assert_array_equal(points[2].tangent, tangents[2])


def test_point_at_wraps():
    loop = unit_square()
    np.testing.assert_allclose(loop.point_at(0.3), [0.25, 0.05, 0])
    np.testing.assert_allclose(loop.point_at(1.3), loop.point_at(0.3), atol=1e-15)


def test_reversed_keeps_vertex_zero():
    loop = curve.gen_torus_knot(2, 3, 16)
    back = loop.reversed()
    np.testing.assert_array_equal(back.vertices[0], loop.vertices[0])
    np.testing.assert_array_equal(back.vertices[1], loop.vertices[-1])


def test_write_and_read_curve(tmp_path):
    loop = curve.gen_torus_knot(2, 3, 32)
    path = tmp_path / 'trefoil.json'
    curve.write_curve(loop, str(path))
    with open(path) as rf:
        document = json.load(rf)
    assert document['closed'] is True
    assert len(document['vertices']) == 32
    np.testing.assert_array_equal(curve.read_curve(str(path)).vertices, loop.vertices)


def test_read_curve_rejects_open_curves(tmp_path):
    path = tmp_path / 'open.json'
    path.write_text(json.dumps({'vertices': SQUARE, 'closed': False}))
    with pytest.raises(CurveFileError):
        curve.read_curve(str(path))


def test_read_curve_malformed_json(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{"vertices": [[0, 0, 0],')
    with pytest.raises(CurveFileError):
        curve.read_curve(str(path))


def test_read_curve_missing_file(tmp_path):
    with pytest.raises(CurveFileError):
        curve.read_curve(str(tmp_path / 'nothing.json'))


@pytest.mark.parametrize('vertices', [
    5,
    'abc',
    None,
    [[0, 0, 0], [1, 0], [0, 1, 0]],
    [[0, 0, 0], [1, 0, 0], [0, '1', 0]],
    [[0, 0, 0], [1, 0, 0], [0, True, 0]],
    {'0': [0, 0, 0]},
])
def test_read_curve_rejects_non_vertex_lists(tmp_path, vertices):
    path = tmp_path / 'shape.json'
    path.write_text(json.dumps({'vertices': vertices, 'closed': True}))
    with pytest.raises(CurveFileError, match='numeric'):
        curve.read_curve(str(path))


def test_read_curve_rejects_invalid_utf8(tmp_path):
    path = tmp_path / 'latin.json'
    path.write_bytes(b'{"vertices": [[0, 0, 0]], "closed": true, "name": "\xff\xfe"}')
    with pytest.raises(CurveFileError, match='UTF-8'):
        curve.read_curve(str(path))


def test_write_snapshot_name(tmp_path):
    prefix = str(tmp_path / 'run')
    path = curve.write_snapshot(curve.gen_circle(8), prefix, 12)
    assert path == prefix + '_12.json'
    assert os.path.isfile(path)


def test_gen_param_builds_perturbed_trefoil():
    param = curve.GenParam(shape='torus-knot', n=64, perturb=0.01, seed=3)
    expected = curve.perturb(curve.gen_torus_knot(2, 3, 64), 0.01, 3)
    np.testing.assert_array_equal(param.build().vertices, expected.vertices)


@pytest.mark.parametrize('kwargs', [
    {'shape': 'spiral', 'n': 32},
    {'shape': 'circle', 'n': 32, 'perturb': 0.1},
    {'shape': 'pinched', 'n': 32},
])
def test_gen_param_rejects(kwargs):
    with pytest.raises(DomainError):
        curve.GenParam(**kwargs).build()
