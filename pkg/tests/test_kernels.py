import itertools

import numpy as np
import pytest

from src.mengerknot import curve, kernels
from src.mengerknot.geom import menger_curvature

"""
Tests that call the compiled kernels directly on a small knotted loop.
"""


@pytest.fixture(scope='module')
def trefoil32():
    return curve.gen_torus_knot(2, 3, 32, 2.0, 1.0)


def brute_pair_curvature(positions):
    """
    Pair curvature table built from geom.menger_curvature, one triple at a time.

    Parameters
    ----------
    positions : numpy.ndarray
                (m, 3) node positions.

    Returns
    -------
    numpy.ndarray
        (m, m) table of max_k 1/R(x_i, x_j, x_k) with a zero diagonal.
    """
    m = positions.shape[0]
    table = np.zeros((m, m))
    for i, j in itertools.combinations(range(m), 2):
        best = max(menger_curvature(positions[i], positions[j], positions[k])
                   for k in range(m) if k not in (i, j))
        table[i, j] = table[j, i] = best
    return table


def test_pair_curvature_matches_triple_by_triple_scan(trefoil32):
    positions = trefoil32.nodes()[0]
    table = kernels.pair_curvature(positions)
    assert table.shape == (32, 32)
    np.testing.assert_array_equal(table, table.T)
    np.testing.assert_array_equal(np.diag(table), 0.0)
    np.testing.assert_allclose(table, brute_pair_curvature(positions), rtol=1e-10)


def test_inv_radius_ignores_argument_order(trefoil32):
    positions = trefoil32.nodes()[0]
    values = {kernels.inv_radius(positions, i, j, k) for i, j, k in itertools.permutations((3, 11, 29))}
    assert len(values) == 1


def test_block_kernels_run_on_a_knot(trefoil32):
    positions, tangents, weights, s = trefoil32.nodes()
    m = trefoil32.n
    blocks = (m + kernels.BLOCK - 1) // kernels.BLOCK
    table = kernels.pair_curvature(positions)
    results = [
        kernels.menger_blocks(positions, weights, 3.0, 1.0),
        kernels.pair_power_blocks(table, weights, 2.0, 1.0),
        kernels.tangent_point_blocks(positions, tangents, weights, 2.0, False, 1.0),
        kernels.tangent_point_blocks(positions, tangents, weights, 2.0, True, 1.0),
        kernels.moebius_blocks(positions, weights, s, trefoil32.total_length),
        kernels.acn_blocks(positions, tangents, weights),
    ]
    for out in results:
        assert out.shape == (blocks, 2)
        assert np.all(np.isfinite(out))
    assert results[0][:, 0].sum() > 0
    assert results[1][:, 0].sum() > 0
