"""
Infimal radius functions over the edge-midpoint node set: the pairwise radius rho(x, y), the
global radius of curvature rho_G(x), the thickness Delta, and ropelength.

All of them are minima of the same triple circumradius, evaluated by ``kernels.inv_radius``
in a canonical argument order, so the nesting Delta <= rho_G <= rho holds exactly.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .curve import PolygonalLoop
from .utilities import DomainError, logger

KINDS = ('pairwise', 'global', 'thickness')


@dataclass(frozen=True)
class RadiusField:
    """
    A table of radii of one kind.

    kind is 'pairwise' (an (n, n) table with +inf on the diagonal), 'global' (one radius per
    node) or 'thickness' (a single entry).
    """
    kind: str
    values: np.ndarray


def _radius(curvature: float) -> float:
    return math.inf if curvature == 0.0 else 1.0 / curvature


def _check_index(loop, i, name='i'):
    if int(i) != i or not (0 <= i < loop.n):
        raise DomainError('{} must be a node index in [0, {}), got {!r}'.format(name, loop.n, i))
    return int(i)


def pair_curvature_table(loop: PolygonalLoop) -> np.ndarray:
    """(n, n) table of max_k 1/R(node_i, node_j, node_k); computed once per loop."""
    if 'pair_curvature' not in loop._cache:
        positions = loop.nodes()[0]
        loop._cache['pair_curvature'] = kernels.pair_curvature(positions)
    return loop._cache['pair_curvature']


def max_curvature(loop: PolygonalLoop) -> float:
    """
    Largest triple curvature 1/R over the node set, i.e. 1/thickness.

    Pairs are scanned by increasing distance and the scan stops once |a - b| / 2 exceeds the
    smallest radius found so far.
    """
    if 'max_curvature' not in loop._cache:
        positions = loop.nodes()[0]
        first, second = np.triu_indices(loop.n, k=1)
        dist = np.linalg.norm(positions[second] - positions[first], axis=1)
        order = np.argsort(dist, kind='stable')
        loop._cache['max_curvature'] = float(kernels.thickness_scan(
            positions, first[order].astype(np.int64), second[order].astype(np.int64), dist[order]))
        logger.debug('thickness scan on n=%d: 1/Delta = %r', loop.n, loop._cache['max_curvature'])
    return loop._cache['max_curvature']


def rho_pair(loop: PolygonalLoop, i: int, j: int) -> float:
    """
    min over k not in {i, j} of circumradius(node_i, node_j, node_k).

    Raises
    ------
    DomainError
        If i == j or an index is out of range.
    """
    i = _check_index(loop, i, 'i')
    j = _check_index(loop, j, 'j')
    if i == j:
        raise DomainError('rho_pair needs two different nodes, got i = j = {}'.format(i))
    return _radius(float(pair_curvature_table(loop)[i, j]))


def rho_global(loop: PolygonalLoop, i: int) -> float:
    """Global radius of curvature at node i: min over pairs j != k, both != i."""
    i = _check_index(loop, i)
    return _radius(float(pair_curvature_table(loop)[i].max()))


def thickness(loop: PolygonalLoop) -> float:
    """Minimum circumradius over all triples of distinct nodes."""
    return _radius(max_curvature(loop))


def ropelength(loop: PolygonalLoop) -> float:
    """
    total_length / thickness; equals 1/Delta on unit loops and is invariant under scaling.
    """
    return loop.total_length * max_curvature(loop)


def radius_field(loop: PolygonalLoop, kind: str) -> RadiusField:
    """
    Builds the RadiusField of the requested kind.

    Parameters
    ----------
    loop : PolygonalLoop
    kind : str
           One of 'pairwise', 'global', 'thickness'.
    """
    if kind not in KINDS:
        raise DomainError('kind must be one of {}, got {!r}'.format(', '.join(KINDS), kind))
    if kind == 'thickness':
        return RadiusField(kind, np.array([thickness(loop)]))
    table = pair_curvature_table(loop)
    with np.errstate(divide='ignore'):
        if kind == 'pairwise':
            values = 1.0 / table
            np.fill_diagonal(values, math.inf)
        else:
            values = 1.0 / table.max(axis=1)
    return RadiusField(kind, values)
