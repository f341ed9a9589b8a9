"""
Knot energies as quadrature sums over edge-midpoint nodes.

Each node carries the weight of its edge length. Pairs and triples with repeated indices are
left out. The compiled kernels return fixed-block compensated partial sums, so a value does
not depend on the worker count.
"""
from dataclasses import asdict, dataclass, field
import math
import time
from typing import Optional

import numba
import numpy as np

from . import kernels, radii
from .curve import PolygonalLoop
from .utilities import DomainError, Utilities as utilities, logger

NODE_RULE = 'edge-midpoint'

# names accepted on the command line; the first five take an exponent p
P_ENERGIES = ('Mp', 'Ip', 'Up', 'Ep', 'EpSym')
ENERGY_NAMES = P_ENERGIES + ('Moebius', 'TK', 'acn', 'thickness', 'ropelength')

# exponent at which each energy is scale invariant; above it the exponent is supercritical
SCALE_INVARIANT_P = {'Mp': 3.0, 'Ip': 2.0, 'Up': 1.0, 'Ep': 2.0, 'EpSym': 2.0}

# energies whose finite-difference gradient can be taken from the terms touching moved nodes
LOCAL_ENERGIES = ('Mp', 'Ep', 'EpSym', 'acn')

UNIT_LENGTH_TOL = 1e-9


@dataclass
class EnergyReport:
    """
    A named energy value with its evaluation metadata.

    Attributes
    ----------
    name : str
        Energy identifier from ENERGY_NAMES.
    p : float or None
        Exponent; None for Moebius, TK, acn, thickness and ropelength.
    value : float
    n : int
        Number of quadrature nodes.
    wall_time : float
        Seconds spent in the evaluation.
    node_rule : str
        Always 'edge-midpoint'.
    """
    name: str
    p: Optional[float]
    value: float
    n: int
    wall_time: float = 0.0
    node_rule: str = NODE_RULE
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


class EnergyParam:
    """
    A class used to represent the parameters of one energy evaluation.

    Attributes
    ----------
    name : str
        Energy identifier (Mp, Ip, Up, Ep, EpSym, Moebius, TK, acn, thickness, ropelength).
    p : float or None
        Exponent, required for the first five names.
    workers : int or None
        Worker count for the kernels; None defers to MENGER_WORKERS.
    """
    def __init__(self, name=None, p=None, workers=None):
        self.name = name
        self.p = p
        self.workers = workers

    def _process(self):
        """
        This method does the following:
        - Checks that the name is known and that p is present exactly when the energy needs one.
        - Resolves the worker count.
        """
        self.__check_params()
        self.workers = utilities.worker_count(self.workers)

    def __check_params(self):
        """
        Raises
        ------
        DomainError
            If the name is unknown, p is missing, or p < 1.
        """
        if self.name not in ENERGY_NAMES:
            raise DomainError('energy name must be one of {}, got {!r}'.format(', '.join(ENERGY_NAMES), self.name))
        if self.name in P_ENERGIES:
            if self.p is None:
                raise DomainError('energy {} needs an exponent p'.format(self.name))
            self.p = _check_p(self.p)
        elif self.p is not None:
            logger.info('energy %s takes no exponent; ignoring p=%r', self.name, self.p)
            self.p = None

    def is_subcritical(self):
        """True when p is at or below the scale-invariant exponent of the energy."""
        return self.name in SCALE_INVARIANT_P and self.p <= SCALE_INVARIANT_P[self.name]


def set_workers(count=None) -> int:
    """Sets the numba thread count used by the kernels and returns it."""
    workers = utilities.worker_count(count)
    numba.set_num_threads(workers)
    return workers


def get_workers() -> int:
    return numba.get_num_threads()


def _check_p(p) -> float:
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise DomainError('exponent p must be a real number, got {!r}'.format(p))
    if not p >= 1.0 or math.isinf(p):
        raise DomainError('exponent p must be a finite real >= 1, got {!r}'.format(p))
    return p


def _check_unit_length(loop, name):
    if abs(loop.total_length - 1.0) > UNIT_LENGTH_TOL:
        raise DomainError('{} needs a unit-length loop, total_length = {!r}; normalize it first'.format(
            name, loop.total_length))


# value functions: no precondition checks beyond the node arrays

def _menger_value(loop, p, scale=1.0):
    positions, _, weights, _ = loop.nodes()
    return 6.0 * utilities.combine_partials(kernels.menger_blocks(positions, weights, p, scale))


def _rho_value(loop, p, scale=1.0):
    weights = loop.nodes()[2]
    table = radii.pair_curvature_table(loop)
    return 2.0 * utilities.combine_partials(kernels.pair_power_blocks(table, weights, p, scale))


def _global_value(loop, p, scale=1.0):
    weights = loop.nodes()[2]
    curvature = radii.pair_curvature_table(loop).max(axis=1)
    return math.fsum((weights * (curvature * scale) ** p).tolist())


def _tangent_point_value(loop, p, symmetrized):
    positions, tangents, weights, _ = loop.nodes()
    return utilities.combine_partials(
        kernels.tangent_point_blocks(positions, tangents, weights, p, bool(symmetrized), 1.0))


def _moebius_raw(loop):
    positions, _, weights, s = loop.nodes()
    return 2.0 * utilities.combine_partials(kernels.moebius_blocks(positions, weights, s, loop.total_length))


def _total_curvature_value(loop):
    previous = np.roll(loop.tangents, 1, axis=0)
    sines = np.linalg.norm(np.cross(previous, loop.tangents), axis=1)
    cosines = np.einsum('ij,ij->i', previous, loop.tangents)
    return math.fsum(np.arctan2(sines, cosines).tolist())


def _acn_value(loop):
    positions, tangents, weights, _ = loop.nodes()
    return 2.0 * utilities.combine_partials(kernels.acn_blocks(positions, tangents, weights)) / (4.0 * math.pi)


def energy_value(loop: PolygonalLoop, name: str, p: Optional[float] = None) -> float:
    """
    Raw value of an energy, without the unit-length precondition of the public operations.

    Used by the relaxation driver, whose finite-difference displacements leave the unit-length class.
    """
    if name == 'Mp':
        return _menger_value(loop, _check_p(p))
    if name == 'Ip':
        return _rho_value(loop, _check_p(p))
    if name == 'Up':
        return _global_value(loop, _check_p(p))
    if name in ('Ep', 'EpSym'):
        return _tangent_point_value(loop, _check_p(p), name == 'EpSym')
    if name == 'Moebius':
        return max(0.0, _moebius_raw(loop))
    if name == 'TK':
        return _total_curvature_value(loop)
    if name == 'acn':
        return _acn_value(loop)
    if name == 'thickness':
        return radii.thickness(loop)
    if name == 'ropelength':
        return radii.ropelength(loop)
    raise DomainError('energy name must be one of {}, got {!r}'.format(', '.join(ENERGY_NAMES), name))


def local_value(name: str, p, positions, tangents, weights, nodes) -> float:
    """
    The part of a sum-type energy made of terms that involve at least one of `nodes`.

    Moving one vertex only moves the two adjacent edge midpoints, so differences of this local
    value equal differences of the full energy.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    if name == 'Mp':
        return kernels.menger_local(positions, weights, float(p), nodes)
    if name in ('Ep', 'EpSym'):
        return kernels.tangent_point_local(positions, tangents, weights, float(p), name == 'EpSym', nodes)
    if name == 'acn':
        return kernels.acn_local(positions, tangents, weights, nodes) / (4.0 * math.pi)
    raise DomainError('energy {} has no local form'.format(name))


def _report(name, p, loop, started, value, **extra):
    wall = time.perf_counter() - started
    logger.info('%s p=%s n=%d value=%r (%.3f s)', name, p, loop.n, value, wall)
    return EnergyReport(name=name, p=p, value=value, n=loop.n, wall_time=wall, extra=extra)


def menger_energy(loop: PolygonalLoop, p: float) -> EnergyReport:
    """
    Integral Menger curvature: sum over ordered triples of distinct nodes of
    w_i w_j w_k / R(node_i, node_j, node_k)^p.

    The unordered triple is summed once and multiplied by 6; collinear triples contribute 0.

    Raises
    ------
    DomainError
        If p < 1.
    """
    p = _check_p(p)
    started = time.perf_counter()
    return _report('Mp', p, loop, started, _menger_value(loop, p))


def rho_energy(loop: PolygonalLoop, p: float) -> EnergyReport:
    """Sum over ordered pairs i != j of w_i w_j / rho_pair(i, j)^p."""
    p = _check_p(p)
    started = time.perf_counter()
    return _report('Ip', p, loop, started, _rho_value(loop, p))


def global_radius_energy(loop: PolygonalLoop, p: float) -> EnergyReport:
    """Sum over nodes of w_i / rho_global(i)^p."""
    p = _check_p(p)
    started = time.perf_counter()
    return _report('Up', p, loop, started, _global_value(loop, p))


def tangent_point_energy(loop: PolygonalLoop, p: float, symmetrized: bool = False) -> EnergyReport:
    """
    Tangent-point energy.

    Plain: sum over ordered pairs of w_i w_j / r_tp(i, j)^p, with r_tp measured from the tangent
    at node i. Symmetrized: w_i w_j / (r_tp(i, j) r_tp(j, i))^(p/2). Ordered pairs are summed
    because r_tp is not symmetric.
    """
    p = _check_p(p)
    started = time.perf_counter()
    return _report('EpSym' if symmetrized else 'Ep', p, loop, started,
                   _tangent_point_value(loop, p, symmetrized))


def moebius_energy(loop: PolygonalLoop) -> EnergyReport:
    """
    Moebius energy with intrinsic-distance regularization,
    sum over ordered pairs i != j of w_i w_j (1/|x_i - x_j|^2 - 1/d(s_i, s_j)^2).

    The total is floored at 0; the raw sum is kept in ``extra['raw']``.

    Raises
    ------
    DomainError
        If the loop is not of unit length.
    """
    _check_unit_length(loop, 'moebius_energy')
    started = time.perf_counter()
    raw = _moebius_raw(loop)
    if raw < 0.0:
        logger.debug('Moebius quadrature dipped below zero (%r); reporting 0', raw)
    return _report('Moebius', None, loop, started, max(0.0, raw), raw=raw)


def moebius_integrand(loop: PolygonalLoop, i: int, j: int) -> float:
    """The regularized Moebius integrand at the node pair (i, j), i != j."""
    if i == j:
        raise DomainError('moebius_integrand needs i != j')
    positions, _, _, s = loop.nodes()
    return float(kernels.moebius_term(positions, s, loop.total_length, int(i), int(j)))


def total_curvature(loop: PolygonalLoop) -> EnergyReport:
    """Sum of the exterior turning angles between consecutive edges."""
    started = time.perf_counter()
    return _report('TK', None, loop, started, _total_curvature_value(loop))


def average_crossing_number(loop: PolygonalLoop) -> EnergyReport:
    """
    (1/4pi) sum over ordered pairs i != j of
    w_i w_j |(t_i x t_j) . (x_j - x_i)| / |x_j - x_i|^3.
    """
    started = time.perf_counter()
    return _report('acn', None, loop, started, _acn_value(loop))


def evaluate(loop: PolygonalLoop, name: str, p: Optional[float] = None) -> EnergyReport:
    """
    Evaluates an energy by its command-line name.

    thickness and ropelength are reported through the same structure so every CLI name goes
    through one entry point.
    """
    if name == 'Mp':
        return menger_energy(loop, p)
    if name == 'Ip':
        return rho_energy(loop, p)
    if name == 'Up':
        return global_radius_energy(loop, p)
    if name in ('Ep', 'EpSym'):
        return tangent_point_energy(loop, p, symmetrized=(name == 'EpSym'))
    if name == 'Moebius':
        return moebius_energy(loop)
    if name == 'TK':
        return total_curvature(loop)
    if name == 'acn':
        return average_crossing_number(loop)
    if name in ('thickness', 'ropelength'):
        started = time.perf_counter()
        value = radii.thickness(loop) if name == 'thickness' else radii.ropelength(loop)
        return _report(name, None, loop, started, value)
    raise DomainError('energy name must be one of {}, got {!r}'.format(', '.join(ENERGY_NAMES), name))


def energy_root(loop: PolygonalLoop, name: str, p: float) -> float:
    """
    E_p^(1/p) for Mp, Ip or Up, computed without overflow.

    Every term is scaled by Delta (the smallest node-set radius), so the sums stay in [0, 1] and
    the root is (1/Delta) * (scaled sum)^(1/p). This lets the p-limit study go to large p.
    """
    p = _check_p(p)
    top = radii.max_curvature(loop)
    if top == 0.0:
        return 0.0
    scale = 1.0 / top
    if name == 'Mp':
        scaled = _menger_value(loop, p, scale)
    elif name == 'Ip':
        scaled = _rho_value(loop, p, scale)
    elif name == 'Up':
        scaled = _global_value(loop, p, scale)
    else:
        raise DomainError('energy_root supports Mp, Ip and Up, got {!r}'.format(name))
    return top * scaled ** (1.0 / p)
