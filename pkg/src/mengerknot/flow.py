"""
Gradient relaxation of a polygonal loop for one of the knot energies.

The gradient is a central finite difference per vertex coordinate. The descent direction has
the translation, rotation and scaling modes projected out; each accepted step is followed by a
rescale to unit length and a recentering on the vertex barycenter. The final loop is pinned
back to vertex 0 at the origin.
"""
import csv
from dataclasses import dataclass, field
import math
from typing import List, Optional

import numpy as np

from . import energies
from .curve import PolygonalLoop, normalize_to_C, write_snapshot
from .utilities import CurveConstructionError, DomainError, logger

MAX_BACKTRACKS = 40
MAX_FD_HALVINGS = 10

STATUS_CONVERGED = 'converged'
STATUS_MAX_ITERS = 'max_iters'
STATUS_STALLED = 'stalled'


class FlowConfig:
    """
    A class used to represent the parameters of a relaxation run.

    Attributes
    ----------
    energy : str
        Energy name, see ``energies.ENERGY_NAMES``.
    p : float or None
        Exponent for Mp, Ip, Up, Ep and EpSym.
    max_iters : int
        Maximum number of descent iterations, >= 1.
    grad_tol : float
        Stop when the norm of the projected gradient falls to this value.
    step_init : float
        Largest vertex displacement tried first by the line search.
    backtrack_factor : float
        Step reduction per failed trial, in (0, 1).
    snapshot_every : int
        Write a snapshot every this many iterations; 0 disables snapshots.
    snapshot_prefix : str or None
        Path prefix of snapshot files ``<prefix>_<iter>.json``.
    fd_step : float
        Finite-difference step for the gradient.
    rel_tol : float
        Stop when an accepted step lowers the energy by less than rel_tol * energy.
    """
    def __init__(self, energy='Mp', p=None, max_iters=500, grad_tol=1e-6, step_init=1e-2,
                 backtrack_factor=0.5, snapshot_every=0, snapshot_prefix=None, fd_step=1e-6,
                 rel_tol=1e-12):
        self.energy = energy
        self.p = p
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.step_init = step_init
        self.backtrack_factor = backtrack_factor
        self.snapshot_every = snapshot_every
        self.snapshot_prefix = snapshot_prefix
        self.fd_step = fd_step
        self.rel_tol = rel_tol

    def _process(self):
        """
        This method does the following:
        - Validates the energy selector through EnergyParam.
        - Checks the iteration, tolerance and step parameters.
        """
        energy_param = energies.EnergyParam(name=self.energy, p=self.p)
        energy_param._process()
        self.p = energy_param.p
        if energy_param.is_subcritical():
            logger.warning('%s with p=%s is not supercritical; the flow may pinch the loop',
                           self.energy, self.p)
        self.__check_params()

    def __check_params(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise DomainError('max_iters must be an integer >= 1, got {!r}'.format(self.max_iters))
        self.max_iters = int(self.max_iters)
        if not self.grad_tol > 0:
            raise DomainError('grad_tol must be positive, got {!r}'.format(self.grad_tol))
        if not self.step_init > 0:
            raise DomainError('step_init must be positive, got {!r}'.format(self.step_init))
        if not 0 < self.backtrack_factor < 1:
            raise DomainError('backtrack_factor must lie in (0, 1), got {!r}'.format(self.backtrack_factor))
        if not self.fd_step > 0:
            raise DomainError('fd_step must be positive, got {!r}'.format(self.fd_step))
        if not self.rel_tol >= 0:
            raise DomainError('rel_tol must be >= 0, got {!r}'.format(self.rel_tol))
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 0:
            raise DomainError('snapshot_every must be an integer >= 0, got {!r}'.format(self.snapshot_every))
        self.snapshot_every = int(self.snapshot_every)
        if self.snapshot_every and not self.snapshot_prefix:
            raise DomainError('snapshot_every needs a snapshot_prefix')


@dataclass
class FlowState:
    """
    Progress of a relaxation run.

    energy_history[0] is the energy of the starting loop; entry k is the energy after the k-th
    accepted step. grad_norms and steps run parallel to the accepted steps.
    """
    loop: PolygonalLoop
    iter: int = 0
    energy_history: List[float] = field(default_factory=list)
    last_grad_norm: float = math.nan
    status: Optional[str] = None
    grad_norms: List[float] = field(default_factory=list)
    steps: List[float] = field(default_factory=list)
    snapshots: List[str] = field(default_factory=list)


def _to_class(vertices):
    """Unit length, barycenter at the origin."""
    loop = PolygonalLoop(vertices)
    return PolygonalLoop((loop.vertices - loop.vertices.mean(axis=0)) / loop.total_length)


def _set_edges(vertices, positions, tangents, weights, v):
    """Recomputes the node rows of the two edges that share vertex v."""
    n = vertices.shape[0]
    for e in ((v - 1) % n, v):
        start = vertices[e]
        delta = vertices[(e + 1) % n] - start
        length = math.sqrt(float(delta @ delta))
        positions[e] = start + 0.5 * delta
        tangents[e] = delta / length
        weights[e] = length
    return min(weights[(v - 1) % n], weights[v])


def vertex_gradient(loop: PolygonalLoop, name: str, p, fd_step: float, v: int, central: bool = True):
    """
    Finite-difference gradient of an energy with respect to vertex v.

    Central differences by default; ``central=False`` gives the forward difference used to
    cross-check the central one.

    Raises
    ------
    DomainError
        If a displacement still collapses an adjacent edge after 10 halvings of fd_step.
    """
    n = loop.n
    base_vertices = np.array(loop.vertices)
    base_positions, base_tangents, base_weights, _ = loop.nodes()
    shortest = min(base_weights[(v - 1) % n], base_weights[v])
    touched = np.array(sorted({(v - 1) % n, v}), dtype=np.int64)
    use_local = name in energies.LOCAL_ENERGIES

    def displaced_value(vertices):
        if use_local:
            positions, tangents, weights = base_positions.copy(), base_tangents.copy(), base_weights.copy()
            if _set_edges(vertices, positions, tangents, weights, v) <= 0.0:
                raise CurveConstructionError('displacement collapsed an edge at vertex {}'.format(v))
            return energies.local_value(name, p, positions, tangents, weights, touched)
        return energies.energy_value(PolygonalLoop(vertices), name, p)

    h = fd_step
    for _ in range(MAX_FD_HALVINGS + 1):
        if h < shortest:
            try:
                grad = np.zeros(3)
                center = None if central else displaced_value(base_vertices)
                for axis in range(3):
                    plus = base_vertices.copy()
                    plus[v, axis] += h
                    if central:
                        minus = base_vertices.copy()
                        minus[v, axis] -= h
                        grad[axis] = (displaced_value(plus) - displaced_value(minus)) / (2.0 * h)
                    else:
                        grad[axis] = (displaced_value(plus) - center) / h
                return grad
            except CurveConstructionError:
                pass
        h *= 0.5
        logger.debug('fd step collides at vertex %d; halving to %r', v, h)
    raise DomainError('finite-difference step at vertex {} collides with a neighbour even at step {!r}'.format(v, h))


def gradient(loop: PolygonalLoop, name: str, p=None, fd_step: float = 1e-6) -> np.ndarray:
    """
    Central finite-difference gradient of an energy with respect to every vertex.

    For Mp, Ep, EpSym and acn only the terms touching the two edges at the moved vertex are
    re-evaluated; the other energies are evaluated in full for each displacement.

    Parameters
    ----------
    loop    : PolygonalLoop
    name    : str
              Energy name.
    p       : float, optional
              Exponent for the p-energies.
    fd_step : float
              Finite-difference step, > 0.

    Returns
    -------
    grad : numpy.ndarray
           (n, 3) gradient, row v for vertex v.
    """
    if not fd_step > 0:
        raise DomainError('fd_step must be positive, got {!r}'.format(fd_step))
    param = energies.EnergyParam(name=name, p=p)
    param._process()
    return np.array([vertex_gradient(loop, name, param.p, fd_step, v) for v in range(loop.n)])


def project_rigid_modes(vertices, vector_field) -> np.ndarray:
    """
    Removes the translation, rotation and scaling components from a per-vertex vector field.

    The seven modes (three translations, three infinitesimal rotations and the dilation about
    the barycenter) are fitted by least squares and subtracted.

    Parameters
    ----------
    vertices     : array_like
                   (n, 3) vertex positions.
    vector_field : array_like
                   (n, 3) vectors, one per vertex.

    Returns
    -------
    projected : numpy.ndarray
                (n, 3) field orthogonal to the rigid and scaling modes.
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    values = np.asarray(vector_field, dtype=np.float64)
    n = vertices.shape[0]
    centered = vertices - vertices.mean(axis=0)
    modes = []
    for axis in np.eye(3):
        modes.append(np.tile(axis, (n, 1)))
        modes.append(np.cross(axis, centered))
    modes.append(centered)
    basis = np.column_stack([mode.ravel() for mode in modes])
    coeffs = np.linalg.lstsq(basis, values.ravel(), rcond=None)[0]
    return (values.ravel() - basis @ coeffs).reshape(n, 3)


def _snapshot(state, config, loop, iteration):
    if config.snapshot_every and iteration % config.snapshot_every == 0:
        state.snapshots.append(write_snapshot(normalize_to_C(loop), config.snapshot_prefix, iteration))


def relax(loop: PolygonalLoop, config: FlowConfig) -> FlowState:
    """
    Projected gradient descent with a backtracking line search.

    Each iteration computes the gradient, projects out the rigid and scaling modes, and tries
    steps whose largest vertex displacement starts at step_init and is multiplied by
    backtrack_factor until the energy strictly decreases. The first decreasing step is accepted.

    Parameters
    ----------
    loop   : PolygonalLoop
             Starting loop; it is moved into the unit-length, barycenter-centered class first.
    config : FlowConfig

    Returns
    -------
    state : FlowState
            status is 'converged' (grad_tol or rel_tol reached), 'max_iters', or 'stalled'
            (no decreasing step within 40 backtracks). The returned loop has vertex 0 at the
            origin.
    """
    config._process()
    current = _to_class(loop.vertices)
    energy = energies.energy_value(current, config.energy, config.p)
    state = FlowState(loop=current, energy_history=[energy])
    _snapshot(state, config, current, 0)
    logger.info('relax %s p=%s from energy %r (n=%d)', config.energy, config.p, energy, current.n)

    for iteration in range(1, config.max_iters + 1):
        grad = gradient(current, config.energy, config.p, config.fd_step)
        direction = project_rigid_modes(current.vertices, grad)
        grad_norm = float(np.linalg.norm(direction))
        state.last_grad_norm = grad_norm
        if grad_norm <= config.grad_tol:
            state.status = STATUS_CONVERGED
            logger.info('converged after %d iterations; |grad| = %.3e', state.iter, grad_norm)
            break

        direction /= np.max(np.linalg.norm(direction, axis=1))
        step = config.step_init
        trial = None
        for _ in range(MAX_BACKTRACKS):
            try:
                candidate = _to_class(current.vertices - step * direction)
            except CurveConstructionError:
                step *= config.backtrack_factor
                continue
            trial_energy = energies.energy_value(candidate, config.energy, config.p)
            if trial_energy < energy:
                trial = candidate
                break
            step *= config.backtrack_factor
        if trial is None:
            state.status = STATUS_STALLED
            logger.info('line search stalled at iteration %d; |grad| = %.3e', iteration, grad_norm)
            break

        decrease = energy - trial_energy
        current, energy = trial, trial_energy
        state.iter = iteration
        state.energy_history.append(energy)
        state.grad_norms.append(grad_norm)
        state.steps.append(step)
        _snapshot(state, config, current, iteration)
        logger.debug('iteration %d: energy=%r |grad|=%.3e step=%.3e', iteration, energy, grad_norm, step)
        if decrease <= config.rel_tol * abs(energy):
            state.status = STATUS_CONVERGED
            logger.info('converged after %d iterations; relative decrease %.3e', iteration, decrease / energy)
            break
    else:
        state.status = STATUS_MAX_ITERS

    state.loop = normalize_to_C(current)
    return state


def write_run_log(state: FlowState, path):
    """
    Writes the run log as CSV with columns iter, energy, grad_norm, step.

    Row 0 is the starting energy with empty grad_norm and step.
    """
    with open(path, 'w', newline='') as wf:
        writer = csv.writer(wf)
        writer.writerow(['iter', 'energy', 'grad_norm', 'step'])
        writer.writerow([0, format(state.energy_history[0], '.17g'), '', ''])
        for k in range(1, len(state.energy_history)):
            writer.writerow([k, format(state.energy_history[k], '.17g'),
                             format(state.grad_norms[k - 1], '.17g'), format(state.steps[k - 1], '.17g')])
