"""
Polygonal loop model: construction, generators, arclength resampling, normalization to the
class of unit loops through the origin, and the JSON curve file format.
"""
from dataclasses import dataclass
import json
import math

import numpy as np

from .utilities import CurveConstructionError, CurveFileError, DomainError, logger


@dataclass(frozen=True)
class SamplePoint:
    """
    A quadrature node: arclength fraction s in [0, 1), position and unit tangent.

    Nodes are edge midpoints; the tangent is the direction of the containing edge.
    """
    s: float
    position: np.ndarray
    tangent: np.ndarray


class PolygonalLoop:
    """
    A closed polygon; edge i joins vertex i to vertex (i + 1) mod n.

    Attributes
    ----------
    vertices : numpy.ndarray
        (n, 3) vertex positions.
    edge_lengths : numpy.ndarray
        (n,) positive edge lengths.
    cum_arclength : numpy.ndarray
        (n + 1,) cumulative arclength, cum_arclength[0] = 0 and cum_arclength[n] = total_length.
    tangents : numpy.ndarray
        (n, 3) unit edge directions.
    total_length : float
        Sum of the edge lengths.

    All arrays are read-only; every transformation returns a new loop.
    """

    def __init__(self, vertices):
        """
        Builds the loop and its caches.

        Parameters
        ----------
        vertices : array_like
                   (n, 3) vertex positions, n >= 3, consecutive vertices distinct (the closing
                   edge from the last vertex back to the first included).

        Raises
        ------
        CurveConstructionError
            If there are fewer than three vertices, a coordinate is not finite, or an edge has
            zero length.
        """
        try:
            points = np.array(vertices, dtype=np.float64)
        except (TypeError, ValueError) as error:
            raise CurveConstructionError('vertices must be a list of [x, y, z] triples: {}'.format(error))
        if points.ndim != 2 or points.shape[1] != 3:
            raise CurveConstructionError('vertices must have shape (n, 3), got {}'.format(points.shape))
        if points.shape[0] < 3:
            raise CurveConstructionError('a loop needs at least 3 vertices, got {}'.format(points.shape[0]))
        if not np.all(np.isfinite(points)):
            raise CurveConstructionError('vertices contain non-finite coordinates')

        edges = np.roll(points, -1, axis=0) - points
        lengths = np.sqrt(np.einsum('ij,ij->i', edges, edges))
        zero = np.flatnonzero(lengths == 0.0)
        if zero.size:
            i = int(zero[0])
            raise CurveConstructionError('edge {} has zero length (vertex {} repeats vertex {})'.format(
                i, (i + 1) % points.shape[0], i))

        cum = np.empty(points.shape[0] + 1)
        cum[0] = 0.0
        np.cumsum(lengths, out=cum[1:])

        self.vertices = points
        self.edge_lengths = lengths
        self.cum_arclength = cum
        self.tangents = edges / lengths[:, None]
        self.total_length = float(math.fsum(lengths.tolist()))
        # derived tables (pair curvature, thickness) keyed by name
        self._cache = {}
        for array in (self.vertices, self.edge_lengths, self.cum_arclength, self.tangents):
            array.setflags(write=False)

    @classmethod
    def from_vertices(cls, points):
        """Builds a loop from a list of points; see :func:`from_vertices`."""
        return cls(points)

    @property
    def n(self) -> int:
        """Number of vertices (and of edges and quadrature nodes)."""
        return self.vertices.shape[0]

    def __len__(self):
        return self.n

    def __repr__(self):
        return 'PolygonalLoop(n={}, total_length={!r})'.format(self.n, self.total_length)

    def nodes(self):
        """
        Edge-midpoint quadrature arrays.

        Returns
        -------
        positions : numpy.ndarray
            (n, 3) edge midpoints.
        tangents : numpy.ndarray
            (n, 3) unit edge directions.
        weights : numpy.ndarray
            (n,) edge lengths.
        s : numpy.ndarray
            (n,) arclength fractions of the midpoints, in [0, 1).
        """
        positions = self.vertices + 0.5 * (np.roll(self.vertices, -1, axis=0) - self.vertices)
        s = (self.cum_arclength[:-1] + 0.5 * self.edge_lengths) / self.total_length
        return positions, np.array(self.tangents), np.array(self.edge_lengths), s

    def sample_points(self):
        """The quadrature nodes as a list of :class:`SamplePoint`."""
        positions, tangents, _, s = self.nodes()
        return [SamplePoint(float(s[i]), positions[i], tangents[i]) for i in range(self.n)]

    def point_at(self, arclength: float):
        """Position on the polygonal trace at the given arclength (taken modulo total_length)."""
        u = math.fmod(arclength, self.total_length)
        if u < 0:
            u += self.total_length
        i = int(np.searchsorted(self.cum_arclength, u, side='right') - 1)
        i = min(max(i, 0), self.n - 1)
        return self.vertices[i] + (u - self.cum_arclength[i]) * self.tangents[i]

    def scaled(self, factor: float):
        """Uniformly scaled copy (about the origin)."""
        if not factor > 0:
            raise DomainError('scale factor must be positive, got {!r}'.format(factor))
        return PolygonalLoop(self.vertices * factor)

    def moved(self, rotation, translation=(0.0, 0.0, 0.0)):
        """Copy moved by the rigid motion x -> rotation @ x + translation."""
        rotation = np.asarray(rotation, dtype=np.float64)
        return PolygonalLoop(self.vertices @ rotation.T + np.asarray(translation, dtype=np.float64))

    def reversed(self):
        """Copy with the orientation reversed, keeping vertex 0 first."""
        return PolygonalLoop(np.roll(self.vertices[::-1], 1, axis=0))

    def centered(self):
        """Copy translated so the vertex barycenter sits at the origin."""
        return PolygonalLoop(self.vertices - self.vertices.mean(axis=0))


def from_vertices(points) -> PolygonalLoop:
    """
    Builds a PolygonalLoop from an ordered list of points, caching edge lengths, cumulative
    arclength and unit tangents.

    Raises
    ------
    CurveConstructionError
        For n < 3 or a zero-length edge (the message names the offending edge index).
    """
    return PolygonalLoop(points)


def normalize_to_C(loop: PolygonalLoop) -> PolygonalLoop:
    """
    Scales the loop to unit length and translates vertex 0 to the origin.

    Parameters
    ----------
    loop : PolygonalLoop

    Returns
    -------
    loop : PolygonalLoop
           Same shape, total_length 1, vertex 0 at the origin.
    """
    return PolygonalLoop((loop.vertices - loop.vertices[0]) / loop.total_length)


def resample_uniform(loop: PolygonalLoop, m: int) -> PolygonalLoop:
    """
    Places m vertices at arclengths k/m * total_length along the polygonal trace.

    The result is inscribed in the input trace, so its length never exceeds the input length.

    Raises
    ------
    DomainError
        If m < 3.
    """
    if int(m) != m or m < 3:
        raise DomainError('resample_uniform needs m >= 3, got {!r}'.format(m))
    m = int(m)
    closed = np.vstack([loop.vertices, loop.vertices[:1]])
    targets = np.arange(m) * (loop.total_length / m)
    resampled = np.column_stack([np.interp(targets, loop.cum_arclength, closed[:, axis]) for axis in range(3)])
    return PolygonalLoop(resampled)


def _check_n(n, minimum=3):
    if int(n) != n or n < minimum:
        raise DomainError('n must be an integer >= {}, got {!r}'.format(minimum, n))
    return int(n)


def gen_circle(n: int) -> PolygonalLoop:
    """
    Regular n-gon in the plane z = 0, normalized to unit length with vertex 0 at the origin.

    Raises
    ------
    DomainError
        If n < 3.
    """
    n = _check_n(n)
    theta = 2.0 * np.pi * np.arange(n) / n
    radius = 1.0 / (2.0 * np.pi)
    vertices = np.column_stack([radius * np.cos(theta), radius * np.sin(theta), np.zeros(n)])
    return normalize_to_C(PolygonalLoop(vertices))


def gen_torus_knot(p: int, q: int, n: int, R: float = 2.0, r: float = 1.0) -> PolygonalLoop:
    """
    The (p, q) torus knot sampled at n uniform parameter values and normalized.

    x = (R + r cos(q t)) cos(p t), y = (R + r cos(q t)) sin(p t), z = r sin(q t); the (2, 3)
    knot is the trefoil.

    Parameters
    ----------
    p, q : int
           Coprime positive winding numbers.
    n    : int
           Number of vertices, n >= 3.
    R, r : float
           Torus radii, R > r > 0.

    Raises
    ------
    DomainError
        If p or q is below 1, gcd(p, q) != 1 (a link, not a knot), n < 3 or the radii are invalid.
    """
    if int(p) != p or int(q) != q or p < 1 or q < 1:
        raise DomainError('torus knot winding numbers must be integers >= 1, got p={!r}, q={!r}'.format(p, q))
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise DomainError('gcd(p, q) = {} != 1: ({}, {}) is a torus link, not a knot'.format(math.gcd(p, q), p, q))
    n = _check_n(n)
    if not (R > r > 0):
        raise DomainError('torus radii need R > r > 0, got R={!r}, r={!r}'.format(R, r))
    t = 2.0 * np.pi * np.arange(n) / n
    ring = R + r * np.cos(q * t)
    vertices = np.column_stack([ring * np.cos(p * t), ring * np.sin(p * t), r * np.sin(q * t)])
    return normalize_to_C(PolygonalLoop(vertices))


def gen_figure_eight(n: int) -> PolygonalLoop:
    """Figure-eight knot ((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t), normalized."""
    n = _check_n(n)
    t = 2.0 * np.pi * np.arange(n) / n
    ring = 2.0 + np.cos(2.0 * t)
    vertices = np.column_stack([ring * np.cos(3.0 * t), ring * np.sin(3.0 * t), np.sin(4.0 * t)])
    return normalize_to_C(PolygonalLoop(vertices))


def gen_pinched(gap: float, n: int) -> PolygonalLoop:
    """
    The pinched stadium used for the charge experiments.

    Two straight strands of length (1 - pi gap) / 2 run parallel at distance `gap` and are joined
    by two half-circles of radius gap / 2, giving a planar loop of unit length. The n vertices are
    placed uniformly in arclength, starting at the left end of the lower strand; the polygon is
    then normalized. As gap -> 0 the strands collapse onto each other.

    Raises
    ------
    DomainError
        If gap is not in (0, 1/pi) or n < 8.
    """
    n = _check_n(n, minimum=8)
    if not (0.0 < gap < 1.0 / math.pi):
        raise DomainError('gap must lie in (0, 1/pi), got {!r}'.format(gap))
    half = 0.5 * gap
    strand = 0.5 * (1.0 - math.pi * gap)
    arc = math.pi * half
    u = np.arange(n) / n
    vertices = np.zeros((n, 3))
    for k, s in enumerate(u):
        if s < strand:
            vertices[k, :2] = (-0.5 * strand + s, -half)
        elif s < strand + arc:
            phi = -0.5 * math.pi + (s - strand) / half
            vertices[k, :2] = (0.5 * strand + half * math.cos(phi), half * math.sin(phi))
        elif s < 2.0 * strand + arc:
            vertices[k, :2] = (0.5 * strand - (s - strand - arc), half)
        else:
            phi = 0.5 * math.pi + (s - 2.0 * strand - arc) / half
            vertices[k, :2] = (-0.5 * strand + half * math.cos(phi), half * math.sin(phi))
    return normalize_to_C(PolygonalLoop(vertices))


def perturb(loop: PolygonalLoop, amplitude: float, seed: int) -> PolygonalLoop:
    """
    Displaces every vertex by a seeded pseudo-random vector of norm at most `amplitude`, then
    normalizes the result.

    The displacements come from numpy's counter-based Philox generator: for vertex i,
    d_i = amplitude * (2 u_i - 1) / sqrt(3) with u_i the i-th row of
    ``Generator(Philox(seed)).random((n, 3))``. The same seed always gives the same loop.

    Raises
    ------
    DomainError
        If amplitude < 0 or seed is not a non-negative integer.
    """
    if not amplitude >= 0:
        raise DomainError('perturbation amplitude must be >= 0, got {!r}'.format(amplitude))
    if int(seed) != seed or seed < 0:
        raise DomainError('seed must be a non-negative integer, got {!r}'.format(seed))
    rng = np.random.Generator(np.random.Philox(int(seed)))
    unit = 2.0 * rng.random((loop.n, 3)) - 1.0
    displaced = loop.vertices + (amplitude / math.sqrt(3.0)) * unit
    return normalize_to_C(PolygonalLoop(displaced))


def _is_vertex(entry):
    return (isinstance(entry, list) and len(entry) == 3
            and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry))


def read_curve(path) -> PolygonalLoop:
    """
    Reads a curve file {"vertices": [[x, y, z], ...], "closed": true}.

    Caches are always recomputed from the raw vertices.

    Raises
    ------
    CurveFileError
        If the file cannot be read, is not UTF-8 JSON, or does not describe a closed loop
        of numeric [x, y, z] vertices.
    CurveConstructionError
        If the vertices do not form a valid loop.
    """
    try:
        with open(path, encoding='utf-8') as rf:
            document = json.load(rf)
    except OSError as error:
        raise CurveFileError('cannot read curve file {}: {}'.format(path, error.strerror or error))
    except UnicodeDecodeError as error:
        raise CurveFileError('{} is not UTF-8 text: {}'.format(path, error.reason))
    except ValueError as error:
        raise CurveFileError('malformed JSON in {}: {}'.format(path, error))
    if not isinstance(document, dict) or 'vertices' not in document:
        raise CurveFileError('{} has no "vertices" entry'.format(path))
    if document.get('closed') is not True:
        raise CurveFileError('{} must declare "closed": true'.format(path))
    vertices = document['vertices']
    if not isinstance(vertices, list) or not all(_is_vertex(entry) for entry in vertices):
        raise CurveFileError('"vertices" in {} must be a list of numeric [x, y, z] triples'.format(path))
    logger.debug('read %d vertices from %s', len(vertices), path)
    return PolygonalLoop(vertices)


def dumps_curve(loop: PolygonalLoop) -> str:
    """Serializes the raw vertices with 17 significant digits."""
    rows = ['[{}, {}, {}]'.format(*(format(float(x), '.17g') for x in vertex)) for vertex in loop.vertices]
    return '{"vertices": [\n  ' + ',\n  '.join(rows) + '\n], "closed": true}\n'


def write_curve(loop: PolygonalLoop, path):
    """Writes the loop in the curve file format."""
    with open(path, 'w') as wf:
        wf.write(dumps_curve(loop))


def write_snapshot(loop: PolygonalLoop, prefix: str, iteration: int) -> str:
    """Writes ``<prefix>_<iteration>.json`` and returns its path."""
    path = '{}_{}.json'.format(prefix, iteration)
    write_curve(loop, path)
    return path


SHAPES = ('circle', 'torus-knot', 'figure-eight', 'pinched')


class GenParam:
    """
    A class used to represent the parameters of a generated sample loop.

    Attributes
    ----------
    shape : str
        One of circle, torus-knot, figure-eight, pinched.
    n : int
        Number of vertices.
    p_torus, q_torus : int
        Winding numbers of a torus knot (default the trefoil, 2 and 3).
    major_radius, minor_radius : float
        Torus radii R > r > 0.
    gap : float or None
        Strand distance of the pinched loop.
    perturb : float or None
        Amplitude of a seeded perturbation applied after generation.
    seed : int or None
        Seed of the perturbation; required whenever perturb is given.
    """
    def __init__(self, shape=None, n=None, p_torus=2, q_torus=3, major_radius=2.0, minor_radius=1.0,
                 gap=None, perturb=None, seed=None):
        self.shape = shape
        self.n = n
        self.p_torus = p_torus
        self.q_torus = q_torus
        self.major_radius = major_radius
        self.minor_radius = minor_radius
        self.gap = gap
        self.perturb = perturb
        self.seed = seed

    def _process(self):
        """
        This method does the following:
        - Checks the shape and the shape-specific parameters.
        - Checks that a perturbation always comes with an explicit seed.
        """
        self.__check_params()

    def __check_params(self):
        if self.shape not in SHAPES:
            raise DomainError('shape must be one of {}, got {!r}'.format(', '.join(SHAPES), self.shape))
        if self.n is None:
            raise DomainError('n must be given')
        if self.shape == 'pinched' and self.gap is None:
            raise DomainError('the pinched shape needs a gap')
        if self.shape != 'pinched' and self.gap is not None:
            logger.info('gap is only used by the pinched shape; ignoring gap=%r', self.gap)
        if self.perturb is not None and self.seed is None:
            raise DomainError('a perturbation needs an explicit seed')
        if self.perturb is None and self.seed is not None:
            logger.info('seed given without a perturbation amplitude; ignoring seed=%r', self.seed)

    def build(self) -> PolygonalLoop:
        """Generates the loop described by the parameters."""
        self._process()
        if self.shape == 'circle':
            loop = gen_circle(self.n)
        elif self.shape == 'torus-knot':
            loop = gen_torus_knot(self.p_torus, self.q_torus, self.n, self.major_radius, self.minor_radius)
        elif self.shape == 'figure-eight':
            loop = gen_figure_eight(self.n)
        else:
            loop = gen_pinched(self.gap, self.n)
        if self.perturb is not None:
            loop = perturb(loop, self.perturb, self.seed)
        return loop
