"""
Experiment suites that turn qualitative statements about the energies into quantitative checks
on sampled loops: the ordering chain, the p-limits, blow-up on a pinched family, the total
curvature bounds, convergence on refined circles, and a trefoil/circle comparison.

Every check returns a CheckResult holding one Measurement per compared quantity. A check
passes iff every measurement is within its tolerance.
"""
from dataclasses import asdict, dataclass, field
import json
import math
from typing import List, Optional

from . import energies, radii
from .curve import gen_circle, gen_figure_eight, gen_pinched, gen_torus_knot
from .utilities import DomainError, Utilities as utilities, logger

ORDER_SLACK = 1e-12
MONOTONE_SLACK = 1e-10

# where the expected value of a measurement comes from
EXACT = 'exact'
DERIVED = 'derived'
THEOREM = 'theorem'
OBSERVATION = 'observation'


@dataclass
class Measurement:
    """
    One compared quantity.

    relation is '<=' (measured <= expected + tolerance), '>=' (measured >= expected - tolerance),
    '~' (|measured - expected| <= tolerance) or '<' / '>' for strict comparisons with no slack.
    """
    quantity: str
    measured: float
    expected: float
    relation: str
    tolerance: float
    provenance: str
    ok: bool = field(init=False)

    def __post_init__(self):
        m, e, t = self.measured, self.expected, self.tolerance
        if self.relation == '<=':
            self.ok = m <= e + t
        elif self.relation == '>=':
            self.ok = m >= e - t
        elif self.relation == '<':
            self.ok = m < e
        elif self.relation == '>':
            self.ok = m > e
        elif self.relation == '~':
            self.ok = abs(m - e) <= t
        else:
            raise DomainError('unknown relation {!r}'.format(self.relation))


@dataclass
class CheckResult:
    name: str
    measurements: List[Measurement] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return 'pass' if all(m.ok for m in self.measurements) else 'fail'

    @property
    def passed(self) -> bool:
        return self.status == 'pass'

    def add(self, quantity, measured, expected, relation, tolerance=0.0, provenance=DERIVED):
        measurement = Measurement(quantity, float(measured), float(expected), relation, float(tolerance), provenance)
        if not measurement.ok:
            logger.info('%s: %s measured %r, expected %s %r (tolerance %r)', self.name, quantity,
                        measurement.measured, relation, measurement.expected, measurement.tolerance)
        self.measurements.append(measurement)
        return measurement

    def failures(self) -> List[Measurement]:
        return [m for m in self.measurements if not m.ok]

    def to_dict(self):
        return {
            'check': self.name,
            'status': self.status,
            'params': self.params,
            'measurements': [asdict(m) for m in self.measurements]
        }

    def table(self) -> str:
        """Human-readable table, one line per measurement."""
        lines = ['{}: {}'.format(self.name, self.status.upper())]
        for m in self.measurements:
            lines.append('  {:<4} {:<36} measured {:>24}  {:>2} {:>24}  tol {:<10} [{}]'.format(
                'ok' if m.ok else 'FAIL', m.quantity, utilities.format_real(m.measured), m.relation,
                utilities.format_real(m.expected), format(m.tolerance, '.3g'), m.provenance))
        return '\n'.join(lines)


def _check_unit(loop, name):
    if abs(loop.total_length - 1.0) > energies.UNIT_LENGTH_TOL:
        raise DomainError('{} needs a unit-length loop, total_length = {!r}'.format(name, loop.total_length))


def _slack(value):
    return ORDER_SLACK * max(1.0, abs(value))


def check_ordering(loop, p_list) -> CheckResult:
    """
    Checks Mp <= Ip <= Up <= (1/thickness)^p for every p in p_list, with 1e-12 relative slack.

    Raises
    ------
    DomainError
        If the loop is not of unit length or a p is below 1.
    """
    _check_unit(loop, 'check_ordering')
    result = CheckResult('ordering', params={'n': loop.n, 'p': list(p_list)})
    top = radii.max_curvature(loop)
    for p in p_list:
        m = energies.menger_energy(loop, p).value
        i = energies.rho_energy(loop, p).value
        u = energies.global_radius_energy(loop, p).value
        bound = top ** float(p)
        result.add('Mp <= Ip (p={:g})'.format(p), m, i, '<=', _slack(i), THEOREM)
        result.add('Ip <= Up (p={:g})'.format(p), i, u, '<=', _slack(u), THEOREM)
        result.add('Up <= 1/thickness^p (p={:g})'.format(p), u, bound, '<=', _slack(bound), THEOREM)
    return result


def check_p_limits(loop, p_schedule, tolerance: float = 0.05) -> CheckResult:
    """
    Checks that Mp^(1/p), Ip^(1/p) and Up^(1/p) are non-decreasing along p_schedule (slack 1e-10
    relative) and that at the largest p each lies within `tolerance` (relative) of 1/thickness.

    Raises
    ------
    DomainError
        If the schedule is not strictly increasing or its largest entry is below 32.
    """
    schedule = [float(p) for p in p_schedule]
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError('p schedule must be strictly increasing, got {}'.format(schedule))
    if schedule[-1] < 32:
        raise DomainError('p schedule must reach at least 32, got max {}'.format(schedule[-1]))
    _check_unit(loop, 'check_p_limits')
    result = CheckResult('plimits', params={'n': loop.n, 'p': schedule, 'tolerance': tolerance})
    limit = radii.max_curvature(loop)
    for name in ('Mp', 'Ip', 'Up'):
        roots = [energies.energy_root(loop, name, p) for p in schedule]
        logger.debug('%s roots over %s: %s', name, schedule, roots)
        for (p_prev, prev), (p_next, nxt) in zip(zip(schedule, roots), zip(schedule[1:], roots[1:])):
            result.add('{}^(1/p) p={:g} -> {:g}'.format(name, p_prev, p_next), nxt, prev, '>=',
                       MONOTONE_SLACK * abs(prev), THEOREM)
        result.add('{}^(1/p) at p={:g} vs 1/thickness'.format(name, schedule[-1]), roots[-1], limit, '~',
                   tolerance * limit, DERIVED)
    return result


def growth_ratio(last: float, first: float) -> float:
    """
    last / first, with a zero start mapped to inf (or -inf) when the series moved and to nan
    when it stayed at 0.
    """
    if first != 0.0:
        return last / first
    if last == 0.0:
        return math.nan
    return math.copysign(math.inf, last)


CHARGE_ENERGIES = (('Mp', 4.0), ('Ip', 3.0), ('Up', 2.0), ('Ep', 3.0), ('Moebius', None))


def check_charge_blowup(gap_list, n: int = 128, growth: float = 10.0) -> CheckResult:
    """
    Evaluates the pinched stadium family (see ``curve.gen_pinched``) along a decreasing gap
    schedule.

    Asserted: M4, I3, U2, E3 and the Moebius energy strictly increase as the gap shrinks and grow
    by at least `growth` overall; 1/thickness strictly increases and grows at least 4-fold; total
    curvature grows by less than a factor 2.

    Raises
    ------
    DomainError
        If gap_list is not strictly decreasing and positive.
    """
    gaps = [float(g) for g in gap_list]
    if len(gaps) < 2 or any(g <= 0 for g in gaps) or any(b >= a for a, b in zip(gaps, gaps[1:])):
        raise DomainError('gap list must hold at least two strictly decreasing positive values, got {}'.format(gaps))
    result = CheckResult('charge', params={'n': n, 'gaps': gaps, 'growth': growth})
    loops = [gen_pinched(gap, n) for gap in gaps]

    def series(label, values, min_growth, provenance):
        for k in range(1, len(values)):
            result.add('{} gap={:g} > gap={:g}'.format(label, gaps[k], gaps[k - 1]), values[k], values[k - 1], '>',
                       provenance=provenance)
        result.add('{} growth'.format(label), growth_ratio(values[-1], values[0]), min_growth, '>=', provenance=DERIVED)

    for name, p in CHARGE_ENERGIES:
        values = [energies.evaluate(loop, name, p).value for loop in loops]
        series(name if p is None else '{}{:g}'.format(name, p), values, growth, THEOREM)
    series('1/thickness', [radii.max_curvature(loop) for loop in loops], 4.0, DERIVED)
    tk = [energies.total_curvature(loop).value for loop in loops]
    result.add('TK growth', growth_ratio(tk[-1], tk[0]), 2.0, '<', provenance=THEOREM)
    return result


def check_fary_milnor(n: int = 256, figure_eight: bool = True) -> CheckResult:
    """
    Total curvature bounds: the trefoil (and the figure-eight knot) at least 4 pi, the regular
    polygon exactly 2 pi within 1e-12, and every loop at least 2 pi.

    Raises
    ------
    DomainError
        If n < 64.
    """
    if int(n) != n or n < 64:
        raise DomainError('check_fary_milnor needs n >= 64, got {!r}'.format(n))
    result = CheckResult('farymilnor', params={'n': n})
    knots = [('trefoil', gen_torus_knot(2, 3, n, 2.0, 1.0))]
    if figure_eight:
        knots.append(('figure-eight', gen_figure_eight(n)))
    for label, loop in knots:
        tk = energies.total_curvature(loop).value
        result.add('TK({}) >= 4pi'.format(label), tk, 4.0 * math.pi, '>=', provenance=THEOREM)
    tk_circle = energies.total_curvature(gen_circle(n)).value
    result.add('TK(circle) = 2pi', tk_circle, 2.0 * math.pi, '~', 1e-12, EXACT)
    return result


def richardson(values, ns, order: float = 1.0) -> float:
    """
    Richardson extrapolation from the last two refinements, assuming an error C / n^order.

    Parameters
    ----------
    values : sequence of float
    ns     : sequence of int
             Node counts of the values, increasing.
    order  : float
             Assumed convergence order.
    """
    if len(values) != len(ns) or len(values) < 2:
        raise DomainError('richardson needs at least two (n, value) pairs')
    n1, n2 = float(ns[-2]), float(ns[-1])
    v1, v2 = float(values[-2]), float(values[-1])
    if n2 <= n1:
        raise DomainError('richardson needs increasing n, got {} then {}'.format(ns[-2], ns[-1]))
    w1, w2 = n1 ** order, n2 ** order
    return (w2 * v2 - w1 * v1) / (w2 - w1)


def empirical_order(errors, ns) -> List[float]:
    """
    log(e_k / e_k+1) / log(n_k+1 / n_k) for consecutive refinements.

    An error that drops to exactly 0 gives order inf, one that rises from 0 gives -inf, and two
    zero errors give nan.
    """
    orders = []
    for e1, e2, n1, n2 in zip(errors, errors[1:], ns, ns[1:]):
        e1, e2 = abs(e1), abs(e2)
        if e1 == 0.0 and e2 == 0.0:
            orders.append(math.nan)
        elif e2 == 0.0:
            orders.append(math.inf)
        elif e1 == 0.0:
            orders.append(-math.inf)
        else:
            orders.append(math.log(e1 / e2) / math.log(n2 / n1))
    return orders


def check_circle_convergence(n_schedule, min_order: float = 0.9, moebius_target: float = 4.0,
                             moebius_tol: float = 0.05) -> CheckResult:
    """
    Refines the regular polygon along n_schedule.

    Asserted: the errors of M3, I2 and U1 against (2 pi)^p converge with empirical order at
    least `min_order`; the thickness increases monotonically toward 1/(2 pi); the first-order
    Richardson extrapolation of the Moebius energy lies within moebius_tol of moebius_target.

    Raises
    ------
    DomainError
        If n_schedule is not strictly increasing or has fewer than two entries.
    """
    ns = [int(n) for n in n_schedule]
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError('n schedule must hold at least two strictly increasing values, got {}'.format(ns))
    result = CheckResult('circle', params={'n': ns, 'min_order': min_order})
    loops = [gen_circle(n) for n in ns]
    for name, p in (('Mp', 3.0), ('Ip', 2.0), ('Up', 1.0)):
        exact = (2.0 * math.pi) ** p
        errors = [energies.evaluate(loop, name, p).value - exact for loop in loops]
        for (n1, n2), order in zip(zip(ns, ns[1:]), empirical_order(errors, ns)):
            result.add('{}{:g} order n={}->{}'.format(name, p, n1, n2), order, min_order, '>=', provenance=DERIVED)
    deltas = [radii.thickness(loop) for loop in loops]
    for k in range(1, len(ns)):
        result.add('thickness n={} > n={}'.format(ns[k], ns[k - 1]), deltas[k], deltas[k - 1], '>', provenance=DERIVED)
    result.add('thickness n={} vs 1/(2pi)'.format(ns[-1]), deltas[-1], 1.0 / (2.0 * math.pi), '~',
               1e-3 / (2.0 * math.pi), EXACT)
    moebius = [energies.moebius_energy(loop).value for loop in loops]
    logger.info('Moebius energies on circles %s: %s', ns, moebius)
    result.add('Moebius Richardson limit', richardson(moebius, ns, 1.0), moebius_target, '~', moebius_tol, DERIVED)
    return result


def check_unknot_observation(n: int = 128, p: float = 3.0) -> CheckResult:
    """
    Compares energies of the trefoil and the regular polygon at the same n.

    The result records, per quantity, whether the trefoil value exceeds the circle value. These
    are observations on two loops and say nothing about infima over knot classes.
    """
    circle = gen_circle(n)
    trefoil = gen_torus_knot(2, 3, n, 2.0, 1.0)
    result = CheckResult('unknot', params={'n': n, 'p': p})
    for name, exponent in (('Mp', p), ('Ip', p), ('Up', p), ('Moebius', None), ('acn', None), ('ropelength', None)):
        label = name if exponent is None else '{}{:g}'.format(name, exponent)
        result.add('{} trefoil > circle'.format(label), energies.evaluate(trefoil, name, exponent).value,
                   energies.evaluate(circle, name, exponent).value, '>', provenance=OBSERVATION)
    return result


def report_dict(results, tool='check') -> dict:
    """JSON document: metadata block followed by the check results."""
    results = list(results)
    document = utilities.report_metadata(tool)
    document['status'] = 'GOOD' if all(r.passed for r in results) else 'FAIL'
    document['checks'] = [r.to_dict() for r in results]
    return document


def write_report(results, stream, json_path: Optional[str] = None, tool: str = 'check'):
    """
    Writes the table of every result to `stream`, then the JSON report, to `json_path` when
    given and to `stream` otherwise.

    The JSON is strict: infinite measurements are written as the strings "inf" and "-inf".
    """
    results = list(results)
    for r in results:
        stream.write(r.table() + '\n')
    text = json.dumps(utilities.json_safe(report_dict(results, tool)), indent=2, allow_nan=False)
    if json_path:
        with open(json_path, 'w') as wf:
            wf.write(text + '\n')
    else:
        stream.write(text + '\n')
