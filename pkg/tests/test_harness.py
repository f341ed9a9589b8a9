import io
import json
import math

import pytest

from src.mengerknot import curve, harness
from src.mengerknot.harness import CheckResult, Measurement
from src.mengerknot.utilities import DomainError

"""
Tests for the check suites and the report writer.
"""

HIGH_P = [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]


def assert_pass(result):
    """
    Asserts a CheckResult passed, listing every failing measurement otherwise.

    Parameters
    ----------
    result : CheckResult
    """
    assert result.status == 'pass', result.table()


@pytest.fixture(scope='module')
def trefoil():
    return curve.gen_torus_knot(2, 3, 128, 2.0, 1.0)


def test_ordering_on_circle():
    result = harness.check_ordering(curve.gen_circle(128), [1, 2, 3, 4])
    assert_pass(result)
    assert len(result.measurements) == 12


def test_ordering_on_trefoil_and_perturbed_circle(trefoil):
    assert_pass(harness.check_ordering(trefoil, [2, 3, 4]))
    assert_pass(harness.check_ordering(curve.perturb(curve.gen_circle(64), 0.05, 7), [3]))


def test_ordering_needs_unit_length(trefoil):
    with pytest.raises(DomainError):
        harness.check_ordering(trefoil.scaled(2.0), [2])


def test_p_limits_on_circle_and_trefoil(trefoil):
    assert_pass(harness.check_p_limits(curve.gen_circle(128), HIGH_P))
    assert_pass(harness.check_p_limits(trefoil, HIGH_P))


def test_p_limits_on_square():
    square = curve.normalize_to_C(curve.from_vertices([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]))
    assert_pass(harness.check_p_limits(square, HIGH_P))


def test_p_limits_sequences_are_monotone_up_to_32(trefoil):
    result = harness.check_p_limits(trefoil, [1, 2, 4, 8, 16, 32])
    monotone = [m for m in result.measurements if '->' in m.quantity]
    assert len(monotone) == 15
    assert all(m.ok for m in monotone)


def test_p_limits_gap_at_32(trefoil, record_property):
    """
    Records how far the roots still are from 1/thickness at p = 32 on the n = 128 trefoil.

    The discrete sums are dominated by their largest single term, which bounds the gap from
    above: one ordered triple (Mp), one ordered pair (Ip) or one node (Up) of weight at least
    0.7/n already carries (1/thickness)^p. The roots also never pass the limit and satisfy
    Mp <= Ip <= Up.
    """
    result = harness.check_p_limits(trefoil, [1, 2, 4, 8, 16, 32])
    at_32 = {m.quantity.split('^')[0]: m for m in result.measurements if m.quantity.endswith('vs 1/thickness')}
    assert sorted(at_32) == ['Ip', 'Mp', 'Up']
    gaps = {name: (m.expected - m.measured) / m.expected for name, m in at_32.items()}
    for name, gap in gaps.items():
        record_property('gap_{}_p32'.format(name), gap)
    assert all(gap >= -1e-12 for gap in gaps.values())
    assert gaps['Up'] <= gaps['Ip'] + 1e-12
    assert gaps['Ip'] <= gaps['Mp'] + 1e-12
    assert gaps['Mp'] < 0.35
    assert gaps['Ip'] < 0.3
    assert gaps['Up'] < 0.2


@pytest.mark.parametrize('schedule', [[1, 2, 4, 8, 16], [1, 4, 2, 64], [2, 2, 32]])
def test_p_limits_schedule_checks(trefoil, schedule):
    with pytest.raises(DomainError):
        harness.check_p_limits(trefoil, schedule)


def test_charge_blowup():
    result = harness.check_charge_blowup([0.1, 0.05, 0.025, 0.0125], 128)
    assert_pass(result)
    growth = {m.quantity: m.measured for m in result.measurements if m.quantity.endswith('growth')}
    assert growth['TK growth'] == pytest.approx(1.0, abs=1e-12)
    assert growth['1/thickness growth'] >= 4
    for label in ('Mp4', 'Ip3', 'Up2', 'Ep3', 'Moebius'):
        assert growth[label + ' growth'] >= 10


def test_charge_blowup_needs_decreasing_gaps():
    with pytest.raises(DomainError):
        harness.check_charge_blowup([0.05, 0.1], 64)


@pytest.mark.parametrize('n', [64, 256])
def test_fary_milnor(n):
    result = harness.check_fary_milnor(n)
    assert_pass(result)
    assert [m.quantity for m in result.measurements] == ['TK(trefoil) >= 4pi', 'TK(figure-eight) >= 4pi',
                                                         'TK(circle) = 2pi']


def test_fary_milnor_needs_enough_vertices():
    with pytest.raises(DomainError):
        harness.check_fary_milnor(32)


def test_circle_convergence():
    result = harness.check_circle_convergence([64, 128, 256, 512])
    assert_pass(result)
    limit = [m for m in result.measurements if m.quantity == 'Moebius Richardson limit'][0]
    assert limit.measured == pytest.approx(4.0, abs=0.05)


def test_circle_convergence_needs_increasing_n():
    with pytest.raises(DomainError):
        harness.check_circle_convergence([128, 64])


def test_unknot_observation():
    result = harness.check_unknot_observation(64, 3.0)
    assert_pass(result)
    assert all(m.provenance == harness.OBSERVATION for m in result.measurements)


def test_richardson_removes_first_order_error():
    ns = [64, 128, 256]
    values = [4.0 + 18.4 / n for n in ns]
    assert harness.richardson(values, ns) == pytest.approx(4.0, abs=1e-12)
    values = [1.0 + 3.0 / n ** 2 for n in ns]
    assert harness.richardson(values, ns, order=2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        harness.richardson([1.0], [64])


def test_empirical_order():
    orders = harness.empirical_order([1 / 64, 1 / 128, 1 / 256], [64, 128, 256])
    assert orders == pytest.approx([1.0, 1.0])


def test_empirical_order_with_exact_values():
    orders = harness.empirical_order([0.01, 0.0, 0.0, 0.02], [64, 128, 256, 512])
    assert orders[0] == math.inf
    assert math.isnan(orders[1])
    assert orders[2] == -math.inf


@pytest.mark.parametrize('last, first, expected', [
    (20.0, 2.0, 10.0),
    (3.0, 0.0, math.inf),
    (-3.0, 0.0, -math.inf),
])
def test_growth_ratio(last, first, expected):
    assert harness.growth_ratio(last, first) == expected


def test_growth_ratio_of_a_series_stuck_at_zero_fails_its_check():
    assert math.isnan(harness.growth_ratio(0.0, 0.0))
    result = CheckResult('demo')
    result.add('flat growth', harness.growth_ratio(0.0, 0.0), 10.0, '>=')
    result.add('jump growth', harness.growth_ratio(1.0, 0.0), 10.0, '>=')
    assert [m.ok for m in result.measurements] == [False, True]


@pytest.mark.parametrize('relation, measured, expected, tolerance, ok', [
    ('<=', 1.0, 1.0, 0.0, True),
    ('<=', 1.0 + 1e-13, 1.0, 1e-12, True),
    ('<=', 1.1, 1.0, 0.05, False),
    ('>=', 0.99, 1.0, 0.02, True),
    ('<', 1.0, 1.0, 0.0, False),
    ('>', 2.0, 1.0, 0.0, True),
    ('~', 1.04, 1.0, 0.05, True),
    ('~', 0.9, 1.0, 0.05, False),
])
def test_measurement_relations(relation, measured, expected, tolerance, ok):
    assert Measurement('q', measured, expected, relation, tolerance, harness.DERIVED).ok is ok


def test_failing_measurement_fails_the_check_and_is_reported():
    result = CheckResult('demo')
    result.add('first', 1.0, 2.0, '<=')
    result.add('second', 3.0, 2.0, '<=')
    assert result.status == 'fail'
    assert [m.quantity for m in result.failures()] == ['second']
    table = result.table()
    assert table.startswith('demo: FAIL')
    assert 'FAIL second' in table


def test_write_report(tmp_path):
    passed = CheckResult('one')
    passed.add('x', 1.0, 1.0, '~', 0.1)
    failed = CheckResult('two')
    failed.add('y', 1.0, 0.0, '<', provenance=harness.THEOREM)

    stream = io.StringIO()
    json_path = tmp_path / 'report.json'
    harness.write_report([passed, failed], stream, str(json_path))
    assert 'one: PASS' in stream.getvalue()
    assert 'two: FAIL' in stream.getvalue()
    with open(json_path) as rf:
        document = json.load(rf)
    for key in ('tool', 'mengerknot_version', 'timezone', 'run_time', 'status', 'error_msg'):
        assert key in document
    assert document['status'] == 'FAIL'
    assert [c['status'] for c in document['checks']] == ['pass', 'fail']
    assert document['checks'][1]['measurements'][0]['provenance'] == 'theorem'


def test_write_report_to_stream_only():
    result = CheckResult('one')
    result.add('x', math.pi, math.pi, '~', 0.0)
    stream = io.StringIO()
    harness.write_report([result], stream)
    text = stream.getvalue()
    document = json.loads(text[text.index('{'):])
    assert document['checks'][0]['measurements'][0]['measured'] == math.pi


def reject_constant(name):
    raise ValueError('non-standard JSON constant {}'.format(name))


def test_write_report_is_strict_json_with_infinite_values(tmp_path):
    result = CheckResult('blowup')
    result.add('Moebius growth', harness.growth_ratio(2.0, 0.0), 10.0, '>=')
    result.add('flat growth', harness.growth_ratio(0.0, 0.0), 10.0, '>=')
    result.add('finite', 1.5, -math.inf, '>')
    json_path = tmp_path / 'report.json'
    harness.write_report([result], io.StringIO(), str(json_path))
    text = json_path.read_text()
    assert 'Infinity' not in text and 'NaN' not in text
    document = json.loads(text, parse_constant=reject_constant)
    measurements = document['checks'][0]['measurements']
    assert [m['measured'] for m in measurements] == ['inf', 'nan', 1.5]
    assert measurements[2]['expected'] == '-inf'
