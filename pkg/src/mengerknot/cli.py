"""
Command-line front end: ``menger {gen,energy,flow,check,bench}``.

Standard output carries numeric results only (17 significant digits); logging, advisories and
wall times go to standard error. Exit codes: 0 success, 1 error, 2 failed check suite.
"""
import argparse
import logging
import os
import sys
import time

from dotenv import load_dotenv

from . import __version__, energies, flow, harness
from .curve import SHAPES, GenParam, gen_torus_knot, read_curve, write_curve
from .mengerknot import get_energy
from .utilities import MengerError, Utilities as utilities, logger

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2

SUITES = ('ordering', 'plimits', 'charge', 'farymilnor', 'circle', 'unknot')


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises on bad arguments instead of exiting with status 2."""

    def error(self, message):
        raise MengerError(message)


def _check_in(path):
    if not os.path.isfile(path):
        raise MengerError('input file {} does not exist'.format(path))
    if not os.access(path, os.R_OK):
        raise MengerError('input file {} is not readable'.format(path))


def _check_out(path):
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(folder):
        raise MengerError('output folder {} does not exist'.format(folder))


def _advise(name, p):
    if name in energies.SCALE_INVARIANT_P and p is not None and float(p) <= energies.SCALE_INVARIANT_P[name]:
        logger.warning('%s with p=%g is not supercritical (scale-invariant threshold %g)',
                       name, float(p), energies.SCALE_INVARIANT_P[name])


def _print(*fields):
    print(' '.join(utilities.format_real(f) if isinstance(f, float) else str(f) for f in fields))


def cmd_gen(args):
    _check_out(args.out)
    loop = GenParam(shape=args.shape, n=args.n, p_torus=args.p_torus, q_torus=args.q_torus,
                    major_radius=args.major_radius, minor_radius=args.minor_radius, gap=args.gap,
                    perturb=args.perturb, seed=args.seed).build()
    write_curve(loop, args.out)
    logger.info('wrote %s with n=%d', args.out, loop.n)
    return EXIT_OK


def cmd_energy(args):
    _check_in(args.input)
    _advise(args.name, args.p)
    wrapper = get_energy(args.name, path=args.input, p=args.p, workers=args.workers)
    if not wrapper.ok:
        raise MengerError(wrapper.resp_raw['error_msg'])
    report = wrapper.report
    logger.info('%s evaluated in %.3f s', report.name, report.wall_time)
    _print(report.name, '-' if report.p is None else report.p, report.n, report.value)
    return EXIT_OK


def cmd_flow(args):
    _check_in(args.input)
    _check_out(args.out)
    if args.log_csv:
        _check_out(args.log_csv)
    if args.snapshot_prefix:
        _check_out(args.snapshot_prefix)
    loop = read_curve(args.input)
    config = flow.FlowConfig(energy=args.name, p=args.p, max_iters=args.max_iters, grad_tol=args.grad_tol,
                             step_init=args.step_init, fd_step=args.fd_step,
                             snapshot_every=args.snapshot_every, snapshot_prefix=args.snapshot_prefix)
    energies.set_workers(args.workers)
    started = time.perf_counter()
    state = flow.relax(loop, config)
    logger.info('flow finished in %.3f s', time.perf_counter() - started)
    write_curve(state.loop, args.out)
    if args.log_csv:
        flow.write_run_log(state, args.log_csv)
    _print('status', state.status)
    _print('iterations', state.iter)
    _print('energy_initial', state.energy_history[0])
    _print('energy_final', state.energy_history[-1])
    _print('grad_norm', state.last_grad_norm)
    return EXIT_OK


def _suite_loop(args):
    if not args.input:
        raise MengerError('suite {} needs --in FILE'.format(args.suite))
    _check_in(args.input)
    return read_curve(args.input)


def cmd_check(args):
    if args.json_out:
        _check_out(args.json_out)
    energies.set_workers(args.workers)
    suite = args.suite
    if suite == 'ordering':
        p_list = utilities.parse_real_list(args.p or '1,2,3,4', '--p')
        result = harness.check_ordering(_suite_loop(args), p_list)
    elif suite == 'plimits':
        schedule = utilities.parse_real_list(args.p or '1,2,4,8,16,32', '--p')
        result = harness.check_p_limits(_suite_loop(args), schedule, args.tolerance)
    elif suite == 'charge':
        gaps = utilities.parse_real_list(args.gaps, '--gaps')
        result = harness.check_charge_blowup(gaps, args.n or 128)
    elif suite == 'farymilnor':
        result = harness.check_fary_milnor(args.n or 256)
    elif suite == 'circle':
        result = harness.check_circle_convergence(utilities.parse_int_list(args.n_list, '--n-list'))
    else:
        result = harness.check_unknot_observation(args.n or 128, float(args.p or 3.0))
    harness.write_report([result], sys.stdout, args.json_out)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


def cmd_bench(args):
    ns = utilities.parse_int_list(args.n_list, '--n-list')
    param = energies.EnergyParam(name=args.name, p=args.p if args.name in energies.P_ENERGIES else None,
                                 workers=args.workers)
    if param.name in energies.P_ENERGIES and param.p is None:
        param.p = 3.0
    param._process()
    energies.set_workers(param.workers)
    timings = []
    for n in ns:
        loop = gen_torus_knot(2, 3, n)
        report = energies.evaluate(loop, param.name, param.p)
        timings.append((n, report.wall_time))
        _print(param.name, '-' if param.p is None else param.p, n, report.value)
    # timing block; keep it after the values so numeric diffs can stop at the marker
    print('# timing workers={}'.format(energies.get_workers()))
    for n, seconds in timings:
        print('{} {} {:.6f}'.format(param.name, n, seconds))
    return EXIT_OK


def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument('--workers', type=int, default=None,
                        help='worker count for the kernels (default MENGER_WORKERS, then all numba threads)')
    common.add_argument('--verbose', '-v', action='count', default=0, help='-v for INFO, -vv for DEBUG logging')

    parser = ArgumentParser(prog='menger', description='Knot energies of polygonal loops')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', metavar='{gen,energy,flow,check,bench}')
    sub.required = True

    gen = sub.add_parser('gen', parents=[common], help='generate a sample loop')
    gen.add_argument('--shape', required=True, choices=SHAPES)
    gen.add_argument('--p-torus', type=int, default=2)
    gen.add_argument('--q-torus', type=int, default=3)
    gen.add_argument('--major-radius', type=float, default=2.0)
    gen.add_argument('--minor-radius', type=float, default=1.0)
    gen.add_argument('--gap', type=float, default=None, help='strand distance of the pinched loop')
    gen.add_argument('--n', type=int, required=True)
    gen.add_argument('--seed', type=int, default=None)
    gen.add_argument('--perturb', type=float, default=None, help='perturbation amplitude (needs --seed)')
    gen.add_argument('--out', required=True)
    gen.set_defaults(func=cmd_gen)

    energy = sub.add_parser('energy', parents=[common], help='evaluate one energy')
    energy.add_argument('--in', dest='input', required=True)
    energy.add_argument('--name', required=True, choices=energies.ENERGY_NAMES)
    energy.add_argument('--p', type=float, default=None)
    energy.set_defaults(func=cmd_energy)

    relax = sub.add_parser('flow', parents=[common], help='relax a loop by gradient descent')
    relax.add_argument('--in', dest='input', required=True)
    relax.add_argument('--name', required=True, choices=energies.ENERGY_NAMES)
    relax.add_argument('--p', type=float, default=None)
    relax.add_argument('--max-iters', type=int, required=True)
    relax.add_argument('--grad-tol', type=float, required=True)
    relax.add_argument('--step-init', type=float, default=1e-2)
    relax.add_argument('--fd-step', type=float, default=1e-6)
    relax.add_argument('--snapshot-every', type=int, default=0)
    relax.add_argument('--snapshot-prefix', default=None)
    relax.add_argument('--log-csv', default=None, help='write the run log (iter, energy, grad_norm, step)')
    relax.add_argument('--out', required=True)
    relax.set_defaults(func=cmd_flow)

    check = sub.add_parser('check', parents=[common], help='run a check suite')
    check.add_argument('--suite', required=True, choices=SUITES)
    check.add_argument('--in', dest='input', default=None, help='loop for the ordering and plimits suites')
    check.add_argument('--p', default=None, help='comma separated exponents')
    check.add_argument('--tolerance', type=float, default=0.05, help='plimits tolerance at the largest p')
    check.add_argument('--gaps', default='0.1,0.05,0.025,0.0125')
    check.add_argument('--n', type=int, default=None)
    check.add_argument('--n-list', default='64,128,256,512')
    check.add_argument('--json-out', default=None)
    check.set_defaults(func=cmd_check)

    bench = sub.add_parser('bench', parents=[common], help='time one energy over a schedule of n')
    bench.add_argument('--name', required=True, choices=energies.ENERGY_NAMES)
    bench.add_argument('--n-list', required=True)
    bench.add_argument('--p', type=float, default=None)
    bench.set_defaults(func=cmd_bench)
    return parser


def _configure_logging(verbose):
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = os.getenv('MENGER_LOG_LEVEL', 'WARNING').upper()
    logging.basicConfig(stream=sys.stderr, level=level, format='%(levelname)s %(name)s: %(message)s', force=True)


def run(argv) -> int:
    """
    Runs one subcommand.

    Returns
    -------
    exit_code : int
                0 on success, 1 on any error (one line on standard error), 2 when a check
                suite fails.
    """
    load_dotenv()
    try:
        args = build_parser().parse_args(argv)
    except MengerError as error:
        print('menger: error: {}'.format(error), file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as done:
        return done.code or EXIT_OK
    try:
        _configure_logging(args.verbose)
        return args.func(args)
    except MengerError as error:
        print('menger: error: {}'.format(error), file=sys.stderr)
        return EXIT_ERROR


def main():
    return run(sys.argv[1:])
