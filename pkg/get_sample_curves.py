import argparse
import json
from os import getenv
from os.path import isdir, join

from dotenv import load_dotenv

from src.mengerknot import mengerknot
from src.mengerknot.curve import GenParam, write_curve
from src.mengerknot.utilities import Utilities


def get_sample_curves(outdir: str, n=None, gaps=None):
    """
    Writes the standard sample loops and their energy reports into outdir.

    Files: circle.json, trefoil.json, figure_eight.json and pinched_<gap>.json, each with a
    <name>_energies.json report of Mp (p=4), Moebius, TK and ropelength next to it.
    """
    load_dotenv()
    if not outdir or not isdir(outdir):
        raise Exception("outdir must be specified and/or out_dir folder does not exist")
    n = int(n or getenv('MENGER_SAMPLE_N', 128))
    gaps = gaps or [float(g) for g in getenv('MENGER_SAMPLE_GAPS', '0.1,0.05,0.025,0.0125').split(',')]

    samples = {
        'circle': GenParam(shape='circle', n=n),
        'trefoil': GenParam(shape='torus-knot', n=n),
        'figure_eight': GenParam(shape='figure-eight', n=n),
    }
    for gap in gaps:
        samples['pinched_{:g}'.format(gap)] = GenParam(shape='pinched', n=n, gap=gap)

    for name, param in samples.items():
        loop = param.build()
        write_curve(loop, join(outdir, name + '.json'))
        reports = []
        for energy, p in (('Mp', 4.0), ('Moebius', None), ('TK', None), ('ropelength', None)):
            resp = mengerknot.get_energy(energy, loop=loop, p=p)
            reports.append(resp.resp_raw)
        with open(join(outdir, name + '_energies.json'), 'w') as wf:
            json.dump(Utilities.json_safe(reports), wf, indent=2, allow_nan=False)


if __name__ == '__main__':
    parser = argparse.ArgumentParser()  # command-line arguments parsing module
    parser.add_argument('out_dir', help='Path to data directory where output files will be generated')
    parser.add_argument('--n', '-n', type=int, help='number of vertices (default MENGER_SAMPLE_N or 128)', default=None)
    parser.add_argument('--gaps', '-g', help='comma separated gaps of the pinched family', default=None)
    args = parser.parse_args()

    gap_list = [float(g) for g in args.gaps.split(',')] if args.gaps else None
    get_sample_curves(args.out_dir, args.n, gap_list)
