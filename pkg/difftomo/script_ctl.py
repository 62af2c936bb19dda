import argparse
import json
import logging
import math
import os
import sys
from os.path import join

from nanoid import generate
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from difftomo.exceptions import (
    ConfigException, DiffTomoException, InternalException, NumericalCheckException, StorageException, exit_code_for
)
from difftomo.experiment import Experiment
from difftomo.exporter._standard import _to_csv
from difftomo.exporter.converter import Result
from difftomo.importer.config import load_config
from difftomo.importer.parser import Parser
from difftomo.metrics import report
from difftomo.scattering.fdt import fdt_check
from difftomo.scattering.phantom import make_phantom

logger = logging.getLogger('difftomo')

FDT_THRESHOLD = 0.03


def _experiment(args) -> Experiment:
    if not args.config:
        raise ConfigException(message=f'"{args.command}" needs --config')
    return Experiment(load_config(args.config), threads=args.threads, progress=True)


def _export(artifact, name, out, formats):
    result = Result(artifact, name)
    return [result.convert(fmt, out) for fmt in formats]


def cmd_phantom(args):
    exp = _experiment(args)
    return _export(exp.phantom(), 'phantom', args.out, ['nbin', 'pgm'])


def cmd_simulate(args):
    exp = _experiment(args)
    phantom = Parser(args.phantom).parser('phantom') if args.phantom else exp.phantom()
    sino = exp.simulate(phantom, oracle=args.oracle)
    return _export(sino, 'sinogram', args.out, ['nbin'])


def cmd_indicatrix(args):
    exp = _experiment(args)
    field = exp.indicatrix()
    name = 'indicatrix_sym' if field.sym else 'indicatrix'
    return _export(field, name, args.out, ['nbin', 'pgm'])


def cmd_coverage(args):
    exp = _experiment(args)
    return _export(exp.coverage(), 'coverage', args.out, ['nbin', 'pgm'])


def cmd_reconstruct(args):
    exp = _experiment(args)
    sino = Parser(args.sinogram).parser('sinogram') if args.sinogram else None
    field = Parser(args.indicatrix).parser('indicatrix') if args.indicatrix else None
    reference = Parser(args.reference).parser('phantom') if args.reference else None
    volume = exp.reconstruct(sino, field, phantom=reference)
    name = f'volume_{volume.method}'
    outputs = _export(volume, name, args.out, ['nbin', 'pgm'])
    if 'residuals' in volume.meta:
        outputs += _export(volume, name, args.out, ['csv'])
    if reference is not None:
        outputs += _export([report(reference.values, volume.values, volume.method)], 'metrics', args.out, ['json'])
    return outputs


def cmd_compare(args):
    if not args.reference or not args.volumes:
        raise ConfigException(message='"compare" needs --reference and --volumes')
    reference = Parser(args.reference).parser()
    candidates = {path: Parser(path).parser() for path in args.volumes}
    reports = Experiment.compare(reference, candidates)
    table = Table(title='Reconstruction quality')
    table.add_column('volume')
    table.add_column('PSNR [dB]', justify='right')
    table.add_column('SSIM', justify='right')
    for r in reports:
        table.add_row(r.name, f'{min(r.psnr_db, 300.0):.2f}', f'{r.ssim:.4f}')
    Console(stderr=True).print(table)
    return _export(reports, 'compare', args.out, ['json'])


def cmd_fdt_check(args):
    if args.config:
        config = load_config(args.config)
        phantom = config.build_phantom()
        k0 = config.build_path().k_max
    else:
        k0 = 2 * math.pi
        phantom = make_phantom({'generator': 'gaussian-blob', 'sigma': 1.0, 'support_radius': 5.0}, 2, 64, 20.0)
    result = fdt_check(phantom, k0, progress=True)
    table = Table(title='Fourier diffraction theorem check')
    table.add_column('|x| / k0')
    table.add_column('relative error', justify='right')
    for lo, hi, err in result['bands']:
        table.add_row(f'{lo:.2f} - {hi:.2f}', f'{err:.4%}')
    table.add_row('all', f"{result['error']:.4%}")
    Console(stderr=True).print(table)
    rows = [(float(x), float(m.real), float(m.imag), float(p.real), float(p.imag))
            for x, m, p in zip(result['x'], result['measured'], result['predicted'])]
    os.makedirs(args.out, exist_ok=True)
    target = _to_csv(rows, ('x', 'measured_re', 'measured_im', 'predicted_re', 'predicted_im'), join(args.out, 'fdt_check.csv'))
    if result['error'] > FDT_THRESHOLD:
        raise NumericalCheckException(message=f"FDT relative error {result['error']:.4f} exceeds {FDT_THRESHOLD}")
    return [target]


COMMANDS = {
    'phantom': cmd_phantom,
    'simulate': cmd_simulate,
    'indicatrix': cmd_indicatrix,
    'coverage': cmd_coverage,
    'reconstruct': cmd_reconstruct,
    'compare': cmd_compare,
    'fdt-check': cmd_fdt_check
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='difftomo', description='diffraction tomography pipeline')
    parser.add_argument('command', type=str, choices=list(COMMANDS), help='pipeline step')
    parser.add_argument('--config', type=str, default=None, help='experiment config (JSON)')
    parser.add_argument('--out', type=str, default='.', help='output folder')
    parser.add_argument('--threads', type=int, default=1, help='worker threads for the NDFT')
    parser.add_argument('--oracle', action='store_true', help='simulate with the direct Born quadrature')
    parser.add_argument('--phantom', type=str, default=None, help='phantom NBIN for simulate')
    parser.add_argument('--sinogram', type=str, default=None, help='sinogram NBIN for reconstruct')
    parser.add_argument('--indicatrix', type=str, default=None, help='indicatrix NBIN for reconstruct')
    parser.add_argument('--reference', type=str, default=None, help='ground-truth phantom NBIN')
    parser.add_argument('--volumes', type=str, nargs='*', default=None, help='volume NBINs for compare')
    parser.add_argument('--rps', type=str, default=None, help='The json file in which the response is stored,'
                                                              'if none, the output is in the console')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(message)s',
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True
    )
    if args.threads < 1:
        args.threads = 1

    outputs = []
    try:
        outputs = COMMANDS[args.command](args)
        code = 'OK'
        message = ''
    except DiffTomoException as e:
        code = e.code
        message = e.message
        logger.error(str(e))
    except OSError as e:
        code = StorageException.code
        message = str(e)
        logger.error(f'<{code}> {message}')
    except Exception as e:
        code = InternalException.code
        message = f'{e.__class__.__name__}: {e}'
        logger.exception('unexpected failure')

    rps_data = {
        'code': code,
        'message': message,
        'run_id': generate(size=16),
        'outputs': outputs
    }
    if args.rps:
        try:
            with open(args.rps, 'w', encoding='utf-8') as rf:
                json.dump(rps_data, rf, ensure_ascii=False)
            return exit_code_for(code)
        except OSError as e:
            logger.error(f'<{StorageException.code}> cannot write {args.rps}: {e}')
            rps_data['code'] = code = StorageException.code
            rps_data['message'] = message = f'cannot write {args.rps}: {e}'
    print(json.dumps(rps_data, ensure_ascii=False))
    return exit_code_for(code)


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
