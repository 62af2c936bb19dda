import json
import os

import numpy as np
import pytest

from difftomo import script_ctl
from difftomo.importer import Parser
from difftomo.script_ctl import run


@pytest.fixture
def workspace(tmp_path, small_config):
    def write(config=None):
        target = tmp_path / 'config.json'
        target.write_text(json.dumps(config or small_config), encoding='utf-8')
        return str(target)

    return tmp_path, write


def invoke(tmp_path, *argv):
    rps = str(tmp_path / 'rps.json')
    code = run(list(argv) + ['--rps', rps])
    with open(rps, encoding='utf-8') as f:
        return code, json.load(f)


class TestCommands:

    def test_phantom(self, workspace):
        tmp_path, write = workspace
        out = str(tmp_path / 'out')
        code, rps = invoke(tmp_path, 'phantom', '--config', write(), '--out', out)
        assert code == 0
        assert rps['code'] == 'OK'
        assert len(rps['run_id']) == 16
        assert sorted(os.path.basename(p) for p in rps['outputs']) == ['phantom.nbin', 'phantom.pgm']
        assert Parser(os.path.join(out, 'phantom.nbin')).parser('phantom').P == 16

    def test_pipeline(self, workspace):
        tmp_path, write = workspace
        config = write()
        out = str(tmp_path / 'out')
        assert invoke(tmp_path, 'phantom', '--config', config, '--out', out)[0] == 0
        phantom = os.path.join(out, 'phantom.nbin')
        code, rps = invoke(tmp_path, 'simulate', '--config', config, '--out', out, '--phantom', phantom)
        assert code == 0
        sinogram = os.path.join(out, 'sinogram.nbin')
        assert rps['outputs'] == [sinogram]

        code, rps = invoke(tmp_path, 'reconstruct', '--config', config, '--out', out,
                           '--sinogram', sinogram, '--reference', phantom)
        assert code == 0
        names = sorted(os.path.basename(p) for p in rps['outputs'])
        assert names == ['metrics.json', 'volume_bp.nbin', 'volume_bp.pgm']
        with open(os.path.join(out, 'metrics.json'), encoding='utf-8') as f:
            assert json.load(f)['reports'][0]['name'] == 'bp'

        code, rps = invoke(tmp_path, 'compare', '--out', out, '--reference', phantom,
                           '--volumes', os.path.join(out, 'volume_bp.nbin'), phantom)
        assert code == 0
        with open(os.path.join(out, 'compare.json'), encoding='utf-8') as f:
            reports = json.load(f)['reports']
        assert [r['name'] for r in reports] == [phantom, os.path.join(out, 'volume_bp.nbin')]
        assert reports[0]['psnr_db'] == 300.0

    def test_indicatrix(self, workspace, small_config):
        tmp_path, write = workspace
        small_config['indicatrix']['sym'] = True
        out = str(tmp_path / 'out')
        code, rps = invoke(tmp_path, 'indicatrix', '--config', write(small_config), '--out', out)
        assert code == 0
        field = Parser(os.path.join(out, 'indicatrix_sym.nbin')).parser('indicatrix')
        assert field.sym
        assert field.values.shape == (32, 32)

    def test_coverage(self, workspace):
        tmp_path, write = workspace
        out = str(tmp_path / 'out')
        code, _ = invoke(tmp_path, 'coverage', '--config', write(), '--out', out)
        assert code == 0
        field = Parser(os.path.join(out, 'coverage.nbin')).parser()
        assert set(np.unique(field.values)) <= {0, 1}

    def test_bp_sym_is_real(self, workspace, small_config):
        tmp_path, write = workspace
        small_config['method'] = 'bp-sym'
        config = write(small_config)
        out = str(tmp_path / 'out')
        invoke(tmp_path, 'simulate', '--config', config, '--out', out)
        code, _ = invoke(tmp_path, 'reconstruct', '--config', config, '--out', out,
                         '--sinogram', os.path.join(out, 'sinogram.nbin'))
        assert code == 0
        volume = Parser(os.path.join(out, 'volume_bp-sym.nbin')).parser('volume')
        assert np.isrealobj(volume.values)

    def test_inverse_ndft_writes_residuals(self, workspace, small_config):
        tmp_path, write = workspace
        small_config['method'] = 'inverse-ndft'
        small_config['cg'] = {'max_iter': 5}
        config = write(small_config)
        out = str(tmp_path / 'out')
        invoke(tmp_path, 'simulate', '--config', config, '--out', out)
        with pytest.warns(UserWarning):
            code, rps = invoke(tmp_path, 'reconstruct', '--config', config, '--out', out,
                               '--sinogram', os.path.join(out, 'sinogram.nbin'))
        assert code == 0
        assert os.path.join(out, 'volume_inverse-ndft.csv') in rps['outputs']


class TestFailures:

    def test_missing_config(self, tmp_path):
        code, rps = invoke(tmp_path, 'phantom', '--out', str(tmp_path))
        assert code == 2
        assert rps['code'] == 'CONFIG_ERROR'
        assert rps['outputs'] == []

    def test_bad_config(self, workspace, small_config):
        tmp_path, write = workspace
        small_config['method'] = 'fbp'
        code, rps = invoke(tmp_path, 'phantom', '--config', write(small_config))
        assert code == 2
        assert 'method' in rps['message']

    def test_missing_sinogram_file(self, workspace):
        tmp_path, write = workspace
        code, rps = invoke(tmp_path, 'reconstruct', '--config', write(), '--out', str(tmp_path),
                           '--sinogram', str(tmp_path / 'none.nbin'))
        assert code == 4
        assert rps['code'] == 'NBIN_FORMAT'

    def test_support_violation(self, workspace, small_config):
        tmp_path, write = workspace
        small_config['phantom']['support_radius'] = 4.5
        code, rps = invoke(tmp_path, 'phantom', '--config', write(small_config), '--out', str(tmp_path))
        assert code == 2
        assert rps['code'] == 'SUPPORT_VIOLATION'

    def test_compare_needs_volumes(self, tmp_path):
        code, _ = invoke(tmp_path, 'compare', '--reference', str(tmp_path / 'x.nbin'))
        assert code == 2

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            run(['tidy'])

    def test_unexpected_failure(self, tmp_path, monkeypatch):
        def broken(args):
            raise RuntimeError('boom')

        monkeypatch.setitem(script_ctl.COMMANDS, 'phantom', broken)
        code, rps = invoke(tmp_path, 'phantom')
        assert code == 3
        assert rps['code'] == 'INTERNAL_ERROR'
        assert 'boom' in rps['message']

    def test_output_not_writable(self, tmp_path, monkeypatch):
        def denied(args):
            raise PermissionError('read-only folder')

        monkeypatch.setitem(script_ctl.COMMANDS, 'phantom', denied)
        code, rps = invoke(tmp_path, 'phantom')
        assert code == 4
        assert rps['code'] == 'IO_ERROR'

    def test_response_file_not_writable(self, workspace, capsys):
        tmp_path, write = workspace
        target = str(tmp_path / 'missing' / 'rps.json')
        code = run(['phantom', '--config', write(), '--out', str(tmp_path / 'out'), '--rps', target])
        assert code == 4
        rps = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert rps['code'] == 'IO_ERROR'
        assert target in rps['message']

    def test_response_on_stdout(self, tmp_path, capsys):
        code = run(['phantom', '--out', str(tmp_path)])
        assert code == 2
        rps = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert rps['code'] == 'CONFIG_ERROR'
