# Copyright (c) 2026 setbm contributors
# 
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
# 
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
# 
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
# THE SOFTWARE.

import json, math
from importlib import resources

import pytest

from . import cli
from .cli import main, parseSet, readConfig, packagedConfig, \
        ExperimentConfig, ConfigError, ExitStatus, SCHEMA, SCHEMA_VERSION
from .sets import Interval, Ball, Polytope
from .util import formatFloat

def schema ():
    resource = resources.files (__package__).joinpath ('data').joinpath ('report.schema.json')
    return json.loads (resource.read_text (encoding='utf-8'))

def checkDocument (doc, command):
    """ Top-level structure of a report against the packaged schema """
    s = schema ()
    for k in s['required']:
        assert k in doc, k
    assert doc['schema'] == SCHEMA == s['properties']['schema']['const']
    assert doc['version'] == SCHEMA_VERSION == s['properties']['version']['const']
    assert doc['command'] == command
    for k in doc:
        assert k in s['properties'], k
    for r in doc.get ('reports', []):
        for k in s['properties']['reports']['items']['required']:
            assert k in r, k

def logLines (err):
    return [json.loads (l) for l in err.splitlines () if l.startswith ('{')]

def test_simulateCsv (capsys):
    argv = ['simulate', '--seed', '42', '--n-paths', '10', '--uniform', '100', '1.0']
    assert main (argv) == ExitStatus.Ok
    first = capsys.readouterr ()
    lines = first.out.splitlines ()
    assert lines[0] == 'path,time,W'
    assert len (lines) == 1 + 10*101
    assert lines[1] == '0,0,0'
    assert lines[-1].startswith ('9,1,')

    log = logLines (first.err)
    assert log[-1]['msg'] == 'exit' and log[-1]['status'] == 0
    assert log[-1]['errors'] == 0
    assert all ('uuid' in l and l['context'] == 'cli' for l in log)

    assert main (argv) == ExitStatus.Ok
    assert capsys.readouterr ().out == first.out

    assert main (argv[:2] + ['43'] + argv[3:]) == ExitStatus.Ok
    assert capsys.readouterr ().out != first.out

def test_simulateFull (capsys):
    assert main (['simulate', '--n-paths', '2', '--uniform', '4', '1',
            '--grid-size', '8', '--full']) == ExitStatus.Ok
    lines = capsys.readouterr ().out.splitlines ()
    header = lines[0].split (',')
    assert header == ['path', 'time', 'W'] + [f'e{k}' for k in range (8)]
    assert len (lines) == 1 + 2*5
    # every direction sees W, since e is one everywhere
    row = lines[3].split (',')
    assert row[3:] == [row[2]]*8

def test_simulateJson (capsys):
    assert main (['simulate', '--n-paths', '3', '--times', '0.5', '1',
            '--format', 'json', '--full', '--grid-size', '4']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    checkDocument (doc, 'simulate')
    assert doc['times'] == [0, 0.5, 1]
    assert len (doc['paths']) == 3 and len (doc['paths'][0]) == 3
    assert len (doc['embedded'][0][0]) == 4
    assert doc['grid']['m'] == 4
    assert doc['params']['seed'] == 42
    assert 'output' not in doc['params']

def test_simulateOutputFile (tmp_path, capsys):
    out = tmp_path / 'paths.csv'
    assert main (['simulate', '--n-paths', '1', '--uniform', '2', '1',
            '-o', str (out)]) == ExitStatus.Ok
    assert capsys.readouterr ().out == ''
    assert len (out.read_text ().splitlines ()) == 4

def test_simulateInvalid (capsys):
    # verify only writes JSON
    assert main (['verify', '--format', 'csv']) == ExitStatus.Usage
    assert main (['simulate', '--uniform', '0', '1']) == ExitStatus.Usage
    assert main (['simulate', '--grid-dimension', '2', '--grid-size', '6']) == ExitStatus.Usage
    assert main (['simulate', '--times', '-1']) == ExitStatus.Usage
    assert main ([]) == ExitStatus.Usage
    with pytest.raises (SystemExit):
        main (['simulate', '--seed', '-1'])
    with pytest.raises (SystemExit):
        main (['simulate', '--times', '1', '--uniform', '2', '1'])

def test_config (tmp_path, capsys):
    conf = tmp_path / 'simulate.conf'
    conf.write_text ('# a comment\nn_paths = 3\nuniform = [4, 1.0]   # inline\nseed = 7\n')
    assert main (['simulate', '--config', str (conf)]) == ExitStatus.Ok
    fromFile = capsys.readouterr ().out
    assert len (fromFile.splitlines ()) == 1 + 3*5

    # flags win over the file
    assert main (['simulate', '--config', str (conf), '--n-paths', '2']) == ExitStatus.Ok
    assert len (capsys.readouterr ().out.splitlines ()) == 1 + 2*5
    assert main (['simulate', '--config', str (conf), '--times', '1']) == ExitStatus.Ok
    assert len (capsys.readouterr ().out.splitlines ()) == 1 + 3*2

    # same parameters as flags, same output
    assert main (['simulate', '--n-paths', '3', '--uniform', '4', '1', '--seed', '7']) == ExitStatus.Ok
    assert capsys.readouterr ().out == fromFile

def test_configErrors (tmp_path, capsys):
    assert main (['simulate', '--config', str (tmp_path / 'missing.conf')]) == ExitStatus.Io

    bad = tmp_path / 'bad.conf'
    bad.write_text ('colour = blue\n')
    assert main (['simulate', '--config', str (bad)]) == ExitStatus.Usage
    bad.write_text ('seed\n')
    assert main (['simulate', '--config', str (bad)]) == ExitStatus.Usage
    bad.write_text ('n-paths = [1\n')
    assert main (['simulate', '--config', str (bad)]) == ExitStatus.Usage
    bad.write_text ('n-paths = 1.5\n')
    assert main (['simulate', '--config', str (bad)]) == ExitStatus.Usage
    capsys.readouterr ()

def test_readConfig (tmp_path):
    conf = tmp_path / 'x.conf'
    conf.write_text ('n-paths = 1e5\ntimes = [1, 2]\ntests = [mgf, qv]\nlambda = 0.5\n')
    values = readConfig (conf)
    assert values == {'nPaths': '1e5', 'times': [1, 2], 'tests': ['mgf', 'qv'],
            'lam': 0.5}
    config = ExperimentConfig.merge ('verify', values, {})
    assert config.nPaths == 100000
    assert config.tests == ('mgf', 'qv')
    assert config.timegrid.times.tolist () == [0, 1, 2]

def test_packagedConfig ():
    values = packagedConfig ('verify')
    assert values['seed'] == 42 and values['nPaths'] == 100000
    assert values['times'] == [1, 2, 3]
    assert packagedConfig ('ghdiff') == {}
    config = ExperimentConfig.merge ('verify', {}, {})
    assert config.nPaths == 100000 and config.gridDimension == 2
    config = ExperimentConfig.merge ('verify', {'uniform': [10, 1]}, {})
    assert config.times is None and config.uniform == (10, 1.0)

def test_experimentConfig ():
    with pytest.raises (ConfigError):
        ExperimentConfig ('simulate', times=[1], uniform=[2, 1], format='csv')
    with pytest.raises (ConfigError):
        ExperimentConfig ('simulate', seed=2**64, format='csv')
    with pytest.raises (ConfigError):
        ExperimentConfig ('simulate', nPaths=0, format='csv')
    with pytest.raises (ConfigError):
        ExperimentConfig ('verify', tests=['nonsense'], format='json')
    with pytest.raises (ConfigError):
        ExperimentConfig ('distfn', lam=-1, format='csv')
    with pytest.raises (ConfigError):
        ExperimentConfig ('ghdiff', a='[0, 1]', format='json')
    with pytest.raises (ConfigError):
        ExperimentConfig ('unknown')
    c = ExperimentConfig ('verify', nPaths='2e3', tests='mgf', format='json')
    assert c.nPaths == 2000 and c.tests == ('mgf', )
    assert 'threads' not in c.toDict ()

def test_threadsEnvironment (monkeypatch, capsys):
    monkeypatch.setenv ('SETBM_THREADS', 'lots')
    assert main (['simulate', '--n-paths', '1']) == ExitStatus.Usage
    monkeypatch.setenv ('SETBM_THREADS', '2')
    assert main (['simulate', '--n-paths', '1']) == ExitStatus.Ok
    capsys.readouterr ()

@pytest.mark.parametrize ('spec, expected', [
        ('[1, 5]', Interval (1, 5)),
        ('{lo: -1, hi: 2}', Interval (-1, 2)),
        ('{center: [0, 0], radius: 2}', Ball ([0, 0], 2)),
        ('[[0, 0], [1, 0], [0, 1]]', Polytope ([[0, 0], [1, 0], [0, 1]])),
        ([[1], [3]], Polytope ([[1], [3]])),
        ])
def test_parseSet (spec, expected):
    assert parseSet (spec).toDict () == expected.toDict ()

@pytest.mark.parametrize ('spec', ['[1', '[2, 1]', '[1, 2, 3]', 'foo', '[]',
        '{center: [0, 0]}', '{center: [0, 0], radius: -1}', '[[0, 0], [1]]'])
def test_parseSetInvalid (spec):
    with pytest.raises (ConfigError):
        parseSet (spec)

def test_ghdiff (capsys):
    assert main (['ghdiff', '--a', '[1,5]', '--b', '[0,2]']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    checkDocument (doc, 'ghdiff')
    assert doc['case'] == 'CaseI'
    assert doc['value'] == {'type': 'interval', 'lo': 1, 'hi': 3}
    assert all (i['passed'] for i in doc['identities'])

    assert main (['ghdiff', '--a', '[0,1]', '--b', '[0,1]']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    assert doc['case'] == 'BothSingleton'
    assert doc['value'] == {'type': 'interval', 'lo': 0, 'hi': 0}

    assert main (['ghdiff', '--a', '[[0,0],[1,0]]', '--b', '[[0,0],[0,1]]']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    assert doc['case'] == 'NotExists'
    assert doc['value'] is None

def test_ghdiffInvalid (capsys):
    assert main (['ghdiff', '--a', '[1', '--b', '[0,2]']) == ExitStatus.Usage
    assert main (['ghdiff', '--a', '[0,1]']) == ExitStatus.Usage
    assert main (['ghdiff', '--a', '[0,1]', '--b', '{center: [0, 0], radius: 1}']) \
            == ExitStatus.Usage
    err = capsys.readouterr ().err
    assert 'error:' in err
    log = logLines (err)
    assert log[-1]['msg'] == 'exit' and log[-1]['status'] == ExitStatus.Usage
    assert log[-1]['errors'] == 1

def test_distfn (capsys, monkeypatch):
    ret = main (['distfn', '--n-samples', '20000', '--points', '4',
            '--lambda', '1', '--ymax', '3'])
    lines = capsys.readouterr ().out.splitlines ()
    assert lines[0] == 'y1,y2,mc_estimate,half_width,analytic,abs_err'
    assert len (lines) == 1 + 10
    rows = [dict (zip (lines[0].split (','), map (float, l.split (','))))
            for l in lines[1:]]
    row = rows[1]
    assert (row['y1'], row['y2']) == (0, 1)
    assert row['analytic'] == pytest.approx (1 - 2/math.e)
    assert abs (row['mc_estimate'] - row['analytic']) < 0.02
    coverage = sum (r['abs_err'] <= r['half_width'] for r in rows)/len (rows)
    assert ret == (ExitStatus.Ok if coverage >= cli.COVERAGE_GATE else ExitStatus.Fail)

    # the exit status follows the coverage gate
    argv = ['distfn', '--n-samples', '1000', '--points', '3']
    monkeypatch.setattr (cli, 'COVERAGE_GATE', 0.0)
    assert main (argv) == ExitStatus.Ok
    monkeypatch.setattr (cli, 'COVERAGE_GATE', 1.01)
    assert main (argv) == ExitStatus.Fail

def test_distfnJson (capsys):
    main (['distfn', '--n-samples', '1000', '--points', '3', '--format', 'json'])
    doc = json.loads (capsys.readouterr ().out)
    checkDocument (doc, 'distfn')
    assert len (doc['rows']) == 6
    assert 0 <= doc['coverage'] <= 1
    assert doc['params']['lam'] == 1

def test_verifyFewPaths (capsys):
    assert main (['verify', '--n-paths', '10']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    checkDocument (doc, 'verify')
    skipped = [r for r in doc['reports'] if r['skipped']]
    assert skipped
    assert all (r['pass'] is None for r in skipped)
    assert doc['settings']['nPaths'] == 10

def test_verifyLineGrid (capsys):
    """ Without a grid size every grid dimension gets its own default """
    assert 'gridSize' not in packagedConfig ('verify')
    config = ExperimentConfig.merge ('verify', {}, {'gridDimension': 1})
    assert config.gridSize is None and len (config.grid) == 2
    assert len (ExperimentConfig.merge ('verify', {}, {}).grid) == 256
    assert len (ExperimentConfig.merge ('verify', {}, {'gridDimension': 3}).grid) == 512

    assert main (['verify', '--grid-dimension', '1', '--n-paths', '10',
            '--tests', 'increments']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    assert doc['settings']['gridDimension'] == 1
    assert doc['settings']['gridSize'] is None
    assert [r['skipped'] is not None for r in doc['reports']] == [True]

def test_verifySelection (capsys):
    assert main (['verify', '--n-paths', '2000', '--tests', 'invariance',
            'mgf', '--times', '1', '2']) == ExitStatus.Ok
    doc = json.loads (capsys.readouterr ().out)
    assert [r['test'] for r in doc['reports']] \
            == ['evaluation invariance', 'mgf', 'mgf without ½']
    assert doc['reports'][1]['theoretical'] == pytest.approx (math.exp (0.625))

def test_verifyIndex (capsys):
    assert main (['verify', '--n-paths', '10', '--index', '999']) == ExitStatus.Usage
    capsys.readouterr ()

def test_formatFloat ():
    for x in (0.1, 1/3, -2.5e-300, 1e22):
        assert float (formatFloat (x)) == x
    assert formatFloat (0) == '0'
    assert formatFloat (1.0) == '1'
