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

"""
Command line interface
"""

import argparse, sys, json, csv, math
from importlib import resources
from contextlib import contextmanager
from traceback import TracebackException
from enum import IntEnum

import numpy as np
import yaml

from .logger import Logger, JsonPrintConsumer, DatetimeConsumer, Level, \
        LevelCounter
from .util import StrJsonEncoder, formatFloat, getSoftwareInfo
from .sets import Interval, Ball, Polytope, DimensionMismatch, \
        UnsupportedRepresentationPair
from .embedding import DirectionGrid, InvalidGrid, unitElement
from .ghdiff import ghDiff, checkGhIdentities, ReconstructionUnavailable
from .distribution import distributionSurface
from .brownian import TimeGrid, InvalidTimeGrid, Battery, BatterySettings, \
        simulateBm
from .stats import threadCount

SCHEMA = 'setbm-report'
SCHEMA_VERSION = 1
# share of distfn cells whose estimate must cover the closed form
COVERAGE_GATE = 0.93

class ConfigError (ValueError):
    pass

class ExitStatus (IntEnum):
    """ Exit status for the command line """
    Ok = 0
    Fail = 1
    Usage = 2
    Io = 3

def seed (s):
    """ argparse: unsigned 64 bit integer """
    try:
        return _seed (int (s))
    except (ValueError, ConfigError) as e:
        raise argparse.ArgumentTypeError (str (e))

def _seed (v):
    if isinstance (v, bool) or not isinstance (v, int) or not 0 <= v < 2**64:
        raise ConfigError (f'Seed must be an unsigned 64 bit integer, got {v!r}')
    return v

def _count (name, v):
    """ Positive integer, also from YAML floats like 1.0e5 or strings like 1e5 """
    try:
        if isinstance (v, str):
            v = float (v)
        if isinstance (v, bool) or float (v) != int (v) or int (v) < 1:
            raise ValueError ()
    except (TypeError, ValueError, OverflowError):
        raise ConfigError (f'{name} must be a positive integer, got {v!r}') from None
    return int (v)

def _positive (name, v):
    try:
        v = float (v)
    except (TypeError, ValueError):
        raise ConfigError (f'{name} must be a number, got {v!r}') from None
    if not v > 0 or not math.isfinite (v):
        raise ConfigError (f'{name} must be positive and finite, got {v!r}')
    return v

def _number (x):
    return isinstance (x, (int, float)) and not isinstance (x, bool)

def parseSet (spec):
    """
    Inline set: [lo, hi] is an interval, {center: [...], radius: r} a ball
    and a list of points [[...], ...] a polytope. Strings are read as YAML.
    """
    if isinstance (spec, str):
        try:
            spec = yaml.safe_load (spec)
        except yaml.YAMLError as e:
            raise ConfigError (f'Unparsable set {spec!r}: {e}') from None
    try:
        if isinstance (spec, dict):
            if set (spec) == {'center', 'radius'}:
                return Ball (spec['center'], spec['radius'])
            if set (spec) == {'lo', 'hi'}:
                return Interval (spec['lo'], spec['hi'])
        elif isinstance (spec, list) and spec:
            if all (isinstance (p, list) for p in spec):
                return Polytope (spec)
            if len (spec) == 2 and all (map (_number, spec)):
                return Interval (*spec)
    except (ValueError, TypeError) as e:
        raise ConfigError (f'Invalid set {spec!r}: {e}') from None
    raise ConfigError (f'Unparsable set {spec!r}')

# config file key → attribute, keys accept dashes or underscores
CONFIG_KEYS = {
        'seed': 'seed',
        'n-paths': 'nPaths',
        'n-samples': 'nSamples',
        'times': 'times',
        'uniform': 'uniform',
        'grid-dimension': 'gridDimension',
        'grid-size': 'gridSize',
        'index': 'index',
        'full': 'full',
        'tests': 'tests',
        'lambda': 'lam',
        'ymax': 'ymax',
        'points': 'points',
        'a': 'a',
        'b': 'b',
        'output': 'output',
        'format': 'format',
        }

def readConfig (path):
    """ Flat key=value file, # starts a comment, values in YAML syntax """
    values = {}
    with open (path, encoding='utf-8') as fd:
        for lineno, l in enumerate (fd, 1):
            l = l.split ('#', 1)[0].strip ()
            if not l:
                continue
            key, sep, value = l.partition ('=')
            key = key.strip ().replace ('_', '-')
            if not sep:
                raise ConfigError (f'{path}:{lineno}: expected key=value')
            if key not in CONFIG_KEYS:
                raise ConfigError (f'{path}:{lineno}: unknown key {key}')
            try:
                values[CONFIG_KEYS[key]] = yaml.safe_load (value.strip ())
            except yaml.YAMLError as e:
                raise ConfigError (f'{path}:{lineno}: {e}') from None
    return values

def packagedConfig (command):
    """ Defaults shipped with the package as data/<command>.conf """
    resource = resources.files (__package__).joinpath ('data').joinpath (f'{command}.conf')
    if not resource.is_file ():
        return {}
    with resources.as_file (resource) as path:
        return readConfig (path)

class ExperimentConfig:
    """ Validated parameters of one command """

    __slots__ = ('command', 'seed', 'nPaths', 'nSamples', 'times', 'uniform',
            'gridDimension', 'gridSize', 'index', 'full', 'tests', 'lam',
            'ymax', 'points', 'a', 'b', 'output', 'format', 'threads')

    DEFAULTS = {
            'simulate': dict (nPaths=10, uniform=(100, 1.0), gridDimension=2,
                    format='csv'),
            # the remaining defaults ship as data/verify.conf
            'verify': dict (format='json'),
            'distfn': dict (lam=1.0, ymax=3.0, points=10, nSamples=100000,
                    format='csv'),
            'ghdiff': dict (format='json'),
            }
    FORMATS = {'simulate': {'csv', 'json'}, 'verify': {'json'},
            'distfn': {'csv', 'json'}, 'ghdiff': {'json'}}

    def __init__ (self, command, seed=42, nPaths=None, nSamples=None,
            times=None, uniform=None, gridDimension=None, gridSize=None,
            index=0, full=False, tests=None, lam=None, ymax=None, points=None,
            a=None, b=None, output='-', format=None):
        if command not in self.DEFAULTS:
            raise ConfigError (f'Unknown command {command}')
        self.command = command
        self.seed = _seed (seed)
        self.nPaths = None if nPaths is None else _count ('n-paths', nPaths)
        self.nSamples = None if nSamples is None else _count ('n-samples', nSamples)
        self.points = None if points is None else _count ('points', points)
        self.gridDimension = None if gridDimension is None else _count ('grid-dimension', gridDimension)
        self.gridSize = None if gridSize is None else _count ('grid-size', gridSize)
        try:
            self.index = int (index)
        except (TypeError, ValueError):
            raise ConfigError (f'index must be an integer, got {index!r}') from None
        self.full = bool (full)

        if times is not None and uniform is not None:
            raise ConfigError ('Give either times or uniform, not both')
        self.times = None
        self.uniform = None
        if times is not None:
            if not isinstance (times, (list, tuple)) or not times:
                raise ConfigError (f'times must be a nonempty list, got {times!r}')
            self.times = tuple (_positive ('times', t) for t in times)
        if uniform is not None:
            if not isinstance (uniform, (list, tuple)) or len (uniform) != 2:
                raise ConfigError (f'uniform takes steps and horizon, got {uniform!r}')
            self.uniform = (_count ('uniform steps', uniform[0]),
                    _positive ('uniform horizon', uniform[1]))

        self.tests = None
        if tests is not None:
            tests = [tests] if isinstance (tests, str) else list (tests)
            unknown = set (tests) - set (Battery.TESTS)
            if unknown:
                raise ConfigError (f'Unknown tests {sorted (unknown)}, available: {", ".join (Battery.TESTS)}')
            self.tests = tuple (tests)

        self.lam = None if lam is None else _positive ('lambda', lam)
        self.ymax = None if ymax is None else _positive ('ymax', ymax)
        self.a = None if a is None else parseSet (a)
        self.b = None if b is None else parseSet (b)
        if command == 'ghdiff' and (self.a is None or self.b is None):
            raise ConfigError ('ghdiff needs two sets, --a and --b')
        self.output = output
        if format not in self.FORMATS[command]:
            raise ConfigError (f'{command} writes {", ".join (sorted (self.FORMATS[command]))}, not {format}')
        self.format = format
        try:
            self.threads = threadCount ()
        except ValueError as e:
            raise ConfigError (str (e)) from None

    @classmethod
    def merge (cls, command, fileValues, flagValues):
        """ Defaults, overridden by the config file, overridden by flags """
        values = dict (cls.DEFAULTS[command])
        values.update (packagedConfig (command))
        if {'times', 'uniform'} & set (fileValues):
            values.pop ('times', None)
            values.pop ('uniform', None)
        values.update (fileValues)
        if {'times', 'uniform'} & set (flagValues):
            values.pop ('times', None)
            values.pop ('uniform', None)
        values.update (flagValues)
        return cls (command, **values)

    def __repr__ (self):
        return f'<ExperimentConfig {self.command} seed={self.seed}>'

    @property
    def timegrid (self):
        if self.uniform is not None:
            return TimeGrid.uniform (*self.uniform)
        return TimeGrid.observing (self.times)

    @property
    def grid (self):
        return DirectionGrid.make (self.gridDimension, self.gridSize)

    def toDict (self):
        """ Parameters for reports, without the output location """
        d = {}
        for k in self.__slots__:
            v = getattr (self, k)
            if k in {'output', 'threads'} or v is None:
                continue
            d[k] = v.toDict () if hasattr (v, 'toDict') else v
        return d

@contextmanager
def openOutput (path):
    if path in {None, '-'}:
        yield sys.stdout
        sys.stdout.flush ()
    else:
        with open (path, 'w', encoding='utf-8', newline='') as fd:
            yield fd

def document (config, **kwargs):
    doc = {'schema': SCHEMA, 'version': SCHEMA_VERSION,
            'command': config.command, 'params': config.toDict (),
            'software': getSoftwareInfo ()}
    doc.update (kwargs)
    return doc

def writeJson (config, doc):
    with openOutput (config.output) as fd:
        json.dump (doc, fd, cls=StrJsonEncoder, ensure_ascii=False, indent=2)
        fd.write ('\n')

def cmdSimulate (config, logger):
    grid = config.grid
    timegrid = config.timegrid
    paths = simulateBm (timegrid, grid, config.nPaths, config.seed,
            config.threads)
    logger.info ('simulated', uuid='0e6a1c3b-8f2d-4d7a-9b5e-4c1f2a3d6e8b',
            paths=len (paths), times=len (timegrid))
    unit = unitElement (grid).values

    if config.format == 'csv':
        with openOutput (config.output) as fd:
            writer = csv.writer (fd, lineterminator='\n')
            header = ['path', 'time', 'W']
            if config.full:
                header += [f'e{k}' for k in range (len (grid))]
            writer.writerow (header)
            for i in range (len (paths)):
                w = paths.w[i]
                for j, t in enumerate (timegrid.times):
                    row = [i, formatFloat (t), formatFloat (w[j])]
                    if config.full:
                        row += [formatFloat (v) for v in w[j]*unit]
                    writer.writerow (row)
    else:
        extra = {}
        if config.full:
            extra = {'grid': grid, 'embedded': np.multiply.outer (paths.w, unit)}
        writeJson (config, document (config, times=timegrid.times,
                paths=paths.w, **extra))
    return ExitStatus.Ok

def cmdVerify (config, logger):
    times = config.timegrid.times[1:]
    settings = BatterySettings (nPaths=config.nPaths, seed=config.seed,
            times=times.tolist (), gridDimension=config.gridDimension,
            gridSize=config.gridSize, index=config.index,
            threads=config.threads)
    battery = Battery (settings, logger)
    reports = battery.run (config.tests)
    failed = [r for r in reports if r.passed is False]
    skipped = [r for r in reports if r.passed is None]
    logger.info ('verified', uuid='f2d4b6a8-1c3e-4a5b-8d7f-9e0a1b2c3d4e',
            reports=len (reports), failed=len (failed), skipped=len (skipped))
    writeJson (config, document (config, settings=settings,
            reports=[r.toDict () for r in reports]))
    return ExitStatus.Fail if failed else ExitStatus.Ok

def cmdDistfn (config, logger):
    ys = np.linspace (0, config.ymax, config.points)
    rows = distributionSurface (config.lam, ys, config.nSamples, config.seed,
            config.threads)
    coverage = sum (r.covered for r in rows)/len (rows)
    logger.info ('coverage', uuid='9a7c5e3b-2f1d-4b8a-a6c4-e2d0f8b6a4c2',
            cells=len (rows), coverage=coverage, gate=COVERAGE_GATE)

    columns = ('y1', 'y2', 'mc_estimate', 'half_width', 'analytic', 'abs_err')
    table = [(r.y1, r.y2, r.estimate.value, r.estimate.halfWidth, r.analytic,
            r.absErr) for r in rows]
    if config.format == 'csv':
        with openOutput (config.output) as fd:
            writer = csv.writer (fd, lineterminator='\n')
            writer.writerow (columns)
            for row in table:
                writer.writerow ([formatFloat (v) for v in row])
    else:
        writeJson (config, document (config, coverage=coverage,
                rows=[dict (zip (columns, row)) for row in table]))
    return ExitStatus.Ok if coverage >= COVERAGE_GATE else ExitStatus.Fail

def cmdGhdiff (config, logger):
    a, b = config.a, config.b
    if a.dimension != b.dimension:
        raise ConfigError (f'Sets of dimension {a.dimension} and {b.dimension}')
    grid = DirectionGrid.make (a.dimension, config.gridSize)
    result = ghDiff (a, b, grid)
    identities = checkGhIdentities (a, b, grid)
    failed = [i for i in identities if not i.passed]
    logger.info ('gh difference', uuid='4c8e2a6f-0b3d-4f9e-8a1c-7d5b3e9f1a2c',
            case=result.case.value, failedIdentities=len (failed))
    doc = document (config, **result.toDict ())
    doc['identities'] = [i.toDict () for i in identities]
    writeJson (config, doc)
    return ExitStatus.Fail if failed else ExitStatus.Ok

def makeParser ():
    common = argparse.ArgumentParser (add_help=False,
            argument_default=argparse.SUPPRESS)
    common.add_argument ('--config', metavar='FILE',
            help='Read key=value settings, overridden by flags')
    common.add_argument ('--seed', type=seed, metavar='N',
            help='Unsigned 64 bit seed (default 42)')
    common.add_argument ('-o', '--output', metavar='FILE',
            help='Output file, - for stdout (default)')
    common.add_argument ('--format', choices=['csv', 'json'],
            help='Output format')
    common.add_argument ('-v', '--verbose', action='store_true',
            help='Log debug messages')

    def grid (p):
        p.add_argument ('--grid-dimension', dest='gridDimension', type=int,
                metavar='D', help='Dimension d of the space')
        p.add_argument ('--grid-size', dest='gridSize', type=int, metavar='M',
                help='Number of grid directions')

    def timegrid (p):
        group = p.add_mutually_exclusive_group ()
        group.add_argument ('--uniform', nargs=2, type=float,
                metavar=('N', 'T'), help='N equal steps on [0, T]')
        group.add_argument ('--times', nargs='+', type=float, metavar='T',
                help='Observation times')

    parser = argparse.ArgumentParser (
            description='Set-valued Brownian motion: simulation and verification.')
    subparsers = parser.add_subparsers (dest='command')

    simulate = subparsers.add_parser ('simulate', parents=[common],
            argument_default=argparse.SUPPRESS, help='Sample paths')
    simulate.add_argument ('--n-paths', dest='nPaths', type=int, metavar='N')
    timegrid (simulate)
    grid (simulate)
    simulate.add_argument ('--full', action='store_true',
            help='Emit the embedded vectors W·e as well')
    simulate.set_defaults (func=cmdSimulate)

    verify = subparsers.add_parser ('verify', parents=[common],
            argument_default=argparse.SUPPRESS, help='Run the test battery')
    verify.add_argument ('--n-paths', dest='nPaths', type=int, metavar='N')
    timegrid (verify)
    grid (verify)
    verify.add_argument ('--index', type=int, metavar='K',
            help='Grid index of the evaluation functional')
    verify.add_argument ('--tests', nargs='+', choices=Battery.TESTS,
            metavar='NAME', help=f'Tests to run: {", ".join (Battery.TESTS)}')
    verify.set_defaults (func=cmdVerify)

    distfn = subparsers.add_parser ('distfn', parents=[common],
            argument_default=argparse.SUPPRESS,
            help='Distribution function of the exponential pair')
    distfn.add_argument ('--lambda', dest='lam', type=float, metavar='RATE')
    distfn.add_argument ('--ymax', type=float, metavar='Y')
    distfn.add_argument ('--points', type=int, metavar='N',
            help='Grid points per axis')
    distfn.add_argument ('--n-samples', dest='nSamples', type=int, metavar='N')
    distfn.set_defaults (func=cmdDistfn)

    ghdiff = subparsers.add_parser ('ghdiff', parents=[common],
            argument_default=argparse.SUPPRESS,
            help='Generalized Hukuhara difference of two sets')
    ghdiff.add_argument ('--a', metavar='SET', help='Minuend, e.g. "[1, 5]"')
    ghdiff.add_argument ('--b', metavar='SET', help='Subtrahend')
    ghdiff.add_argument ('--grid-size', dest='gridSize', type=int, metavar='M')
    ghdiff.set_defaults (func=cmdGhdiff)

    return parser

def main (argv=None):
    parser = makeParser ()
    args = parser.parse_args (argv)
    if getattr (args, 'func', None) is None:
        parser.print_usage (sys.stderr)
        return ExitStatus.Usage

    flags = vars (args)
    command = flags.pop ('command')
    func = flags.pop ('func')
    verbose = flags.pop ('verbose', False)
    configFile = flags.pop ('config', None)

    counter = LevelCounter ()
    logger = Logger (consumer=[DatetimeConsumer (), counter,
            JsonPrintConsumer (minLevel=Level.DEBUG if verbose else Level.INFO)])
    logger = logger.bind (context='cli', command=command)

    ret = ExitStatus.Fail
    try:
        fileValues = readConfig (configFile) if configFile else {}
        config = ExperimentConfig.merge (command, fileValues, flags)
        logger.debug ('config', uuid='b7e5c3a1-9d8f-4e6b-a4c2-0f8e6d4b2a90',
                params=config.toDict ())
        ret = func (config, logger)
    except (ConfigError, InvalidGrid, InvalidTimeGrid, DimensionMismatch,
            UnsupportedRepresentationPair, IndexError) as e:
        ret = ExitStatus.Usage
        logger.error ('invalid configuration', uuid='e3c1a9f7-5b4d-4c2a-8e0f-6a4c2e0b8d61',
                reason=str (e))
        sys.stderr.write (f'{parser.prog} {command}: error: {e}\n')
    except ReconstructionUnavailable as e:
        ret = ExitStatus.Fail
        logger.error ('reconstruction unavailable', uuid='2a0c8e6b-4d2f-4b9a-9e7c-5b3d1f9a7c04',
                reason=str (e))
    except OSError as e:
        ret = ExitStatus.Io
        logger.error ('i/o error', uuid='1f9d7b5e-3a2c-4d0f-b8e6-4a2c0e8f6d13',
                reason=str (e))
    except Exception as e:
        ret = ExitStatus.Fail
        logger.error ('cli exception', uuid='6d4b2f0e-8c6a-4e1d-9f3b-1d9f7e5c3b28',
                traceback=list (TracebackException.from_exception (e).format ()))
    finally:
        logger.info ('exit', uuid='8b6f4d2a-0e8c-4a3f-b1d5-3f1b9d7f5e46',
                status=ret, warnings=counter[Level.WARNING],
                errors=counter[Level.ERROR])

    return ret
