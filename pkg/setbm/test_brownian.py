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

import math

import numpy as np
import pytest

from . import brownian
from .logger import Logger, Consumer
from .embedding import DirectionGrid, Evaluation, isSupportLike
from .brownian import TimeGrid, PathBundle, Integrand, Battery, \
        BatterySettings, simulateBm, incrementsTest, covarianceTest, \
        mgfTheoretical, mgfTest, martingaleTest, martingaleSqTest, \
        wienerCovarianceTest, bochnerTest, evaluationInvarianceCheck, \
        quadraticVariation, qvConvergenceTest, itoIntegral, \
        itoConsistencyTest, itoMartingaleTest, itoPowerTest, \
        rieszMomentTest, squareMinusItoCheck, EmptyTimeGrid, \
        InvalidTimeGrid, TooFewPaths, UnstableMoment, PartitionOutOfRange, \
        NonAdaptedIntegrand

class AssertConsumer (Consumer):
    def __call__ (self, **kwargs):
        assert 'uuid' in kwargs
        assert 'msg' in kwargs
        assert 'context' in kwargs
        return kwargs

@pytest.fixture
def logger ():
    return Logger (consumer=[AssertConsumer ()])

plane = DirectionGrid.make (2)
f = Evaluation (plane, 0)

@pytest.fixture (scope='module')
def paths ():
    """ Observations at t = 1, 2, 3 """
    return simulateBm (TimeGrid.observing ([1, 2, 3]), plane, 100000, seed=42)

@pytest.fixture (scope='module')
def finePaths ():
    return simulateBm (TimeGrid.uniform (100, 1.0), plane, 20000, seed=7)

def allPassed (reports):
    return all (r.passed for r in reports)

def test_timeGrid ():
    g = TimeGrid.uniform (10)
    assert len (g) == 11 and g.horizon == 1
    assert g.mesh == pytest.approx (0.1)
    assert TimeGrid.observing ([1, 2, 3]).times.tolist () == [0, 1, 2, 3]
    assert TimeGrid.observing ([0, 2]).times.tolist () == [0, 2]
    assert TimeGrid ([0]).mesh == 0
    assert g.toDict ()['times'][-1] == 1

    merged = TimeGrid.merge ([TimeGrid.uniform (10), TimeGrid.uniform (4)])
    assert len (merged) == 13
    assert merged.locate ([0.25, 0.5, 1]).tolist () == [3, 6, 12]
    with pytest.raises (PartitionOutOfRange):
        merged.locate ([0.55])

@pytest.mark.parametrize ('times, exc', [
        ([], EmptyTimeGrid),
        ([1, 2], InvalidTimeGrid),
        ([0, 1, 1], InvalidTimeGrid),
        ([0, 2, 1], InvalidTimeGrid),
        ([0, math.nan], InvalidTimeGrid),
        ])
def test_timeGridInvalid (times, exc):
    with pytest.raises (exc):
        TimeGrid (times)

def test_uniformInvalid ():
    with pytest.raises (InvalidTimeGrid):
        TimeGrid.uniform (0)
    with pytest.raises (InvalidTimeGrid):
        TimeGrid.uniform (10, -1)

def test_simulate ():
    timegrid = TimeGrid.uniform (100, 1.0)
    a = simulateBm (timegrid, plane, 10, seed=42)
    b = simulateBm (timegrid, plane, 10, seed=42)
    assert len (a) == 10 and a.w.shape == (10, 101)
    assert np.array_equal (a.w, b.w)
    assert np.all (a.w[:, 0] == 0)
    assert not np.array_equal (a.w, simulateBm (timegrid, plane, 10, seed=43).w)
    with pytest.raises (ValueError):
        a.w[0, 0] = 1

    # a list of times is accepted
    c = simulateBm ([0, 1], plane, 3, seed=1)
    assert c.timegrid.horizon == 1

    with pytest.raises (TooFewPaths):
        simulateBm (timegrid, plane, 0, seed=1)

def test_threadIndependence ():
    timegrid = TimeGrid.observing ([1, 2])
    one = simulateBm (timegrid, plane, 10000, seed=3, threads=1)
    four = simulateBm (timegrid, plane, 10000, seed=3, threads=4)
    assert np.array_equal (one.w, four.w)

def test_pathAccess ():
    bundle = simulateBm (TimeGrid.uniform (10), plane, 5, seed=1)
    path = bundle[2]
    assert len (path) == 11
    assert np.array_equal (path.project (f), bundle.w[2])
    element = bundle.element (2, 5)
    assert np.array_equal (element.values, np.full (len (plane), bundle.w[2, 5]))
    assert np.array_equal (path[5].values, element.values)
    assert path.values.shape == (11, len (plane))
    assert len (list (bundle)) == 5
    # B_t is a multiple of e, hence support-like exactly when W_t ≥ 0
    assert isSupportLike (element) == (bundle.w[2, 5] >= 0)

def test_evaluationInvariance (paths):
    g = Evaluation (plane, 77)
    assert np.array_equal (paths.project (f), paths.project (g))
    r = evaluationInvarianceCheck (paths)
    assert r.empirical == 0 and r.passed

def test_variance (paths):
    x = paths.project (f)[:, 1]
    assert abs (np.var (x, ddof=1) - 1) <= 4*math.sqrt (2/len (x))

def test_increments (paths):
    reports = incrementsTest (paths, f)
    # mean, variance and kurtosis for three increments, three correlations
    assert len (reports) == 12
    assert allPassed (reports), [r for r in reports if not r.passed]

def test_covariance (paths):
    c = covarianceTest (paths, f)
    assert c.theoretical.tolist () == [[1, 1, 1], [1, 2, 2], [1, 2, 3]]
    assert abs (c.empirical[0, 2] - 1) <= 4*c.stderr[0, 2]
    assert len (c.reports) == 6
    assert allPassed (c.reports)
    assert c.maxAbsError < 0.1
    assert c.toDict ()['theoretical'][2][2] == 3

def test_mgfTheoretical ():
    assert mgfTheoretical ([1], [0, 1]) == pytest.approx (math.exp (0.5))
    assert mgfTheoretical ([0.5, 0.5], [0, 1, 2]) == pytest.approx (math.exp (0.625))
    assert mgfTheoretical ([0.5, 0.5], [0, 1, 2], halved=False) \
            == pytest.approx (math.exp (1.125))
    assert mgfTheoretical ([0, 0], [0, 1, 2]) == 1

def test_mgf (paths):
    r = mgfTest (paths, f, [0, 0, 0])
    assert r.empirical == 1 and r.theoretical == 1 and r.passed

    r = mgfTest (paths, f, [0.5, 0.5])
    assert r.theoretical == pytest.approx (math.exp (0.625))
    assert r.passed

    wrong = mgfTest (paths, f, [0.5, 0.5], halved=False)
    assert wrong.mode == 'reject'
    assert wrong.passed

    with pytest.raises (InvalidTimeGrid):
        mgfTest (paths, f, [1, 1, 1, 1])

def test_mgfUnstable (paths, monkeypatch):
    monkeypatch.setattr (brownian, 'MAX_MGF_ERROR', 0.0)
    with pytest.raises (UnstableMoment):
        mgfTest (paths, f, [1])

def test_martingale (paths):
    assert allPassed (martingaleTest (paths, f, 1, 2))
    assert allPassed (martingaleSqTest (paths, f, 1, 2))
    assert allPassed (martingaleSqTest (paths, f, 0, 3))
    assert wienerCovarianceTest (paths, f, 1, 3).passed
    with pytest.raises (InvalidTimeGrid):
        martingaleTest (paths, f, 2, 1)
    with pytest.raises (InvalidTimeGrid):
        martingaleTest (paths, f, 0, 4)

def test_bochner (paths):
    reports = bochnerTest (paths, f)
    assert len (reports) == 6
    assert allPassed (reports)

def test_riesz (paths):
    reports = rieszMomentTest (paths, f, 0, 1)
    assert len (reports) == 7
    assert allPassed (reports)
    with pytest.raises (InvalidTimeGrid):
        rieszMomentTest (paths, f, 1, 1)

def test_tooFewPaths ():
    few = simulateBm (TimeGrid.observing ([1, 2]), plane, 500, seed=1)
    with pytest.raises (TooFewPaths):
        incrementsTest (few, f)
    with pytest.raises (TooFewPaths):
        martingaleTest (few, f, 0, 1)
    enough = simulateBm (TimeGrid.observing ([1, 2]), plane, 5000, seed=1)
    with pytest.raises (TooFewPaths):
        rieszMomentTest (enough, f, 0, 1)

def test_quadraticVariation ():
    constant = PathBundle (plane, TimeGrid.uniform (10), np.zeros ((1, 11)))
    assert quadraticVariation (constant[0], f, TimeGrid.uniform (5)) == 0

    path = simulateBm (TimeGrid.uniform (10000), plane, 1, seed=5)[0]
    assert abs (quadraticVariation (path, f, path.timegrid) - 1) < 5*math.sqrt (2/10000)
    coarse = quadraticVariation (path, f, TimeGrid.uniform (100))
    assert coarse >= 0
    with pytest.raises (PartitionOutOfRange):
        quadraticVariation (path, f, TimeGrid.uniform (10, 2.0))
    with pytest.raises (PartitionOutOfRange):
        quadraticVariation (path, f, TimeGrid ([0, 1/3, 1]))

def test_qvConvergence ():
    partitions = [TimeGrid.uniform (n) for n in (10, 100, 1000)]
    reports = qvConvergenceTest (partitions, 20000, f, seed=1)
    assert [r.name for r in reports] == ['qv mean', 'qv l2 error',
            'qv mean', 'qv l2 error', 'qv l2 decrease',
            'qv mean', 'qv l2 error', 'qv l2 decrease']
    errors = [r for r in reports if r.name == 'qv l2 error']
    assert errors[1].theoretical == pytest.approx (math.sqrt (2/100))
    for r in errors:
        assert r.params['relativeError'] <= 0.1
    empirical = [r.empirical for r in errors]
    assert empirical == sorted (empirical, reverse=True)
    assert allPassed (reports)

    with pytest.raises (EmptyTimeGrid):
        qvConvergenceTest ([], 20000)
    with pytest.raises (TooFewPaths):
        qvConvergenceTest (partitions, 10)

def test_itoIntegral (finePaths):
    path = finePaths[0]
    x = path.project (f)
    assert itoIntegral (path, np.zeros (len (x)), f) == 0
    assert itoIntegral (path, np.ones (len (x)), f) == pytest.approx (x[-1], abs=1e-12)
    # Σ 2W dW = W_T² − Σ (ΔW)²
    twice = itoIntegral (path, Integrand.of (lambda v: 2*v, x), f)
    assert twice == pytest.approx (x[-1]**2 - np.sum (np.diff (x)**2), abs=1e-9)

    with pytest.raises (NonAdaptedIntegrand):
        itoIntegral (path, Integrand.of (lambda v: v, x, lead=1), f)
    with pytest.raises (InvalidTimeGrid):
        itoIntegral (path, np.ones (3), f)

def test_itoConsistency ():
    reports = itoConsistencyTest ((0.1, 0.01, 0.001), 10000, f, seed=0)
    assert [r.params['steps'] for r in reports] == [10, 100, 1000]
    for r in reports:
        assert r.mode == 'bound' and r.passed
        assert r.theoretical == pytest.approx (1.25*math.sqrt (2*r.params['mesh']))
        assert r.params['constant'] == pytest.approx (2, rel=0.1)

def test_itoMartingale (finePaths):
    assert allPassed (itoMartingaleTest (finePaths, f, 50, 100))

def test_itoPower (finePaths):
    reports = itoPowerTest (finePaths, f)
    assert [r.params['power'] for r in reports] == [2, 3, 4]
    # k = 2: W_T² − 2Σ W dW − T = Σ (ΔW)² − T has mean 0
    assert reports[0].theoretical == pytest.approx (0, abs=1e-12)
    assert allPassed (reports)
    with pytest.raises (ValueError):
        itoPowerTest (finePaths, f, powers=(0, ))

def test_squareMinusIto (finePaths):
    r = squareMinusItoCheck (finePaths, f)
    assert r.empirical == 0 and r.passed
    assert r.params['minCoefficient'] > 0

def test_batteryFewPaths (logger):
    battery = Battery (BatterySettings (nPaths=10), logger)
    reports = battery.run ()
    skipped = [r for r in reports if r.skipped]
    assert skipped
    assert all (r.passed is None for r in skipped)
    assert all (r.passed is not False for r in reports)
    assert {r.name for r in skipped} >= {'increments', 'covariance', 'riesz', 'qv'}

def test_batterySelection (logger):
    battery = Battery (BatterySettings (nPaths=2000, seed=1), logger)
    reports = battery.run (['invariance', 'mgf'])
    assert [r.name for r in reports] == ['evaluation invariance', 'mgf', 'mgf without ½']
    with pytest.raises (ValueError):
        battery.run (['nonsense'])
    assert 'threads' not in battery.settings.toDict ()

def test_batteryMgfVariants (logger, monkeypatch):
    """ An unstable variant is skipped alone, the other report survives """
    mgf = brownian.mgfTest
    def unstable (paths, f, u, halved=True):
        if not halved:
            raise UnstableMoment ('Standard error too large')
        return mgf (paths, f, u, halved=halved)
    monkeypatch.setattr (brownian, 'mgfTest', unstable)

    battery = Battery (BatterySettings (nPaths=2000, seed=1), logger)
    halved, plain = battery.run (['mgf'])
    assert halved.name == 'mgf' and halved.passed
    assert halved.theoretical == pytest.approx (math.exp (0.625))
    assert plain.name == 'mgf without ½' and plain.passed is None
    assert plain.params['halved'] is False

def test_battery (logger):
    """ The complete battery passes at a realistic sample size """
    settings = BatterySettings (nPaths=20000, seed=42)
    reports = Battery (settings, logger).run ()
    assert not [r for r in reports if r.skipped]
    failed = [r for r in reports if not r.passed]
    assert not failed, failed
