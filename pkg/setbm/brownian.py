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
Set-valued Brownian motion B_t = W_t·e on the embedded space.

W is a standard scalar Brownian motion and e = j(B_X) the unit of the
f-algebra, so every path is stored as the scalar W(t_i) plus the shared unit
vector. Evaluating at grid index k yields W_t·e[k] = W_t.

The verification tests compare Monte Carlo statistics with their exact
values. Conditional expectations E(·|F_s) are tested by orthogonality against
a battery of F_s-measurable functions of f(B_s). Weak continuity of paths is
a modelling assumption that cannot be observed on a discrete grid; the fourth
moment of increments, 3Δt², is checked in its place.
"""

import math

import numpy as np

from .embedding import DirectionGrid, EmbeddedElement, Evaluation, \
        GridMismatch, isSupportLike, product, unitElement
from .stats import GATE, MomentReport, Moments, chunkSizes, meanReport, \
        mergeMoments, parallelMap, seedSequence, spawnStreams

# fewest paths a statistical test accepts
MIN_PATHS = 1000
MIN_RIESZ_PATHS = 10000
# a value known to be wrong must miss by this many standard errors
REJECT_GATE = 6.0
# empirical standard error of an exponential moment, relative to its value
MAX_MGF_ERROR = 0.25

class EmptyTimeGrid (ValueError):
    pass

class InvalidTimeGrid (ValueError):
    pass

class TooFewPaths (ValueError):
    pass

class UnstableMoment (ArithmeticError):
    pass

class PartitionOutOfRange (ValueError):
    pass

class NonAdaptedIntegrand (ValueError):
    pass

# bounded F_s-measurable test functions of f(B_s) (x itself is not bounded,
# but has all moments)
TEST_FUNCTIONS = (
        ('1', np.ones_like),
        ('x', lambda x: x),
        ('sign', np.sign),
        ('min(x²,10)', lambda x: np.minimum (x*x, 10.0)),
        )

class TimeGrid:
    """ Observation times 0 = t_0 < t_1 < … < t_m """

    __slots__ = ('times', )

    def __init__ (self, times):
        times = np.array (times, dtype=np.float64).ravel ()
        if len (times) == 0:
            raise EmptyTimeGrid ('A time grid needs at least t_0 = 0')
        if not np.all (np.isfinite (times)):
            raise InvalidTimeGrid ('Times must be finite')
        if times[0] != 0:
            raise InvalidTimeGrid (f'Time grids start at 0, not {times[0]}')
        if np.any (np.diff (times) <= 0):
            raise InvalidTimeGrid ('Times must be strictly increasing')
        times.setflags (write=False)
        self.times = times

    @classmethod
    def uniform (cls, n, horizon=1.0):
        """ n equal steps on [0, horizon] """
        if n < 1 or not horizon > 0:
            raise InvalidTimeGrid (f'Need n ≥ 1 steps and a positive horizon, got {n}, {horizon}')
        return cls (np.linspace (0, horizon, n + 1))

    @classmethod
    def observing (cls, points):
        """ Grid of the given observation times, t_0 = 0 prepended """
        points = [float (x) for x in points]
        if not points or points[0] != 0:
            points = [0.0] + points
        return cls (points)

    @classmethod
    def merge (cls, grids):
        """ Common refinement, times closer than rounding noise collapsed """
        times = np.sort (np.concatenate ([g.times for g in grids]))
        keep = np.concatenate ([[True],
                np.diff (times) > 1e-12*(1 + times[-1])])
        return cls (times[keep])

    def __repr__ (self):
        return f'<TimeGrid {len (self)} points horizon={self.horizon}>'

    def __len__ (self):
        return len (self.times)

    def __getitem__ (self, i):
        return float (self.times[i])

    @property
    def horizon (self):
        return float (self.times[-1])

    @property
    def increments (self):
        return np.diff (self.times)

    @property
    def mesh (self):
        return float (np.max (self.increments)) if len (self) > 1 else 0.0

    def locate (self, times):
        """ Indices of times, which must be grid points up to rounding """
        t = self.times
        query = np.atleast_1d (np.asarray (times, dtype=np.float64))
        right = np.clip (np.searchsorted (t, query), 0, len (t) - 1)
        left = np.clip (right - 1, 0, len (t) - 1)
        idx = np.where (np.abs (t[left] - query) <= np.abs (t[right] - query),
                left, right)
        if np.any (np.abs (t[idx] - query) > 1e-12*(1 + self.horizon)):
            raise PartitionOutOfRange (f'{query} is not part of {self!r}')
        return idx

    def toDict (self):
        return {'times': self.times.tolist ()}

class ProcessPath:
    """ One path, B(t_i) = W(t_i)·e """

    __slots__ = ('grid', 'timegrid', 'w', 'unit')

    def __init__ (self, grid, timegrid, w, unit):
        self.grid = grid
        self.timegrid = timegrid
        self.w = w
        self.unit = unit

    def __repr__ (self):
        return f'<ProcessPath {self.timegrid!r} W_T={self.w[-1]}>'

    def __len__ (self):
        return len (self.w)

    def __getitem__ (self, i):
        return EmbeddedElement (self.grid, self.w[i]*self.unit)

    @property
    def values (self):
        """ One embedded element per row """
        return np.outer (self.w, self.unit)

    def project (self, f):
        """ f(B_t) = W_t·f(e) """
        if not f.grid.sameAs (self.grid):
            raise GridMismatch ('Evaluation and path use different grids')
        return self.w*self.unit[f.index]

class PathBundle:
    """ Sequence of paths on a common time grid, W stored as one matrix """

    __slots__ = ('grid', 'timegrid', 'w', 'unit')

    def __init__ (self, grid, timegrid, w):
        w.setflags (write=False)
        self.grid = grid
        self.timegrid = timegrid
        self.w = w
        self.unit = unitElement (grid).values

    def __repr__ (self):
        return f'<PathBundle {len (self)} paths {self.timegrid!r} {self.grid!r}>'

    def __len__ (self):
        return len (self.w)

    def __getitem__ (self, i):
        return ProcessPath (self.grid, self.timegrid, self.w[i], self.unit)

    def __iter__ (self):
        for i in range (len (self)):
            yield self[i]

    def element (self, i, j):
        """ B_{t_j} of path i """
        return EmbeddedElement (self.grid, self.w[i, j]*self.unit)

    def project (self, f):
        """ f(B_t) for all paths, shape (paths, times) """
        if not f.grid.sameAs (self.grid):
            raise GridMismatch ('Evaluation and paths use different grids')
        return self.w*self.unit[f.index]

def _simulateW (rng, timegrid, n):
    dt = timegrid.increments
    w = np.zeros ((n, len (timegrid)))
    if len (dt):
        np.cumsum (rng.standard_normal ((n, len (dt)))*np.sqrt (dt), axis=1,
                out=w[:, 1:])
    return w

def _stream (timegrid, nPaths, seed, reduce, threads=None):
    """ Simulate W chunk by chunk, apply reduce to every chunk """
    sizes = chunkSizes (nPaths)
    def run (job):
        rng, size = job
        return reduce (_simulateW (rng, timegrid, size))
    return parallelMap (run, zip (spawnStreams (seed, len (sizes)), sizes),
            threads)

def simulateBm (timegrid, grid, nPaths, seed, threads=None):
    """
    nPaths paths of B_t = W_t·e with W(t_{i+1}) = W(t_i) + sqrt (Δt_i)·Z_i.
    The output depends on seed and nPaths only.
    """
    if not isinstance (timegrid, TimeGrid):
        timegrid = TimeGrid (timegrid)
    if nPaths < 1:
        raise TooFewPaths ('At least one path is required')
    blocks = _stream (timegrid, nPaths, seed, lambda w: w, threads)
    return PathBundle (grid, timegrid, np.vstack (blocks))

def _requirePaths (n, minimum=MIN_PATHS):
    if n < minimum:
        raise TooFewPaths (f'{n} paths, at least {minimum} required')

def _pair (timegrid, s, t, strict=False):
    if not 0 <= s <= t < len (timegrid) or (strict and s == t):
        raise InvalidTimeGrid (f'Invalid index pair s={s}, t={t} for {timegrid!r}')
    return timegrid[t] - timegrid[s]

def _params (timegrid, **kwargs):
    kwargs.update ({k: timegrid[v] for k, v in kwargs.items ()
            if k in {'s', 't'}})
    return kwargs

def incrementsTest (paths, f):
    """
    Consecutive increments of f(B) are independent N(0, Δt): mean, variance,
    excess kurtosis and pairwise correlation of every increment
    """
    _requirePaths (len (paths))
    x = paths.project (f)
    inc = np.diff (x, axis=1)
    dt = paths.timegrid.increments
    n = len (paths)
    reports = []
    for i in range (inc.shape[1]):
        m = Moments.of (inc[:, i])
        params = {'from': paths.timegrid[i], 'to': paths.timegrid[i + 1]}
        reports.append (MomentReport ('increment mean', m.mean, 0.0, m.stderr, params))
        reports.append (MomentReport ('increment variance', m.variance, dt[i],
                m.varianceStderr, params))
        reports.append (MomentReport ('increment excess kurtosis',
                m.excessKurtosis, 0.0, math.sqrt (24/n), params))
    for i in range (inc.shape[1]):
        for j in range (i + 1, inc.shape[1]):
            r = np.corrcoef (inc[:, i], inc[:, j])[0, 1]
            reports.append (MomentReport ('increment correlation', r, 0.0,
                    1/math.sqrt (n), {'i': i, 'j': j}))
    return reports

class CovarianceReport:
    """ Empirical covariance of (f(B_{t_1}), …, f(B_{t_m})) against min (t_i, t_j) """

    __slots__ = ('times', 'empirical', 'theoretical', 'stderr')

    def __init__ (self, times, empirical, theoretical, stderr):
        self.times = times
        self.empirical = empirical
        self.theoretical = theoretical
        self.stderr = stderr

    def __repr__ (self):
        return f'<CovarianceReport times={self.times.tolist ()} maxAbsError={self.maxAbsError}>'

    @property
    def z (self):
        with np.errstate (divide='ignore', invalid='ignore'):
            return (self.empirical - self.theoretical)/self.stderr

    @property
    def maxAbsError (self):
        return float (np.max (np.abs (self.empirical - self.theoretical)))

    @property
    def reports (self):
        out = []
        for i in range (len (self.times)):
            for j in range (i, len (self.times)):
                out.append (MomentReport ('covariance', self.empirical[i, j],
                        self.theoretical[i, j], self.stderr[i, j],
                        {'s': float (self.times[i]), 't': float (self.times[j])}))
        return out

    def toDict (self):
        return {'times': self.times.tolist (),
                'empirical': self.empirical.tolist (),
                'theoretical': self.theoretical.tolist (),
                'stderr': self.stderr.tolist (),
                'maxAbsError': self.maxAbsError}

def covarianceTest (paths, f):
    """ The vector of observations is centred normal with covariance V_ij = min (t_i, t_j) """
    _requirePaths (len (paths))
    times = paths.timegrid.times[1:]
    if len (times) == 0:
        raise EmptyTimeGrid ('No observation time after t_0')
    x = paths.project (f)[:, 1:]
    n = len (x)
    centered = x - x.mean (axis=0)
    empirical = centered.T @ centered/(n - 1)
    stderr = np.empty_like (empirical)
    for i in range (x.shape[1]):
        stderr[i] = (centered[:, i:i + 1]*centered).std (axis=0, ddof=1)
    stderr /= math.sqrt (n)
    return CovarianceReport (times, empirical, np.minimum.outer (times, times),
            stderr)

def mgfTheoretical (u, times, halved=True):
    """
    E exp (Σ u_i W(t_i)) = ∏_i exp {½ (Σ_{j≥i} u_j)² (t_i − t_{i−1})}

    halved=False drops the ½ from the first factor, a variant that is
    inconsistent with the normal law and must be rejected by the data.
    """
    times = np.asarray (times, dtype=np.float64)
    dt = np.diff (times)
    u = np.zeros (len (dt)) if u is None else np.asarray (u, dtype=np.float64)
    u = np.pad (u, (0, len (dt) - len (u)))
    tails = np.cumsum (u[::-1])[::-1]
    exponent = 0.5*tails**2*dt
    if not halved and len (exponent):
        exponent[0] = tails[0]**2*dt[0]
    return math.exp (math.fsum (exponent))

def mgfTest (paths, f, u, halved=True):
    """ Empirical joint moment-generating function at weights u (padded with zeros) """
    _requirePaths (len (paths))
    times = paths.timegrid.times
    u = np.atleast_1d (np.asarray (u, dtype=np.float64))
    if len (u) > len (times) - 1:
        raise InvalidTimeGrid (f'{len (u)} weights for {len (times) - 1} observation times')
    u = np.pad (u, (0, len (times) - 1 - len (u)))
    values = np.exp (paths.project (f)[:, 1:] @ u)
    theoretical = mgfTheoretical (u, times, halved)
    report = meanReport ('mgf' if halved else 'mgf without ½', values,
            theoretical, {'u': u.tolist (), 'halved': halved},
            mode='accept' if halved else 'reject',
            gate=GATE if halved else REJECT_GATE)
    if report.stderr > MAX_MGF_ERROR*theoretical:
        raise UnstableMoment (f'Standard error {report.stderr} too large for {theoretical}')
    return report

def martingaleTest (paths, f, s, t, testFns=TEST_FUNCTIONS):
    """ E(B_t|F_s) = B_s: E[(f(B_t) − f(B_s))·g(f(B_s))] = 0 """
    _requirePaths (len (paths))
    _pair (paths.timegrid, s, t)
    x = paths.project (f)
    d = x[:, t] - x[:, s]
    return [meanReport ('martingale', d*g (x[:, s]), 0.0,
            _params (paths.timegrid, s=s, t=t, g=name))
            for name, g in testFns]

def martingaleSqTest (paths, f, s, t, testFns=TEST_FUNCTIONS):
    """ E(B_t²|F_s) = B_s² + (t − s)e, by orthogonality against the battery """
    _requirePaths (len (paths))
    dt = _pair (paths.timegrid, s, t)
    x = paths.project (f)
    xs = x[:, s]
    d = x[:, t]**2 - xs**2 - dt
    return [meanReport ('martingale square', d*g (xs), 0.0,
            _params (paths.timegrid, s=s, t=t, g=name))
            for name, g in testFns]

def wienerCovarianceTest (paths, f, s, t):
    """ E[2 f(B_t) f(B_s)] = 2s for s ≤ t """
    _requirePaths (len (paths))
    _pair (paths.timegrid, s, t)
    x = paths.project (f)
    return meanReport ('wiener covariance', 2*x[:, t]*x[:, s],
            2*paths.timegrid[s], _params (paths.timegrid, s=s, t=t))

def bochnerTest (paths, f):
    """
    Integrability of B_t and of its f-algebra square: E‖B_t‖_∞ = sqrt (2t/π)
    and E f(B_t²) = t at every observation time
    """
    _requirePaths (len (paths))
    x = paths.project (f)
    sup = np.max (np.abs (paths.unit))
    reports = []
    for j in range (1, len (paths.timegrid)):
        t = paths.timegrid[j]
        reports.append (meanReport ('bochner sup norm',
                np.abs (paths.w[:, j])*sup, math.sqrt (2*t/math.pi), {'t': t}))
        reports.append (meanReport ('bochner square', x[:, j]**2, t, {'t': t}))
    return reports

def evaluationInvarianceCheck (paths):
    """ All evaluations of the canonical motion see the same scalar path """
    base = paths.project (Evaluation (paths.grid, 0))
    worst = 0.0
    for k in range (1, len (paths.grid)):
        diff = paths.project (Evaluation (paths.grid, k)) - base
        worst = max (worst, float (np.max (np.abs (diff))))
    return MomentReport ('evaluation invariance', worst, 0.0, mode='bound',
            params={'indices': len (paths.grid)})

def quadraticVariation (path, f, partition):
    """ Σ_j (f(M_{t_{j+1}}) − f(M_{t_j}))² over the partition """
    if partition.horizon > path.timegrid.horizon:
        raise PartitionOutOfRange (f'{partition!r} extends beyond {path.timegrid!r}')
    idx = path.timegrid.locate (partition.times)
    x = path.project (f)[idx]
    return math.fsum (np.diff (x)**2)

def qvConvergenceTest (partitions, nPaths, f=None, seed=0, threads=None):
    """
    L² distance between the quadratic variation sum and the horizon T for
    refining partitions, sqrt (E[(QV − T)²]) = sqrt (2 Σ Δt_j²). Paths are
    simulated on the common refinement and streamed.
    """
    partitions = list (partitions)
    if not partitions:
        raise EmptyTimeGrid ('No partition given')
    _requirePaths (nPaths)
    finest = TimeGrid.merge (partitions)
    index = [finest.locate (p.times) for p in partitions]
    scale = 1.0 if f is None else f (unitElement (f.grid))

    def reduce (w):
        x = w*scale
        out = []
        for p, idx in zip (partitions, index):
            qv = np.sum (np.diff (x[:, idx], axis=1)**2, axis=1)
            err = qv - p.horizon
            out.append ((Moments.of (qv), Moments.of (err*err)))
        return out

    parts = _stream (finest, nPaths, seed, reduce, threads)
    reports = []
    previous = None
    for k, p in enumerate (partitions):
        qv = mergeMoments (part[k][0] for part in parts)
        sq = mergeMoments (part[k][1] for part in parts)
        l2 = math.sqrt (sq.mean)
        theory = math.sqrt (2*math.fsum (p.increments**2))
        params = {'steps': len (p) - 1, 'horizon': p.horizon, 'mesh': p.mesh,
                'relativeError': abs (l2 - theory)/theory}
        reports.append (MomentReport ('qv mean', qv.mean, p.horizon,
                qv.stderr, params))
        reports.append (MomentReport ('qv l2 error', l2, theory,
                sq.stderr/(2*l2) if l2 > 0 else math.inf, params))
        if previous is not None and p.mesh < previous[1]:
            reports.append (MomentReport ('qv l2 decrease', l2, previous[0],
                    params=params, mode='bound'))
        previous = (l2, p.mesh)
    return reports

class Integrand:
    """
    Values g(t_j) of an integrand on the time grid of a path. lookahead is
    the number of future grid points the value at t_j depends on; the Itô
    sum needs 0.
    """

    __slots__ = ('values', 'lookahead')

    def __init__ (self, values, lookahead=0):
        self.values = np.asarray (values, dtype=np.float64)
        self.lookahead = lookahead

    @classmethod
    def of (cls, func, x, lead=0):
        """ g(t_j) = func (x[j + lead]), the last value repeated at the end """
        x = np.asarray (x, dtype=np.float64)
        idx = np.minimum (np.arange (x.shape[-1]) + lead, x.shape[-1] - 1)
        return cls (func (x[..., idx]), lookahead=lead)

    def __repr__ (self):
        return f'<Integrand {self.values.shape} lookahead={self.lookahead}>'

def itoSums (x, g):
    """ Left-point sums Σ g_j (x_{j+1} − x_j) for every row """
    return np.sum (g[..., :-1]*np.diff (x, axis=-1), axis=-1)

def itoIntegral (path, integrand, f):
    """ f(I_T) = Σ_j g(t_j)(f(B_{t_{j+1}}) − f(B_{t_j})) """
    if not isinstance (integrand, Integrand):
        integrand = Integrand (integrand)
    if integrand.lookahead > 0:
        raise NonAdaptedIntegrand (f'Integrand looks {integrand.lookahead} steps ahead')
    x = path.project (f)
    g = integrand.values
    if g.shape != x.shape:
        raise InvalidTimeGrid (f'Integrand of shape {g.shape} on path of shape {x.shape}')
    return math.fsum (g[:-1]*np.diff (x))

def itoConsistencyTest (meshes, nPaths, f=None, horizon=1.0, seed=0,
        threads=None):
    """
    Σ 2W dW converges to W_T² − T in L²; the error on a uniform grid of mesh
    δ is sqrt (2Tδ) and must stay below 1.25 times that. The ratio
    E[err²]/δ is reported as params['constant'].
    """
    _requirePaths (nPaths)
    scale = 1.0 if f is None else f (unitElement (f.grid))
    seeds = seedSequence (seed).spawn (len (meshes))
    reports = []
    for mesh, s in zip (meshes, seeds):
        timegrid = TimeGrid.uniform (max (1, round (horizon/mesh)), horizon)

        def reduce (w):
            x = w*scale
            err = itoSums (x, 2*x) - (x[:, -1]**2 - horizon)
            return Moments.of (err*err)

        sq = mergeMoments (_stream (timegrid, nPaths, s, reduce, threads))
        delta = timegrid.mesh
        reports.append (MomentReport ('ito consistency', math.sqrt (sq.mean),
                1.25*math.sqrt (2*horizon*delta),
                params={'mesh': delta, 'steps': len (timegrid) - 1,
                    'constant': sq.mean/delta},
                mode='bound'))
    return reports

def itoMartingaleTest (paths, f, s, t, testFns=TEST_FUNCTIONS):
    """ I_T = ∫ f(B) d f(B) is a martingale: E[(I_t − I_s)·g(f(B_s))] = 0 """
    _requirePaths (len (paths))
    _pair (paths.timegrid, s, t)
    x = paths.project (f)
    running = np.zeros_like (x)
    np.cumsum (x[:, :-1]*np.diff (x, axis=1), axis=1, out=running[:, 1:])
    d = running[:, t] - running[:, s]
    return [meanReport ('ito martingale', d*g (x[:, s]), 0.0,
            _params (paths.timegrid, s=s, t=t, g=name))
            for name, g in testFns]

def _gaussianMoment (p, t):
    """ E W_t^p """
    if p % 2:
        return 0.0
    return math.prod (range (p - 1, 0, -2))*t**(p//2)

def itoPowerTest (paths, f, powers=(2, 3, 4)):
    """
    Itô formula for powers, B_T^k = k∫B^{k−1}dB + k(k−1)/2 ∫B^{k−2}dt.

    The residual of the discretized identity has mean
    E W_T^k − k(k−1)/2 Σ_j E W_{t_j}^{k−2} Δt_j exactly, which tends to 0 with
    the mesh (params['limit']).
    """
    _requirePaths (len (paths))
    x = paths.project (f)
    dx = np.diff (x, axis=1)
    dt = paths.timegrid.increments
    left = paths.timegrid.times[:-1]
    horizon = paths.timegrid.horizon
    reports = []
    for k in powers:
        if k < 1:
            raise ValueError (f'Powers start at 1, got {k}')
        base = x[:, :-1]
        ito = k*np.sum (base**(k - 1)*dx, axis=1)
        drift = k*(k - 1)/2*np.sum (base**(k - 2)*dt, axis=1) if k >= 2 else 0.0
        residual = x[:, -1]**k - ito - drift
        theoretical = _gaussianMoment (k, horizon) - k*(k - 1)/2*math.fsum (
                _gaussianMoment (k - 2, ti)*h for ti, h in zip (left, dt))
        reports.append (meanReport ('ito power', residual, theoretical,
                {'power': k, 'horizon': horizon, 'limit': 0.0}))
    return reports

def rieszMomentTest (paths, f, s, t, testFns=TEST_FUNCTIONS):
    """
    Moment conditions on an increment: E Δ = 0, E Δ² = t − s,
    E Δ⁴ = 3(t − s)² and Δ orthogonal to functions of f(B_s)
    """
    _requirePaths (len (paths), MIN_RIESZ_PATHS)
    dt = _pair (paths.timegrid, s, t, strict=True)
    x = paths.project (f)
    d = x[:, t] - x[:, s]
    params = _params (paths.timegrid, s=s, t=t)
    reports = [
            meanReport ('riesz first moment', d, 0.0, params),
            meanReport ('riesz second moment', d**2, dt, params),
            meanReport ('riesz fourth moment', d**4, 3*dt**2, params),
            ]
    for name, g in testFns:
        reports.append (meanReport ('riesz orthogonality', d*g (x[:, s]), 0.0,
                dict (params, g=name)))
    return reports

def squareMinusItoCheck (paths, f, checked=16):
    """
    B_T² − ∫2B dB is the support function of a ball: its coefficient on e is
    the quadratic variation, which is nonnegative. The embedded element is
    run through the subadditivity test for the first checked paths.
    """
    x = paths.project (f)
    coefficient = x[:, -1]**2 - itoSums (x, 2*x)
    failures = int (np.count_nonzero (coefficient < 0))
    unit = unitElement (paths.grid)
    for i in range (min (checked, len (paths))):
        bt = paths.element (i, -1)
        integral = itoIntegral (paths[i], Integrand.of (lambda v: 2*v, x[i]), f)
        if not isSupportLike (product (bt, bt) - unit*integral):
            failures += 1
    return MomentReport ('square minus ito support-like', failures, 0.0,
            mode='bound', params={'paths': len (paths), 'checked': checked,
                'minCoefficient': float (np.min (coefficient))})

class BatterySettings:
    """ Parameters of the verification battery """

    __slots__ = ('nPaths', 'seed', 'times', 'gridDimension', 'gridSize',
            'index', 'u', 'pair', 'rieszPair', 'qvSteps', 'itoMeshes',
            'itoSteps', 'powers', 'threads')

    def __init__ (self, nPaths=100000, seed=42, times=(1, 2, 3),
            gridDimension=2, gridSize=None, index=0, u=(0.5, 0.5),
            pair=(1, 2), rieszPair=(0, 1), qvSteps=(10, 100, 1000),
            itoMeshes=(0.1, 0.01, 0.001), itoSteps=100, powers=(2, 3, 4),
            threads=None):
        self.nPaths = nPaths
        self.seed = seed
        self.times = tuple (times)
        self.gridDimension = gridDimension
        self.gridSize = gridSize
        self.index = index
        self.u = tuple (u)
        self.pair = tuple (pair)
        self.rieszPair = tuple (rieszPair)
        self.qvSteps = tuple (qvSteps)
        self.itoMeshes = tuple (itoMeshes)
        self.itoSteps = itoSteps
        self.powers = tuple (powers)
        self.threads = threads

    def __repr__ (self):
        return f'<BatterySettings nPaths={self.nPaths} seed={self.seed} times={self.times}>'

    def toDict (self):
        return {k: getattr (self, k) for k in self.__slots__ if k != 'threads'}

class Battery:
    """
    Runs the verification tests on shared simulations. Precondition failures
    become skipped entries, so a run always yields a complete report.
    """

    TESTS = ('increments', 'covariance', 'mgf', 'martingale', 'martingaleSq',
            'wiener', 'bochner', 'invariance', 'riesz', 'qv', 'ito',
            'itoMartingale', 'itoPower', 'squareMinusIto')

    __slots__ = ('settings', 'logger', 'grid', 'evaluation', '_paths',
            '_finePaths')

    def __init__ (self, settings, logger):
        self.settings = settings
        self.logger = logger.bind (context=type (self).__name__)
        self.grid = DirectionGrid.make (settings.gridDimension, settings.gridSize)
        self.evaluation = Evaluation (self.grid, settings.index)
        self._paths = None
        self._finePaths = None

    def __repr__ (self):
        return f'<Battery {self.settings!r}>'

    def _seed (self, k):
        """ Independent, reproducible seed per simulation """
        return np.random.SeedSequence (self.settings.seed, spawn_key=(k, ))

    @property
    def paths (self):
        if self._paths is None:
            timegrid = TimeGrid.observing (self.settings.times)
            self._paths = simulateBm (timegrid, self.grid, self.settings.nPaths,
                    self._seed (0), self.settings.threads)
            self.logger.debug ('simulated', uuid='3b0f7c5e-2d54-4c1e-9a7e-6f1b2f8d0a41',
                    paths=len (self._paths), timegrid=timegrid)
        return self._paths

    @property
    def finePaths (self):
        if self._finePaths is None:
            timegrid = TimeGrid.uniform (self.settings.itoSteps, 1.0)
            self._finePaths = simulateBm (timegrid, self.grid,
                    self.settings.nPaths, self._seed (1), self.settings.threads)
            self.logger.debug ('simulated', uuid='3b0f7c5e-2d54-4c1e-9a7e-6f1b2f8d0a41',
                    paths=len (self._finePaths), timegrid=timegrid)
        return self._finePaths

    def _index (self, t):
        return int (self.paths.timegrid.locate ([t])[0])

    def _increments (self):
        return incrementsTest (self.paths, self.evaluation)

    def _covariance (self):
        return covarianceTest (self.paths, self.evaluation).reports

    def _mgf (self):
        reports = []
        for halved, name in ((True, 'mgf'), (False, 'mgf without ½')):
            try:
                reports.append (mgfTest (self.paths, self.evaluation,
                        self.settings.u, halved=halved))
            except UnstableMoment as e:
                self.logger.warning ('statistic skipped', uuid='e6a1c3f5-8b2d-4d7e-9f0a-2c4e6b8d0f13',
                        test='mgf', halved=halved, reason=str (e))
                reports.append (MomentReport.skip (name, str (e),
                        {'u': list (self.settings.u), 'halved': halved}))
        return reports

    def _martingale (self):
        s, t = map (self._index, self.settings.pair)
        return martingaleTest (self.paths, self.evaluation, s, t)

    def _martingaleSq (self):
        s, t = map (self._index, self.settings.pair)
        return martingaleSqTest (self.paths, self.evaluation, s, t)

    def _wiener (self):
        s, t = map (self._index, self.settings.pair)
        return [wienerCovarianceTest (self.paths, self.evaluation, s, t)]

    def _bochner (self):
        return bochnerTest (self.paths, self.evaluation)

    def _invariance (self):
        return [evaluationInvarianceCheck (self.paths)]

    def _riesz (self):
        s, t = map (self._index, self.settings.rieszPair)
        return rieszMomentTest (self.paths, self.evaluation, s, t)

    def _qv (self):
        partitions = [TimeGrid.uniform (n, 1.0) for n in self.settings.qvSteps]
        return qvConvergenceTest (partitions, self.settings.nPaths,
                self.evaluation, self._seed (2), self.settings.threads)

    def _ito (self):
        return itoConsistencyTest (self.settings.itoMeshes,
                self.settings.nPaths, self.evaluation, seed=self._seed (3),
                threads=self.settings.threads)

    def _itoMartingale (self):
        n = self.settings.itoSteps
        return itoMartingaleTest (self.finePaths, self.evaluation, n//2, n)

    def _itoPower (self):
        return itoPowerTest (self.finePaths, self.evaluation, self.settings.powers)

    def _squareMinusIto (self):
        return [squareMinusItoCheck (self.finePaths, self.evaluation)]

    def run (self, tests=None):
        """ Run the selected tests (default: all), return their reports """
        tests = tests or self.TESTS
        unknown = set (tests) - set (self.TESTS)
        if unknown:
            raise ValueError (f'Unknown tests {sorted (unknown)}')

        reports = []
        for name in tests:
            logger = self.logger.bind (test=name)
            logger.debug ('test start', uuid='a8f3c2d1-6b7e-4f5a-9c0d-1e2f3a4b5c6d')
            try:
                result = getattr (self, '_' + name) ()
            except (TooFewPaths, UnstableMoment, InvalidTimeGrid,
                    PartitionOutOfRange) as e:
                logger.warning ('test skipped', uuid='5e1d9b7a-0c3f-4a2e-8d6b-7f4c1a9e2b30',
                        reason=str (e))
                result = [MomentReport.skip (name, str (e))]
            failed = [r for r in result if r.passed is False]
            logger.info ('test finished', uuid='c4b2a0e8-9f7d-4e6c-b5a3-2d1f0e9c8b7a',
                    reports=len (result), failed=len (failed))
            for r in failed:
                logger.error ('statistic failed', uuid='7d9e1f3a-5b2c-4e8d-a6f0-3c1b9d7e5a2f',
                        report=r)
            reports.extend (result)
        return reports
