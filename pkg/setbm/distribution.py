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
Set-valued random variables and their distribution functions
F_Γ(Y) = P(Γ ⊆ Y).
"""

import math

import numpy as np

from .sets import Interval, Ball, Polytope, asInterval, contains, excess, \
        DimensionMismatch
from .embedding import DirectionGrid, embed
from .stats import parallelMap, chunkSizes, spawnStreams, seedSequence, fsumMean

# two-sided 95% normal quantile
Z95 = 1.96

class NSamplesZero (ValueError):
    pass

class EquivalenceViolation (RuntimeError):
    """ Geometric and embedded containment disagree where they must not """
    pass

class NonPositiveLambda (ValueError):
    pass

class InvalidRange (ValueError):
    pass

class SetSample:
    """
    Batch of random sets sharing one representation: interval endpoints,
    ball centers and radii, or a list of polytopes.
    """

    __slots__ = ('dimension', 'kind', 'data')

    def __init__ (self, dimension, kind, data):
        self.dimension = dimension
        self.kind = kind
        self.data = data

    @classmethod
    def intervals (cls, lo, hi):
        return cls (1, 'interval', (np.asarray (lo, dtype=np.float64),
                np.asarray (hi, dtype=np.float64)))

    @classmethod
    def balls (cls, centers, radii):
        centers = np.atleast_2d (np.asarray (centers, dtype=np.float64))
        return cls (centers.shape[1], 'ball',
                (centers, np.asarray (radii, dtype=np.float64)))

    @classmethod
    def polytopes (cls, polytopes):
        polytopes = list (polytopes)
        return cls (polytopes[0].dimension, 'polytope', polytopes)

    def __repr__ (self):
        return f'<SetSample {self.kind} d={self.dimension} n={len (self)}>'

    def __len__ (self):
        if self.kind == 'polytope':
            return len (self.data)
        return len (self.data[1])

    def __getitem__ (self, i):
        if self.kind == 'interval':
            return Interval (self.data[0][i], self.data[1][i])
        elif self.kind == 'ball':
            return Ball (self.data[0][i], self.data[1][i])
        return self.data[i]

    def __iter__ (self):
        for i in range (len (self)):
            yield self[i]

    def contained (self, y):
        """ Exact containment Γ_i ⊆ Y for every draw """
        if y.dimension != self.dimension:
            raise DimensionMismatch (f'Sample of dimension {self.dimension}, set of dimension {y.dimension}')
        if self.kind == 'interval':
            y = asInterval (y)
            lo, hi = self.data
            return (y.lo <= lo) & (hi <= y.hi)
        elif self.kind == 'ball':
            centers, radii = self.data
            if self.dimension == 1:
                y = asInterval (y)
                c = centers[:, 0]
                return (y.lo <= c - radii) & (c + radii <= y.hi)
            return y.signedDistance (centers) + radii <= 0
        return np.array ([contains (y, p) for p in self.data], dtype=bool)

    def embedded (self, grid):
        """ j(Γ_i) for every draw, one row per draw """
        if grid.dimension != self.dimension:
            raise DimensionMismatch (f'Sample of dimension {self.dimension} on grid of dimension {grid.dimension}')
        u = grid.directions
        if self.kind == 'interval':
            lo, hi = self.data
            return np.maximum (np.outer (lo, u[:, 0]), np.outer (hi, u[:, 0]))
        elif self.kind == 'ball':
            centers, radii = self.data
            return centers @ u.T + np.outer (radii, np.linalg.norm (u, axis=1))
        return np.stack ([p.supportMany (u) for p in self.data])

class SetRandomVariable:
    """
    Random compact convex set: sampler (rng, n) draws a SetSample of size n.
    Identical seeds give identical draw sequences.
    """

    __slots__ = ('sampler', 'dimension', 'seed', 'name')

    def __init__ (self, sampler, dimension, seed=0, name=None):
        self.sampler = sampler
        self.dimension = dimension
        self.seed = seed
        self.name = name or 'set'

    def __repr__ (self):
        return f'<SetRandomVariable {self.name} d={self.dimension}>'

    def sample (self, rng, n):
        s = self.sampler (rng, n)
        assert len (s) == n
        return s

    def draw (self, n, seed=None):
        """ n draws from a single stream """
        seed = self.seed if seed is None else seed
        return self.sample (np.random.default_rng (seed), n)

    def chunks (self, n, seed=None, threads=None, func=None):
        """
        Draw n sets in fixed-size chunks from spawned streams and apply func
        to every chunk; the result does not depend on the number of workers.
        """
        if n < 1:
            raise NSamplesZero ('At least one sample is required')
        seed = self.seed if seed is None else seed
        sizes = chunkSizes (n)
        streams = spawnStreams (seed, len (sizes))
        def run (job):
            rng, size = job
            sample = self.sample (rng, size)
            return sample if func is None else func (sample)
        return parallelMap (run, zip (streams, sizes), threads)

def constantVariable (a):
    """ Γ ≡ A """
    if isinstance (a, Interval) or a.dimension == 1:
        a = asInterval (a)
        def sampler (rng, n):
            return SetSample.intervals (np.full (n, a.lo), np.full (n, a.hi))
    elif isinstance (a, Ball):
        def sampler (rng, n):
            return SetSample.balls (np.tile (a.center, (n, 1)), np.full (n, a.radius))
    else:
        def sampler (rng, n):
            return SetSample.polytopes ([a]*n)
    return SetRandomVariable (sampler, a.dimension, name='constant')

def exponentialPairVariable (lam, seed=0):
    """
    Γ = [X1, X1 + Z] with X1, Z independent Exp(λ), drawn by inversion from
    the generator's uniforms
    """
    lam = float (lam)
    if not lam > 0:
        raise NonPositiveLambda (f'λ must be positive, got {lam}')
    def sampler (rng, n):
        u = rng.random ((2, n))
        # 1 − U avoids log (0), random () is in [0, 1)
        x1 = -np.log1p (-u[0])/lam
        z = -np.log1p (-u[1])/lam
        return SetSample.intervals (x1, x1 + z)
    return SetRandomVariable (sampler, 1, seed=seed, name=f'exponentialPair(λ={lam})')

def exponentialPairAnalyticF (lam, y1, y2):
    """ F_Γ([y1, y2]) = e^{−λy1} − e^{−λy2} + λ(y1 − y2)e^{−λy2} """
    lam = float (lam)
    if not lam > 0:
        raise NonPositiveLambda (f'λ must be positive, got {lam}')
    if y1 < 0 or y1 > y2:
        raise InvalidRange (f'Need 0 ≤ y1 ≤ y2, got y1={y1}, y2={y2}')
    if math.isinf (y2):
        return math.exp (-lam*y1)
    tail = math.exp (-lam*y2)
    return math.exp (-lam*y1) - tail + lam*(y1 - y2)*tail

def ballVariable (dimension, spread=1.0, meanRadius=0.5, seed=0):
    """ Balls with normal centers and exponential radii """
    def sampler (rng, n):
        centers = spread*rng.standard_normal ((n, dimension))
        radii = rng.exponential (meanRadius, n)
        if dimension == 1:
            c = centers[:, 0]
            return SetSample.intervals (c - radii, c + radii)
        return SetSample.balls (centers, radii)
    return SetRandomVariable (sampler, dimension, seed=seed, name='ball')

def polytopeVariable (dimension, vertices=6, spread=1.0, size=0.5, seed=0):
    """ Hulls of normal point clouds around a normal center """
    def sampler (rng, n):
        centers = spread*rng.standard_normal ((n, 1, dimension))
        clouds = centers + size*rng.standard_normal ((n, vertices, dimension))
        return SetSample.polytopes ([Polytope (c) for c in clouds])
    return SetRandomVariable (sampler, dimension, seed=seed, name='polytope')

class DistributionEstimate:
    """ Monte Carlo estimate of a probability with 95% binomial half-width """

    __slots__ = ('value', 'halfWidth', 'nSamples')

    def __init__ (self, value, halfWidth, nSamples):
        assert 0 <= value <= 1 and halfWidth >= 0 and nSamples >= 1
        self.value = value
        self.halfWidth = halfWidth
        self.nSamples = nSamples

    @classmethod
    def fromCount (cls, hits, n):
        if n < 1:
            raise NSamplesZero ('At least one sample is required')
        p = hits/n
        return cls (p, Z95*math.sqrt (p*(1 - p)/n), n)

    def __repr__ (self):
        return f'<DistributionEstimate {self.value} ± {self.halfWidth} n={self.nSamples}>'

    def merge (self, other):
        return mergeEstimates ([self, other])

    def covers (self, value):
        return abs (self.value - value) <= self.halfWidth

    def toDict (self):
        return {'value': self.value, 'halfWidth': self.halfWidth,
                'nSamples': self.nSamples}

def mergeEstimates (estimates):
    """ Sample-count weighted combination of independent estimates """
    estimates = list (estimates)
    n = sum (e.nSamples for e in estimates)
    if n == 0:
        raise NSamplesZero ('Nothing to merge')
    p = fsumMean ([e.value for e in estimates], [e.nSamples for e in estimates])
    p = min (max (p, 0.0), 1.0)
    return DistributionEstimate (p, Z95*math.sqrt (p*(1 - p)/n), n)

def distributionFunction (g, y, n, seed=None, threads=None):
    """ F_Γ(Y) by the frequency of Γ_i ⊆ Y over n draws """
    if g.dimension != y.dimension:
        raise DimensionMismatch (f'Variable of dimension {g.dimension}, set of dimension {y.dimension}')
    hits = g.chunks (n, seed, threads,
            lambda s: int (np.count_nonzero (s.contained (y))))
    return DistributionEstimate.fromCount (sum (hits), n)

class EmbeddingCheck:
    """
    Event-by-event comparison of Γ_i ⊆ Y and j(Γ_i) ≤ j(Y).

    exactOnly counts draws contained in Y whose embedding is not below j(Y),
    always a bug. gridOnly counts draws passing on the grid but not exactly,
    expected from direction sampling beyond R^1; those whose excess over Y
    exceeds the grid resolution are counted in beyondResolution.
    """

    __slots__ = ('nSamples', 'agreements', 'exactOnly', 'gridOnly',
            'beyondResolution', 'probability')

    def __init__ (self, nSamples, agreements, exactOnly, gridOnly,
            beyondResolution, probability):
        self.nSamples = nSamples
        self.agreements = agreements
        self.exactOnly = exactOnly
        self.gridOnly = gridOnly
        self.beyondResolution = beyondResolution
        self.probability = probability

    def __repr__ (self):
        return f'<EmbeddingCheck n={self.nSamples} agree={self.agreements} exactOnly={self.exactOnly} gridOnly={self.gridOnly}>'

    @property
    def disagreements (self):
        return self.exactOnly + self.gridOnly

    @property
    def passed (self):
        return self.exactOnly == 0 and self.beyondResolution == 0

    def toDict (self):
        return {'nSamples': self.nSamples, 'agreements': self.agreements,
                'exactOnly': self.exactOnly, 'gridOnly': self.gridOnly,
                'beyondResolution': self.beyondResolution,
                'probability': self.probability.toDict ()}

def embeddedDistributionCheck (g, y, n, seed=None, grid=None, threads=None):
    """ Γ ⊆ Y ⟺ j(Γ) ≤ j(Y), checked on every draw """
    if g.dimension != y.dimension:
        raise DimensionMismatch (f'Variable of dimension {g.dimension}, set of dimension {y.dimension}')
    grid = grid or DirectionGrid.make (g.dimension)
    bound = embed (y, grid).values
    exact = g.dimension == 1
    slack = 0.0 if exact else 1e-12*(1 + y.norm)

    def compare (sample):
        inside = sample.contained (y)
        below = np.all (sample.embedded (grid) <= bound + slack, axis=1)
        gridOnly = np.flatnonzero (below & ~inside)
        beyond = 0
        for i in gridOnly:
            s = sample[i]
            resolution = 2*math.sin (grid.spacing/2)*(s.norm + y.norm) + slack
            if excess (s, y) > resolution:
                beyond += 1
        return (int (np.count_nonzero (inside == below)),
                int (np.count_nonzero (inside & ~below)), len (gridOnly),
                beyond, int (np.count_nonzero (inside)))

    parts = g.chunks (n, seed, threads, compare)
    agreements, exactOnly, gridOnly, beyond, hits = \
            (sum (p[k] for p in parts) for k in range (5))
    if exact and agreements != n:
        raise EquivalenceViolation (f'{n - agreements} of {n} draws disagree on R^1')
    return EmbeddingCheck (n, agreements, exactOnly, gridOnly, beyond,
            DistributionEstimate.fromCount (hits, n))

class SurfacePoint:
    """ One row of the exponential-pair distribution surface """

    __slots__ = ('y1', 'y2', 'estimate', 'analytic')

    def __init__ (self, y1, y2, estimate, analytic):
        self.y1 = y1
        self.y2 = y2
        self.estimate = estimate
        self.analytic = analytic

    def __repr__ (self):
        return f'<SurfacePoint ({self.y1}, {self.y2}) {self.estimate!r} analytic={self.analytic}>'

    @property
    def absErr (self):
        return abs (self.estimate.value - self.analytic)

    @property
    def covered (self):
        return self.absErr <= self.estimate.halfWidth

def distributionSurface (lam, ys, n, seed=0, threads=None):
    """
    Estimated and closed-form F_Γ([y1, y2]) for all y1 ≤ y2 from ys. Every
    cell draws its own n sets from a stream spawned off seed, so cells are
    independent and their coverage counts are binomial.
    """
    g = exponentialPairVariable (lam, seed)
    ys = np.asarray (sorted (ys), dtype=np.float64)
    if len (ys) == 0 or ys[0] < 0:
        raise InvalidRange ('The y grid must be nonempty and nonnegative')

    cells = [(float (ys[i]), float (ys[j])) for i in range (len (ys))
            for j in range (i, len (ys))]

    def estimate (job):
        (y1, y2), stream = job
        return distributionFunction (g, Interval (y1, y2), n, stream, threads=1)

    estimates = parallelMap (estimate,
            zip (cells, seedSequence (seed).spawn (len (cells))), threads)
    return [SurfacePoint (y1, y2, e, exponentialPairAnalyticF (lam, y1, y2))
            for (y1, y2), e in zip (cells, estimates)]
