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
Statistics plumbing for the Monte Carlo checks: reports, mergeable moment
accumulators and seeded, worker-independent parallelism.
"""

import math, os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# z-score gate of a single statistic
GATE = 4.0
# paths simulated per work unit
CHUNK = 4096

class MomentReport:
    """
    Empirical statistic against its theoretical value.

    mode accept passes iff |z| ≤ gate, reject passes iff |z| > gate (a value
    known to be wrong must be told apart from the data) and bound passes iff
    the empirical value does not exceed the theoretical one. Skipped entries
    carry the reason a precondition failed and neither pass nor fail.
    """

    __slots__ = ('name', 'empirical', 'theoretical', 'stderr', 'params',
            'gate', 'mode', 'skipped')

    def __init__ (self, name, empirical=None, theoretical=None, stderr=None,
            params=None, gate=GATE, mode='accept', skipped=None):
        if mode not in {'accept', 'reject', 'bound'}:
            raise ValueError (f'Unknown mode {mode}')
        self.name = name
        self.empirical = None if empirical is None else float (empirical)
        self.theoretical = None if theoretical is None else float (theoretical)
        self.stderr = None if stderr is None else float (stderr)
        self.params = params or {}
        self.gate = gate
        self.mode = mode
        self.skipped = skipped

    @classmethod
    def skip (cls, name, reason, params=None):
        return cls (name, params=params, skipped=reason)

    def __repr__ (self):
        if self.skipped:
            return f'<MomentReport {self.name} skipped: {self.skipped}>'
        return f'<MomentReport {self.name} {self.empirical} vs {self.theoretical} z={self.z}>'

    @property
    def z (self):
        if self.skipped or self.stderr is None:
            return None
        diff = self.empirical - self.theoretical
        if self.stderr > 0:
            return diff/self.stderr
        return 0.0 if diff == 0 else math.copysign (math.inf, diff)

    @property
    def passed (self):
        """ True, False or None for skipped entries """
        if self.skipped:
            return None
        if self.mode == 'bound':
            return self.empirical <= self.theoretical
        z = abs (self.z)
        if self.mode == 'reject':
            return z > self.gate
        return z <= self.gate

    def toDict (self):
        z = self.z
        return {'test': self.name,
                'params': self.params,
                'empirical': self.empirical,
                'theoretical': self.theoretical,
                'stderr': self.stderr,
                'z': z if z is None or math.isfinite (z) else None,
                'mode': self.mode,
                'pass': self.passed,
                'skipped': self.skipped,
                }

def meanReport (name, values, theoretical, params=None, **kwargs):
    """ Sample mean of values with its standard error """
    values = np.asarray (values, dtype=np.float64)
    n = len (values)
    stderr = float (np.std (values, ddof=1)/math.sqrt (n)) if n > 1 else math.inf
    return MomentReport (name, np.mean (values), theoretical, stderr,
            params=params, **kwargs)

class Moments:
    """
    Count, mean and central sums up to order four of a stream of values.

    Accumulators merge pairwise, so per-chunk results can be reduced in any
    grouping; reducing in chunk order gives bit-identical results.
    """

    __slots__ = ('n', 'mean', 'm2', 'm3', 'm4')

    def __init__ (self, n=0, mean=0.0, m2=0.0, m3=0.0, m4=0.0):
        self.n = n
        self.mean = mean
        self.m2 = m2
        self.m3 = m3
        self.m4 = m4

    @classmethod
    def of (cls, values):
        values = np.ravel (np.asarray (values, dtype=np.float64))
        n = len (values)
        if n == 0:
            return cls ()
        mean = float (np.mean (values))
        d = values - mean
        d2 = d*d
        return cls (n, mean, float (np.sum (d2)), float (np.sum (d2*d)),
                float (np.sum (d2*d2)))

    def __repr__ (self):
        return f'<Moments n={self.n} mean={self.mean} var={self.variance}>'

    def merge (self, other):
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        na, nb = self.n, other.n
        n = na + nb
        delta = other.mean - self.mean
        mean = self.mean + delta*nb/n
        m2 = self.m2 + other.m2 + delta**2*na*nb/n
        m3 = (self.m3 + other.m3 + delta**3*na*nb*(na - nb)/n**2
                + 3*delta*(na*other.m2 - nb*self.m2)/n)
        m4 = (self.m4 + other.m4
                + delta**4*na*nb*(na*na - na*nb + nb*nb)/n**3
                + 6*delta**2*(na*na*other.m2 + nb*nb*self.m2)/n**2
                + 4*delta*(na*other.m3 - nb*self.m3)/n)
        return Moments (n, mean, m2, m3, m4)

    __add__ = merge

    @property
    def variance (self):
        return self.m2/(self.n - 1) if self.n > 1 else math.nan

    @property
    def stderr (self):
        """ Standard error of the mean """
        return math.sqrt (self.variance/self.n) if self.n > 1 else math.inf

    @property
    def varianceStderr (self):
        """ Large-sample standard error of the sample variance """
        if self.n < 2:
            return math.inf
        mu2 = self.m2/self.n
        mu4 = self.m4/self.n
        return math.sqrt (max (mu4 - mu2*mu2, 0.0)/self.n)

    @property
    def excessKurtosis (self):
        if self.m2 == 0:
            return math.nan
        return self.n*self.m4/(self.m2*self.m2) - 3

def mergeMoments (parts):
    total = Moments ()
    for p in parts:
        total = total.merge (p)
    return total

def threadCount ():
    """ Worker count, capped by the SETBM_THREADS environment variable """
    value = os.environ.get ('SETBM_THREADS')
    if value is None or value.strip () == '':
        return os.cpu_count () or 1
    try:
        return max (1, int (value))
    except ValueError:
        raise ValueError (f'SETBM_THREADS must be an integer, got {value!r}') from None

def parallelMap (func, items, threads=None):
    """ Ordered map over a thread pool; numpy releases the GIL for bulk work """
    items = list (items)
    threads = threadCount () if threads is None else threads
    if threads <= 1 or len (items) <= 1:
        return [func (x) for x in items]
    with ThreadPoolExecutor (max_workers=min (threads, len (items))) as pool:
        return list (pool.map (func, items))

def chunkSizes (n, chunk=CHUNK):
    """ Split n work items into fixed-size units, independent of thread count """
    sizes = [chunk]*(n//chunk)
    if n % chunk:
        sizes.append (n % chunk)
    return sizes

def seedSequence (seed):
    """ Fresh sequence, spawning from it leaves seed untouched """
    if isinstance (seed, np.random.SeedSequence):
        return np.random.SeedSequence (seed.entropy, spawn_key=seed.spawn_key,
                pool_size=seed.pool_size)
    return np.random.SeedSequence (seed)

def spawnStreams (seed, n):
    """ n independent generators derived from one seed """
    return [np.random.default_rng (s) for s in seedSequence (seed).spawn (n)]

def fsumMean (values, weights):
    """ Weighted mean with compensated summation """
    total = math.fsum (weights)
    return math.fsum (v*w for v, w in zip (values, weights))/total
