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
Exact compact convex sets in R^d.

Three representations are supported: closed intervals (d=1 only), Euclidean
balls and polytopes given by their vertices (d ≤ 3). All of them are
immutable values. Arithmetic is Minkowski arithmetic; comparisons go through
support functions and the Hausdorff metric.

>>> a = Interval (0, 1) + Interval (2, 5)
>>> a.lo, a.hi
(2.0, 6.0)
"""

from numbers import Real

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

# largest dimension exact polytope arithmetic is available for
MAX_POLYTOPE_DIMENSION = 3

class DimensionMismatch (ValueError):
    pass

class UnsupportedRepresentationPair (TypeError):
    """ No exact closed form exists for this combination of representations """
    pass

class InvalidDirection (ValueError):
    pass

def _readonly (a):
    a = np.array (a, dtype=np.float64)
    a.setflags (write=False)
    return a

class Direction:
    """ Unit vector of R^d, a point of the dual unit sphere """

    __slots__ = ('components', )

    TOLERANCE = 1e-12

    def __init__ (self, components):
        components = np.atleast_1d (np.asarray (components, dtype=np.float64))
        if components.ndim != 1 or not np.all (np.isfinite (components)):
            raise InvalidDirection (f'Not a finite vector: {components!r}')
        if abs (np.linalg.norm (components) - 1) > self.TOLERANCE:
            raise InvalidDirection (f'Not a unit vector: {components!r}')
        self.components = _readonly (components)

    @classmethod
    def normalized (cls, v):
        v = np.atleast_1d (np.asarray (v, dtype=np.float64))
        n = np.linalg.norm (v)
        if n == 0:
            raise InvalidDirection ('Zero vector has no direction')
        return cls (v/n)

    @property
    def dimension (self):
        return len (self.components)

    def __neg__ (self):
        return Direction (-self.components)

    def __repr__ (self):
        return f'<Direction {self.components.tolist ()!r}>'

def _directions (x):
    """ Directions (Direction, vector or m×d matrix) as 2-D array """
    if isinstance (x, Direction):
        x = x.components
    return np.atleast_2d (np.asarray (x, dtype=np.float64))

class ConvexSet:
    """ Abstract nonempty compact convex subset of R^d """

    __slots__ = ('dimension', )

    def supportMany (self, directions):
        """ Support function evaluated at each row of an m×d matrix """
        raise NotImplementedError () # pragma: no cover

    def support (self, x):
        u = _directions (x)
        _checkDimension (self, u.shape[1])
        return float (self.supportMany (u)[0])

    def distance (self, points):
        """ Euclidean distance from each row of points to the set """
        raise NotImplementedError () # pragma: no cover

    @property
    def diameter (self):
        raise NotImplementedError () # pragma: no cover

    @property
    def norm (self):
        """ Largest Euclidean norm of a point in the set """
        raise NotImplementedError () # pragma: no cover

    def translate (self, v):
        raise NotImplementedError () # pragma: no cover

    def __add__ (self, other):
        if isinstance (other, ConvexSet):
            return minkowskiSum (self, other)
        return NotImplemented

    def __mul__ (self, other):
        if isinstance (other, Real):
            return scalarMul (other, self)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__ (self):
        return scalarMul (-1, self)

class Interval (ConvexSet):
    """ Closed interval [lo, hi] ⊂ R """

    __slots__ = ('lo', 'hi')

    def __init__ (self, lo, hi):
        lo = float (lo)
        hi = float (hi)
        if not (np.isfinite (lo) and np.isfinite (hi)):
            raise ValueError (f'Interval endpoints must be finite, got {lo}, {hi}')
        if lo > hi:
            raise ValueError (f'Interval requires lo ≤ hi, got {lo} > {hi}')
        self.dimension = 1
        self.lo = lo
        self.hi = hi

    def __repr__ (self):
        return f'<Interval [{self.lo!r}, {self.hi!r}]>'

    def supportMany (self, directions):
        u = _directions (directions)[:, 0]
        return np.maximum (u*self.lo, u*self.hi)

    def distance (self, points):
        p = np.atleast_2d (np.asarray (points, dtype=np.float64))[:, 0]
        return np.maximum (0, np.maximum (self.lo - p, p - self.hi))

    @property
    def diameter (self):
        return self.hi - self.lo

    @property
    def norm (self):
        return max (abs (self.lo), abs (self.hi))

    @property
    def isSingleton (self):
        return self.lo == self.hi

    def translate (self, v):
        v = float (np.asarray (v).reshape (-1)[0])
        return Interval (self.lo + v, self.hi + v)

    def toDict (self):
        return {'type': 'interval', 'lo': self.lo, 'hi': self.hi}

class Ball (ConvexSet):
    """ Closed Euclidean ball """

    __slots__ = ('center', 'radius')

    def __init__ (self, center, radius):
        center = np.atleast_1d (np.asarray (center, dtype=np.float64))
        radius = float (radius)
        if center.ndim != 1 or not np.all (np.isfinite (center)):
            raise ValueError (f'Ball center must be a finite vector, got {center!r}')
        if not radius >= 0 or not np.isfinite (radius):
            raise ValueError (f'Ball radius must be nonnegative, got {radius}')
        self.dimension = len (center)
        self.center = _readonly (center)
        self.radius = radius

    @classmethod
    def unit (cls, dimension):
        """ The unit ball B_X, whose embedding is the unit e """
        return cls (np.zeros (dimension), 1)

    def __repr__ (self):
        return f'<Ball center={self.center.tolist ()!r} radius={self.radius!r}>'

    def supportMany (self, directions):
        u = _directions (directions)
        return u @ self.center + self.radius*np.linalg.norm (u, axis=1)

    def signedDistance (self, points):
        p = np.atleast_2d (np.asarray (points, dtype=np.float64))
        return np.linalg.norm (p - self.center, axis=1) - self.radius

    def distance (self, points):
        return np.maximum (0, self.signedDistance (points))

    @property
    def diameter (self):
        return 2*self.radius

    @property
    def norm (self):
        return float (np.linalg.norm (self.center)) + self.radius

    @property
    def isSingleton (self):
        return self.radius == 0

    def translate (self, v):
        return Ball (self.center + np.asarray (v, dtype=np.float64), self.radius)

    def toDict (self):
        return {'type': 'ball', 'center': self.center.tolist (),
                'radius': self.radius}

def _segmentDistance2 (p, a, b):
    """ Squared distance of each row of p to segment [a, b] """
    ab = b - a
    denom = ab @ ab
    if denom == 0:
        return np.sum ((p - a)**2, axis=1)
    t = np.clip ((p - a) @ ab / denom, 0, 1)
    closest = a + t[:, None]*ab
    return np.sum ((p - closest)**2, axis=1)

def _triangleDistance2 (p, a, b, c):
    """ Squared distance of each row of p to the triangle abc in R^3 """
    n = np.cross (b - a, c - a)
    nn = np.linalg.norm (n)
    edges = np.minimum (np.minimum (_segmentDistance2 (p, a, b),
            _segmentDistance2 (p, b, c)), _segmentDistance2 (p, c, a))
    if nn == 0:
        return edges
    n = n/nn
    height = (p - a) @ n
    q = p - height[:, None]*n
    # inside test by orientation against each edge
    inside = np.ones (len (p), dtype=bool)
    for x, y in ((a, b), (b, c), (c, a)):
        inside &= np.cross (y - x, q - x) @ n >= 0
    return np.where (inside, height**2, edges)

class Polytope (ConvexSet):
    """
    Convex hull of a finite point set in R^d, d ≤ 3.

    The vertex list is canonical: non-extreme points are removed and the
    remaining vertices are sorted lexicographically.
    """

    __slots__ = ('vertices', '_origin', '_basis', '_local', '_equations',
            '_faces')

    def __init__ (self, vertices):
        points = np.asarray (vertices, dtype=np.float64)
        if points.ndim == 1:
            points = points[None, :]
        if points.ndim != 2 or len (points) == 0 or points.shape[1] == 0:
            raise ValueError ('Polytope requires a nonempty list of vectors')
        if not np.all (np.isfinite (points)):
            raise ValueError ('Polytope vertices must be finite')
        d = points.shape[1]
        if d > MAX_POLYTOPE_DIMENSION:
            raise UnsupportedRepresentationPair (f'Polytopes are limited to d ≤ {MAX_POLYTOPE_DIMENSION}, got {d}')
        self.dimension = d

        points = np.unique (points, axis=0)
        origin, basis = _affineFrame (points)
        local = (points - origin) @ basis.T
        k = len (basis)
        equations = None
        faces = ()
        if k == 1:
            keep = np.unique ([np.argmin (local[:, 0]), np.argmax (local[:, 0])])
        elif k >= 2:
            try:
                hull = ConvexHull (local)
            except QhullError:
                hull = ConvexHull (local, qhull_options='QJ')
            keep = np.sort (hull.vertices)
            equations = hull.equations
            faces = hull.simplices
        else:
            keep = np.array ([0])
        # faces index into the reduced vertex list
        remap = np.full (len (points), -1)
        remap[keep] = np.arange (len (keep))
        points = points[keep]
        local = local[keep]
        faces = tuple (tuple (remap[f]) for f in faces)

        order = np.lexsort (points.T[::-1])
        inverse = np.empty_like (order)
        inverse[order] = np.arange (len (order))
        self.vertices = _readonly (points[order])
        self._local = _readonly (local[order])
        self._faces = tuple (tuple (int (inverse[i]) for i in f) for f in faces)
        self._origin = _readonly (origin)
        self._basis = _readonly (basis)
        self._equations = None if equations is None else _readonly (equations)

    def __repr__ (self):
        return f'<Polytope {self.vertices.tolist ()!r}>'

    @property
    def affineDimension (self):
        return len (self._basis)

    @property
    def isSingleton (self):
        return len (self.vertices) == 1

    def supportMany (self, directions):
        u = _directions (directions)
        return np.max (u @ self.vertices.T, axis=1)

    def _split (self, points):
        """ Coordinates in the affine hull and squared distance to it """
        p = np.atleast_2d (np.asarray (points, dtype=np.float64))
        rel = p - self._origin
        local = rel @ self._basis.T
        if self.affineDimension == self.dimension:
            return local, np.zeros (len (p))
        orth = rel - local @ self._basis
        return local, np.sum (orth**2, axis=1)

    def _inside (self, local):
        scale = 1 + np.max (np.abs (self._local))
        return np.all (local @ self._equations[:, :-1].T
                + self._equations[:, -1] <= 1e-12*scale, axis=1)

    def distance (self, points):
        local, orth2 = self._split (points)
        k = self.affineDimension
        if k == 0:
            inplane = np.zeros (len (local))
        elif k == 1:
            lo = self._local[:, 0].min ()
            hi = self._local[:, 0].max ()
            x = local[:, 0]
            inplane = np.maximum (0, np.maximum (lo - x, x - hi))**2
        else:
            inside = self._inside (local)
            if k == 2:
                dists = [_segmentDistance2 (local, self._local[i], self._local[j])
                        for i, j in self._faces]
            else:
                dists = [_triangleDistance2 (local, *self._local[list (f)])
                        for f in self._faces]
            inplane = np.where (inside, 0, np.min (dists, axis=0))
        return np.sqrt (orth2 + inplane)

    def signedDistance (self, points):
        """
        Distance to the set, negated depth (distance to the boundary) for
        interior points of a full-dimensional polytope
        """
        dist = self.distance (points)
        if self.affineDimension < self.dimension:
            return dist
        local, _ = self._split (points)
        depth = np.max (local @ self._equations[:, :-1].T
                + self._equations[:, -1], axis=1)
        return np.where (dist > 0, dist, np.minimum (depth, 0))

    @property
    def diameter (self):
        if len (self.vertices) < 2:
            return 0.0
        return float (np.max (pdist (self.vertices)))

    @property
    def norm (self):
        return float (np.max (np.linalg.norm (self.vertices, axis=1)))

    def translate (self, v):
        return Polytope (self.vertices + np.asarray (v, dtype=np.float64))

    def toDict (self):
        return {'type': 'polytope', 'vertices': self.vertices.tolist ()}

def _affineFrame (points):
    """
    Orthonormal basis (rows) of the affine hull of points, anchored at the
    centroid
    """
    origin = points.mean (axis=0)
    centered = points - origin
    if len (points) == 1 or not np.any (centered):
        return origin, np.zeros ((0, points.shape[1]))
    _, s, vt = np.linalg.svd (centered, full_matrices=False)
    rank = int (np.sum (s > 1e-10*s[0]))
    return origin, vt[:rank]

def _checkDimension (a, d):
    if a.dimension != d:
        raise DimensionMismatch (f'Dimension {a.dimension} does not match {d}')

def _checkPair (a, b):
    _checkDimension (a, b.dimension)

def asInterval (a):
    """ Any set in R^1 as Interval """
    _checkDimension (a, 1)
    if isinstance (a, Interval):
        return a
    if isinstance (a, Ball):
        c = float (a.center[0])
        return Interval (c - a.radius, c + a.radius)
    return Interval (a.vertices[:, 0].min (), a.vertices[:, 0].max ())

def asPolytope (a):
    """ Vertex representation, None if the set has none """
    if isinstance (a, Polytope):
        return a
    if isinstance (a, Interval):
        return Polytope ([[a.lo], [a.hi]])
    if a.radius == 0:
        return Polytope ([a.center])
    if a.dimension == 1:
        return asPolytope (asInterval (a))
    return None

def _singletonPoint (a):
    p = asPolytope (a)
    if p is not None and p.isSingleton:
        return p.vertices[0]
    return None

def minkowskiSum (a, b):
    """ A + B = {a + b : a ∈ A, b ∈ B} """
    _checkPair (a, b)
    if a.dimension == 1:
        a = asInterval (a)
        b = asInterval (b)
        return Interval (a.lo + b.lo, a.hi + b.hi)
    if isinstance (a, Ball) and isinstance (b, Ball):
        return Ball (a.center + b.center, a.radius + b.radius)
    # translating a ball is exact
    for x, y in ((a, b), (b, a)):
        if isinstance (x, Ball):
            p = _singletonPoint (y)
            if p is not None:
                return x.translate (p)
    pa = asPolytope (a)
    pb = asPolytope (b)
    if pa is None or pb is None:
        raise UnsupportedRepresentationPair (f'No exact Minkowski sum of {a!r} and {b!r}')
    sums = pa.vertices[:, None, :] + pb.vertices[None, :, :]
    return Polytope (sums.reshape (-1, a.dimension))

def scalarMul (lam, a):
    """ λA = {λa : a ∈ A}, a reflection for negative λ """
    lam = float (lam)
    if isinstance (a, Interval):
        lo, hi = sorted ((lam*a.lo, lam*a.hi))
        return Interval (lo, hi)
    if isinstance (a, Ball):
        return Ball (lam*a.center, abs (lam)*a.radius)
    return Polytope (lam*a.vertices)

def support (a, x):
    """ s(x, A) = sup {⟨x, a⟩ : a ∈ A} """
    return a.support (x)

def excess (a, b):
    """ e(A, B) = sup_{a ∈ A} inf_{b ∈ B} |a − b| """
    _checkPair (a, b)
    if a.dimension == 1:
        a = asInterval (a)
        b = asInterval (b)
        return max (0.0, b.lo - a.lo, a.hi - b.hi)
    if isinstance (a, Ball) and isinstance (b, Ball):
        return max (0.0, float (np.linalg.norm (a.center - b.center))
                + a.radius - b.radius)
    pa = asPolytope (a)
    if pa is not None:
        # distance to a convex set is convex, so the sup is attained at a
        # vertex
        return float (np.max (b.distance (pa.vertices)))
    # a is a proper ball, b a polytope
    return max (0.0, a.radius + float (b.signedDistance (a.center)[0]))

def hausdorff (a, b):
    """ H(A, B) = max (e(A, B), e(B, A)) """
    return max (excess (a, b), excess (b, a))

def convexHullUnion (a, b):
    """ co(A ∪ B) """
    _checkPair (a, b)
    if a.dimension == 1:
        a = asInterval (a)
        b = asInterval (b)
        return Interval (min (a.lo, b.lo), max (a.hi, b.hi))
    pa = asPolytope (a)
    pb = asPolytope (b)
    if pa is None or pb is None:
        raise UnsupportedRepresentationPair (f'No exact hull of {a!r} and {b!r}')
    return Polytope (np.vstack ([pa.vertices, pb.vertices]))

def equalityTolerance (a, b, rtol=1e-9):
    """ Scale-relative tolerance for comparing a and b """
    return rtol*(1 + max (a.diameter, b.diameter))

def approxEqual (a, b, rtol=1e-9):
    return hausdorff (a, b) <= equalityTolerance (a, b, rtol)

def contains (outer, inner, tol=0.0):
    """ inner ⊆ outer, exact endpoint comparison in R^1 """
    _checkPair (outer, inner)
    if outer.dimension == 1:
        o = asInterval (outer)
        i = asInterval (inner)
        return o.lo - tol <= i.lo and i.hi <= o.hi + tol
    return excess (inner, outer) <= tol

def point (p):
    """ Singleton {p} """
    p = np.atleast_1d (np.asarray (p, dtype=np.float64))
    if len (p) == 1:
        return Interval (p[0], p[0])
    return Polytope ([p])
