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
Finite-grid Rådström embedding.

A compact convex set A is represented by its support function sampled on a
finite grid of unit directions, j(A) = (s(u_1, A), …, s(u_m, A)). The grid
stands in for the compact space K of C(K): in finite dimension the weak*
topology σ(X*, X) on the dual ball and the bounded-weak* topology coincide
with the norm topology, so sampling the unit sphere is all there is to it and
continuity is not modelled beyond evaluation at grid points.

Embedded elements form a vector lattice (pointwise max) and an f-algebra
(pointwise product) with unit e = j(B_X), the embedding of the unit ball.
"""

import math

import numpy as np
from scipy.spatial import cKDTree

from .sets import Interval, DimensionMismatch

DEFAULT_GRID_SIZE = {1: 2, 2: 256, 3: 512}
# absolute slack of the subadditivity test, on top of direction quantization
DEFAULT_TOLERANCE = 1e-7

class GridMismatch (ValueError):
    pass

class InvalidGrid (ValueError):
    pass

class DirectionGrid:
    """ Ordered finite set of unit vectors of R^d """

    __slots__ = ('dimension', 'directions', 'antipode', 'spacing', '_tree')

    def __init__ (self, directions):
        directions = np.array (directions, dtype=np.float64)
        if directions.ndim != 2 or len (directions) < 2:
            raise InvalidGrid ('A grid needs at least two directions')
        m, d = directions.shape
        if np.max (np.abs (np.linalg.norm (directions, axis=1) - 1)) > 1e-12:
            raise InvalidGrid ('Grid directions must be unit vectors')
        if d == 1 and directions[:, 0].tolist () != [-1.0, 1.0]:
            raise InvalidGrid ('The grid of R^1 is exactly [-1, +1]')
        tree = cKDTree (directions)
        neighbor, _ = tree.query (directions, k=2)
        if np.min (neighbor[:, 1]) < 1e-12:
            raise InvalidGrid ('Grid directions must be distinct')
        dist, idx = tree.query (-directions)
        antipode = np.where (dist < 1e-9, idx, -1)
        if d >= 2 and np.any (antipode < 0):
            raise InvalidGrid ('Grids of R^d, d ≥ 2, must be symmetric')

        directions.setflags (write=False)
        antipode.setflags (write=False)
        self.dimension = d
        self.directions = directions
        self.antipode = antipode
        # largest angle between a direction and its nearest neighbor
        self.spacing = float (2*np.arcsin (min (1.0, np.max (neighbor[:, 1])/2)))
        self._tree = tree

    @classmethod
    def make (cls, dimension, m=None):
        """
        Standard grids: {-1, +1} for d=1, m equally spaced angles (m a
        multiple of 4) for d=2 and a symmetrized Fibonacci sphere for d=3.
        """
        if m is None:
            m = DEFAULT_GRID_SIZE.get (dimension)
        if dimension == 1:
            if m != 2:
                raise InvalidGrid ('The grid of R^1 has exactly two directions')
            return cls ([[-1.0], [1.0]])
        elif dimension == 2:
            if m < 4 or m % 4 != 0:
                raise InvalidGrid (f'Planar grids need a multiple of 4 directions, got {m}')
            angles = 2*np.pi*np.arange (m)/m
            return cls (np.stack ([np.cos (angles), np.sin (angles)], axis=1))
        elif dimension == 3:
            if m < 4 or m % 2 != 0:
                raise InvalidGrid (f'Spherical grids need an even number of directions, got {m}')
            n = m//2
            i = np.arange (n)
            z = (i + 0.5)/n
            r = np.sqrt (1 - z**2)
            phi = i*np.pi*(3 - math.sqrt (5))
            upper = np.stack ([r*np.cos (phi), r*np.sin (phi), z], axis=1)
            return cls (np.vstack ([upper, -upper]))
        raise InvalidGrid (f'No standard grid for dimension {dimension}')

    def __len__ (self):
        return len (self.directions)

    def __repr__ (self):
        return f'<DirectionGrid d={self.dimension} m={len (self)}>'

    @property
    def symmetric (self):
        return bool (np.all (self.antipode >= 0))

    def sameAs (self, other):
        return self is other or (self.directions.shape == other.directions.shape
                and np.array_equal (self.directions, other.directions))

    def nearest (self, vectors):
        """ Index of the grid direction closest to each (normalized) row """
        v = np.atleast_2d (np.asarray (vectors, dtype=np.float64))
        v = v/np.linalg.norm (v, axis=1)[:, None]
        _, idx = self._tree.query (v)
        return idx

    def toDict (self):
        return {'dimension': self.dimension, 'm': len (self),
                'directions': self.directions.tolist ()}

class EmbeddedElement:
    """ Vector of values indexed by the directions of a grid, an element of C(K) """

    __slots__ = ('grid', 'values')

    def __init__ (self, grid, values):
        values = np.array (values, dtype=np.float64)
        if values.shape != (len (grid), ):
            raise GridMismatch (f'Expected {len (grid)} values, got shape {values.shape}')
        values.setflags (write=False)
        self.grid = grid
        self.values = values

    def __repr__ (self):
        return f'<EmbeddedElement {self.grid!r} {self.values!r}>'

    def __len__ (self):
        return len (self.values)

    def __getitem__ (self, k):
        return float (self.values[k])

    def _other (self, other):
        if not self.grid.sameAs (other.grid):
            raise GridMismatch ('Elements live on different grids')
        return other.values

    def __add__ (self, other):
        if isinstance (other, EmbeddedElement):
            return EmbeddedElement (self.grid, self.values + self._other (other))
        return NotImplemented

    def __sub__ (self, other):
        if isinstance (other, EmbeddedElement):
            return EmbeddedElement (self.grid, self.values - self._other (other))
        return NotImplemented

    def __neg__ (self):
        return EmbeddedElement (self.grid, -self.values)

    def __mul__ (self, other):
        if isinstance (other, EmbeddedElement):
            return product (self, other)
        try:
            return EmbeddedElement (self.grid, self.values*float (other))
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __le__ (self, other):
        """ Componentwise order of C(K) """
        return bool (np.all (self.values <= self._other (other)))

    def __ge__ (self, other):
        return bool (np.all (self.values >= self._other (other)))

    def allclose (self, other, atol=1e-12):
        return bool (np.all (np.abs (self.values - self._other (other)) <= atol))

    def toDict (self):
        return {'grid': self.grid.toDict (), 'values': self.values.tolist ()}

class Evaluation:
    """ The evaluation functional x ↦ x(k) at grid index k """

    __slots__ = ('grid', 'index')

    def __init__ (self, grid, index=0):
        index = int (index)
        if not 0 <= index < len (grid):
            raise IndexError (f'Evaluation index {index} outside [0, {len (grid)})')
        self.grid = grid
        self.index = index

    def __repr__ (self):
        return f'<Evaluation k={self.index} {self.grid!r}>'

    def __call__ (self, x):
        if isinstance (x, EmbeddedElement):
            if not self.grid.sameAs (x.grid):
                raise GridMismatch ('Evaluation and element use different grids')
            return float (x.values[self.index])
        return np.asarray (x)[..., self.index]

    @property
    def direction (self):
        return self.grid.directions[self.index]

def zero (grid):
    return EmbeddedElement (grid, np.zeros (len (grid)))

def embed (a, grid):
    """ j(A), the support function of A sampled on the grid """
    if a.dimension != grid.dimension:
        raise DimensionMismatch (f'Set of dimension {a.dimension} on grid of dimension {grid.dimension}')
    return EmbeddedElement (grid, a.supportMany (grid.directions))

def unitElement (grid):
    """ e = j(B_X), exactly one on unit directions """
    return EmbeddedElement (grid, np.ones (len (grid)))

def scaledEmbed (r, b, grid):
    """ Image of r·1_B: r·j(B), a negative multiple of j(B) for r < 0 """
    return embed (b, grid)*float (r)

def supDistance (u, v):
    """ ‖u − v‖_∞ """
    return float (np.max (np.abs (u.values - u._other (v))))

def latticeMax (u, v):
    return EmbeddedElement (u.grid, np.maximum (u.values, u._other (v)))

def product (u, v):
    """ f-algebra multiplication, pointwise on the grid """
    return EmbeddedElement (u.grid, u.values*u._other (v))

def isSupportLike (u, tol=DEFAULT_TOLERANCE):
    """
    Test whether the positively homogeneous extension H(x) = |x| u(x/|x|) is
    subadditive on all pairs of grid directions.

    a + b is rarely a grid direction, so H(a + b) is read at the nearest grid
    direction c and the quantization error |a + b|·R·|c − (a + b)/|a + b||
    (R bounds the Lipschitz constant of a support function) is added to tol.
    In R^1 the test is exact: u(−1) + u(+1) ≥ −tol.
    """
    grid = u.grid
    if not grid.symmetric:
        raise InvalidGrid ('Subadditivity test needs a symmetric grid')
    v = u.values
    if grid.dimension == 1:
        return bool (v[0] + v[1] >= -tol)

    directions = grid.directions
    i, j = np.triu_indices (len (grid), k=1)
    w = directions[i] + directions[j]
    norms = np.linalg.norm (w, axis=1)
    keep = norms > 1e-12
    i, j, w, norms = i[keep], j[keep], w[keep], norms[keep]
    c = grid.nearest (w)
    chord = np.linalg.norm (directions[c] - w/norms[:, None], axis=1)
    lipschitz = max (float (np.max (v)), 0.0)/max (math.cos (grid.spacing), 0.5)
    lhs = norms*v[c]
    rhs = v[i] + v[j] + tol + norms*lipschitz*chord
    return bool (np.all (lhs <= rhs))

def intervalFromElement (u):
    """ Inverse embedding on R^1: (−a, b) ↦ [a, b] """
    if u.grid.dimension != 1:
        raise DimensionMismatch ('Only elements over R^1 can be inverted')
    lo = -u.values[0]
    hi = u.values[1]
    if lo > hi:
        raise ValueError (f'{u!r} is not the image of a set')
    return Interval (lo, hi)
