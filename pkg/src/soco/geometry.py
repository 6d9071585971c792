"""Convex action sets exposed through separation oracles.

Algorithms in this package never project onto a body.  They may touch a
``ConvexBody`` only through:

* ``separation_oracle(y)``  -- membership or a separating hyperplane,
* ``affine_projection(y)``  -- Euclidean projection onto aff(K),
* ``affine_direction_projection(g)`` -- projection onto aff(K) - c,
* the scalars ``anchor_c``, ``inner_radius_r``, ``diameter_D``.

``anchor_c`` is a point of the relative interior and ``inner_radius_r`` the
largest r with aff(K) intersected with the r-ball around the anchor inside K.
Exact projections exist only in :mod:`soco.exact` for evaluation and tests.

A point counts as inside when every defining inequality holds within a
relative slack of 1e-9; without this, floating-point boundary points would
keep a separation-oracle loop stepping forever.
"""

import itertools

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, InvalidDelta, DegenerateDirection, Unsupported

INSIDE_RTOL = 1e-9
DIRECTION_EPS = 1e-12


def as_vector(x, dim=None):
    """Validate and return a finite float64 vector."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


class SeparationResult:
    """Outcome of one separation-oracle call.

    ``inside`` is True iff the query point belongs to the body.  Otherwise
    ``separator`` holds an unnormalized vector g with <y - x, g> > 0 for
    every x in the body (callers normalize as needed).
    """

    __slots__ = ("inside", "separator")

    def __init__(self, inside, separator=None):
        self.inside = inside
        self.separator = separator

    def __repr__(self):
        return f"SeparationResult(inside={self.inside}, separator={self.separator})"


class ConvexBody:
    """Base class; subclasses fill the oracle surface.

    Instances are immutable after construction and safe to share across
    threads; every operation is a pure function of its inputs.
    """

    kind = "custom"

    def __init__(self, anchor_c, inner_radius_r, diameter_D):
        self.anchor_c = as_vector(anchor_c)
        self.dimension_d = self.anchor_c.shape[0]
        if not inner_radius_r > 0:
            raise InvalidConfig("inner radius must be positive")
        if not diameter_D > 0:
            raise InvalidConfig("diameter must be positive")
        if inner_radius_r > diameter_D:
            raise InvalidConfig("inner radius cannot exceed the diameter")
        self.inner_radius_r = float(inner_radius_r)
        self.diameter_D = float(diameter_D)

    def separation_oracle(self, y):
        raise NotImplementedError

    def contains(self, y):
        return self.separation_oracle(y).inside

    def affine_projection(self, y):
        """Euclidean projection onto aff(K); identity for full-dimensional bodies."""
        return as_vector(y, self.dimension_d)

    def affine_direction_projection(self, g):
        """Projection onto the linear subspace aff(K) - c."""
        g = as_vector(g, self.dimension_d)
        if np.linalg.norm(g) < DIRECTION_EPS:
            raise DegenerateDirection("direction vanishes inside the affine hull")
        return g


class Ball(ConvexBody):
    """Euclidean ball: anchor = center, inner radius = radius, diameter = 2 radius."""

    kind = "ball"

    def __init__(self, center, radius):
        center = as_vector(center)
        if not radius > 0:
            raise InvalidConfig("ball radius must be positive")
        super().__init__(center, radius, 2.0 * radius)
        self.center = center
        self.radius = float(radius)

    def separation_oracle(self, y):
        y = as_vector(y, self.dimension_d)
        dev = y - self.center
        dist = np.linalg.norm(dev)
        if dist <= self.radius + INSIDE_RTOL * max(1.0, self.radius):
            return SeparationResult(True)
        return SeparationResult(False, dev)


class Box(ConvexBody):
    """Axis-aligned box [lower, upper].

    anchor = midpoint, inner radius = half the shortest edge, and the
    diameter is the main diagonal ||upper - lower||.
    """

    kind = "box"

    def __init__(self, lower, upper):
        lower = as_vector(lower)
        upper = as_vector(upper, lower.shape[0])
        if not np.all(upper > lower):
            raise InvalidConfig("box needs upper > lower in every coordinate")
        mid = 0.5 * (lower + upper)
        r = 0.5 * float(np.min(upper - lower))
        D = float(np.linalg.norm(upper - lower))
        super().__init__(mid, r, D)
        self.lower = lower
        self.upper = upper
        # per-face slack, ordered [all lower faces, all upper faces]
        scale = np.maximum(1.0, np.maximum(np.abs(lower), np.abs(upper)))
        self._face_tol = np.concatenate([INSIDE_RTOL * scale, INSIDE_RTOL * scale])

    def separation_oracle(self, y):
        y = as_vector(y, self.dimension_d)
        excess = np.concatenate([self.lower - y, y - self.upper]) - self._face_tol
        i = int(np.argmax(excess))
        if excess[i] <= 0.0:
            return SeparationResult(True)
        d = self.dimension_d
        sep = np.zeros(d)
        if i < d:
            sep[i] = -1.0
        else:
            sep[i - d] = 1.0
        return SeparationResult(False, sep)


class Simplex(ConvexBody):
    """Standard probability simplex {x : x >= 0, sum x = 1} in R^d.

    The affine hull is the sum-to-one hyperplane, so this body exercises the
    lower-dimensional code paths.  anchor = (1/d, ..., 1/d); the in-hyperplane
    inradius is 1/sqrt(d(d-1)) (distance from the barycenter to a facet
    x_i = 0 measured inside the hyperplane) and the diameter is sqrt(2)
    (distance between two vertices).
    """

    kind = "simplex"

    def __init__(self, dim):
        if dim < 2:
            raise InvalidConfig("simplex needs dimension >= 2")
        d = int(dim)
        anchor = np.full(d, 1.0 / d)
        super().__init__(anchor, 1.0 / np.sqrt(d * (d - 1.0)), np.sqrt(2.0))

    def separation_oracle(self, y):
        y = as_vector(y, self.dimension_d)
        s = float(np.sum(y))
        if abs(s - 1.0) > INSIDE_RTOL:
            sign = 1.0 if s > 1.0 else -1.0
            return SeparationResult(False, np.full(self.dimension_d, sign))
        i = int(np.argmin(y))
        if y[i] >= -INSIDE_RTOL:
            return SeparationResult(True)
        sep = np.zeros(self.dimension_d)
        sep[i] = -1.0
        return SeparationResult(False, sep)

    def affine_projection(self, y):
        y = as_vector(y, self.dimension_d)
        return y + (1.0 - np.sum(y)) / self.dimension_d

    def affine_direction_projection(self, g):
        g = as_vector(g, self.dimension_d)
        proj = g - np.mean(g)
        if np.linalg.norm(proj) < DIRECTION_EPS:
            raise DegenerateDirection("direction is normal to the sum-to-one hyperplane")
        return proj


class HalfspacePolytope(ConvexBody):
    """Bounded full-dimensional intersection of halfspaces <a_i, x> <= b_i.

    Rows are normalized at construction.  The anchor defaults to the
    Chebyshev center (largest inscribed ball, via an LP), which makes the
    inner radius exactly min_i (b_i - <a_i, c>).  The diameter comes from
    enumerating vertices, which is fine at the small sizes used here.
    """

    kind = "polytope"

    def __init__(self, normals, offsets, anchor=None):
        A = np.asarray(normals, dtype=np.float64)
        b = np.asarray(offsets, dtype=np.float64)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
            raise InvalidConfig("normals must be (m, d) with matching offsets (m,)")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms <= 0):
            raise InvalidConfig("zero normal row")
        A = A / norms[:, None]
        b = b / norms
        if anchor is None:
            anchor = _chebyshev_center(A, b)
        anchor = as_vector(anchor, A.shape[1])
        r = float(np.min(b - A @ anchor))
        if r <= 0:
            raise InvalidConfig("anchor is not strictly inside the polytope")
        verts = _enumerate_vertices(A, b)
        if len(verts) < 2:
            raise InvalidConfig("polytope appears empty or unbounded")
        diffs = verts[:, None, :] - verts[None, :, :]
        D = float(np.sqrt(np.max(np.sum(diffs * diffs, axis=-1))))
        super().__init__(anchor, r, D)
        self.normals = A
        self.offsets = b
        self.vertices = verts
        self._tol = INSIDE_RTOL * np.maximum(1.0, np.abs(b))

    def separation_oracle(self, y):
        y = as_vector(y, self.dimension_d)
        excess = self.normals @ y - self.offsets - self._tol
        i = int(np.argmax(excess))
        if excess[i] <= 0.0:
            return SeparationResult(True)
        return SeparationResult(False, self.normals[i].copy())


def _chebyshev_center(A, b):
    """Center of the largest inscribed ball: LP over (x, rho)."""
    from scipy.optimize import linprog

    m, d = A.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * d + [(0, None)], method="highs")
    if not res.success or res.x[-1] <= 0:
        raise InvalidConfig("could not find an interior point (polytope empty or degenerate)")
    return res.x[:-1]


def _enumerate_vertices(A, b, cap=200000):
    m, d = A.shape
    from math import comb

    if comb(m, d) > cap:
        raise Unsupported("too many candidate vertices to enumerate")
    verts = []
    tol = 1e-8 * np.maximum(1.0, np.abs(b))
    for rows in itertools.combinations(range(m), d):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        v = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ v <= b + tol):
            verts.append(v)
    return np.array(verts) if verts else np.empty((0, d))


def separation_oracle(body, y):
    return body.separation_oracle(y)


def affine_projection(body, y):
    return body.affine_projection(y)


def affine_direction_projection(body, g):
    return body.affine_direction_projection(g)


def shrunk_member(body, delta, x):
    """Map x in K to (1 - delta) x + delta c, a member of the shrunk set K_delta."""
    if not 0.0 <= delta < 1.0:
        raise InvalidDelta(f"delta must lie in [0, 1), got {delta}")
    x = as_vector(x, body.dimension_d)
    return (1.0 - delta) * x + delta * body.anchor_c


def distance_to_shrunk(body, delta, y):
    """Exact distance from y to K_delta; test-support only (see soco.exact)."""
    from . import exact

    return exact.distance_to_shrunk(body, delta, y)
