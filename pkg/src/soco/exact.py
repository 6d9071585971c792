"""Exact projections and samplers for the built-in test geometries.

Quarantined on purpose: evaluation code and tests may project exactly, the
online algorithms (ipso / ogd / bagel) must not, or the architecture would
quietly stop being projection-free.  A test scans those modules to keep this
module out of them.

All helpers understand the shrunk set K_delta = (1 - delta) K + delta c and
reduce to K itself at delta = 0.
"""

import numpy as np

from .errors import InvalidDelta, Unsupported
from .geometry import as_vector
from .rng import CounterRng

_DYKSTRA_TOL = 1e-12
_DYKSTRA_MAX_CYCLES = 20000


def _check_delta(delta):
    if not 0.0 <= delta < 1.0:
        raise InvalidDelta(f"delta must lie in [0, 1), got {delta}")


def _project_simplex_mass(z, mass):
    """Euclidean projection of z onto {x >= 0, sum x = mass} (sort/threshold)."""
    u = np.sort(z)[::-1]
    css = np.cumsum(u) - mass
    ks = np.arange(1, len(z) + 1)
    cond = u - css / ks > 0
    k = int(np.nonzero(cond)[0][-1]) + 1
    tau = css[k - 1] / k
    return np.maximum(z - tau, 0.0)


def exact_project(body, y, delta=0.0):
    """Euclidean projection of y onto K_delta for the built-in geometries."""
    _check_delta(delta)
    y = as_vector(y, body.dimension_d)
    kind = body.kind
    if kind == "ball":
        radius = (1.0 - delta) * body.radius
        dev = y - body.center
        dist = np.linalg.norm(dev)
        if dist <= radius:
            return y.copy()
        return body.center + dev * (radius / dist)
    if kind == "box":
        c = body.anchor_c
        lo = (1.0 - delta) * body.lower + delta * c
        hi = (1.0 - delta) * body.upper + delta * c
        return np.clip(y, lo, hi)
    if kind == "simplex":
        d = body.dimension_d
        floor = delta / d
        z = y - floor
        return _project_simplex_mass(z, 1.0 - delta) + floor
    if kind == "polytope":
        offsets = (1.0 - delta) * body.offsets + delta * (body.normals @ body.anchor_c)
        return _dykstra_halfspaces(body.normals, offsets, y)
    raise Unsupported(f"no exact projection for geometry kind {kind!r}")


def _dykstra_halfspaces(A, b, y):
    """Dykstra's alternating projections onto an intersection of halfspaces.

    Converges to the exact Euclidean projection; rows of A are unit norm.
    """
    m = A.shape[0]
    x = y.copy()
    corrections = np.zeros((m, A.shape[1]))
    for _ in range(_DYKSTRA_MAX_CYCLES):
        shift = 0.0
        for i in range(m):
            z = x + corrections[i]
            viol = float(A[i] @ z - b[i])
            newx = z - viol * A[i] if viol > 0.0 else z
            corrections[i] = z - newx
            shift = max(shift, float(np.max(np.abs(newx - x))))
            x = newx
        if shift < _DYKSTRA_TOL:
            break
    return x


def distance_to_shrunk(body, delta, y):
    """dist(y, K_delta), exact up to the projection helper's tolerance."""
    y = as_vector(y, body.dimension_d)
    return float(np.linalg.norm(y - exact_project(body, y, delta)))


def support_argmin(body, w):
    """argmin_{x in K} <w, x>; exact per geometry (LP for polytopes)."""
    w = as_vector(w, body.dimension_d)
    kind = body.kind
    if kind == "ball":
        n = np.linalg.norm(w)
        if n == 0.0:
            return body.center.copy()
        return body.center - body.radius * (w / n)
    if kind == "box":
        return np.where(w > 0, body.lower, body.upper).astype(np.float64)
    if kind == "simplex":
        out = np.zeros(body.dimension_d)
        out[int(np.argmin(w))] = 1.0
        return out
    if kind == "polytope":
        vals = body.vertices @ w
        return body.vertices[int(np.argmin(vals))].copy()
    raise Unsupported(f"no support oracle for geometry kind {kind!r}")


def sample_inside(body, seed, n, delta=0.0, stream=0):
    """n reproducible samples from K_delta (uniform for ball/box/simplex)."""
    _check_delta(delta)
    rng = CounterRng(seed, stream=stream)
    d = body.dimension_d
    kind = body.kind
    if kind == "ball":
        dirs = rng.unit_vectors(0, n, d)
        radii = rng.uniforms(2 * n * d, n) ** (1.0 / d)
        pts = body.center + body.radius * radii[:, None] * dirs
    elif kind == "box":
        u = rng.uniforms(0, n * d).reshape(n, d)
        pts = body.lower + u * (body.upper - body.lower)
    elif kind == "simplex":
        u = rng.uniforms(0, n * d).reshape(n, d)
        e = -np.log(1.0 - u)
        pts = e / np.sum(e, axis=1, keepdims=True)
    elif kind == "polytope":
        lo = np.min(body.vertices, axis=0)
        hi = np.max(body.vertices, axis=0)
        pts = np.empty((n, d))
        have = 0
        start = 0
        while have < n:
            u = rng.uniforms(start, 64 * n * d).reshape(-1, d)
            start += 64 * n * d
            cand = lo + u * (hi - lo)
            ok = np.all(cand @ body.normals.T <= body.offsets, axis=1)
            take = cand[ok][: n - have]
            pts[have : have + len(take)] = take
            have += len(take)
            if start > 64 * n * d * 200:
                raise Unsupported("rejection sampling failed; polytope too thin")
    else:
        raise Unsupported(f"no sampler for geometry kind {kind!r}")
    if delta > 0.0:
        pts = (1.0 - delta) * pts + delta * body.anchor_c
    return pts
