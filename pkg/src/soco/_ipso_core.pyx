# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled separation-oracle stepping loops for the built-in geometries.

Same algorithm as the pure-Python path in soco.ipso, with the per-geometry
oracle logic inlined (membership tolerances, separator choice and tie-breaks
mirror soco.geometry exactly).  Each function returns (point, so_calls,
steps); oracle-call accounting is identical to the fallback.
"""

import numpy as np

from .errors import IterationCapExceeded

from libc.math cimport sqrt, fabs, fmax

DEF INSIDE_RTOL = 1e-9
DEF DIRECTION_EPS = 1e-12


cdef inline void _clip_to_anchor_ball(double[::1] y, const double[::1] anchor,
                                      double D, Py_ssize_t d) noexcept:
    cdef Py_ssize_t i
    cdef double nd = 0.0, denom
    for i in range(d):
        nd += (y[i] - anchor[i]) * (y[i] - anchor[i])
    nd = sqrt(nd)
    if nd > D:
        denom = nd / D
        for i in range(d):
            y[i] = anchor[i] + (y[i] - anchor[i]) / denom


def ipso_ball(const double[::1] center, double radius, const double[::1] anchor,
              double r, double D, double delta, long max_iter,
              const double[::1] y0):
    cdef Py_ssize_t d = y0.shape[0]
    cdef object out = np.empty(d, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i
    cdef long so_calls = 0, steps = 0
    cdef double step = delta * r
    cdef double gn, scale, tol

    for i in range(d):
        y[i] = y0[i]
    _clip_to_anchor_ball(y, anchor, D, d)

    tol = radius + INSIDE_RTOL * fmax(1.0, radius)
    while True:
        gn = 0.0
        for i in range(d):
            gn += (y[i] - center[i]) * (y[i] - center[i])
        gn = sqrt(gn)
        so_calls += 1
        if gn <= tol:
            return out, so_calls, steps
        if steps >= max_iter:
            raise IterationCapExceeded(
                f"still outside after {steps} corrective steps (delta={delta})")
        scale = step / gn
        for i in range(d):
            y[i] = y[i] - scale * (y[i] - center[i])
        steps += 1


def ipso_box(const double[::1] lower, const double[::1] upper,
             const double[::1] anchor, double r, double D, double delta,
             long max_iter, const double[::1] y0):
    cdef Py_ssize_t d = y0.shape[0]
    cdef object out = np.empty(d, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, best, face
    cdef long so_calls = 0, steps = 0
    cdef double step = delta * r
    cdef double excess, best_excess, tol, scale

    for i in range(d):
        y[i] = y0[i]
    _clip_to_anchor_ball(y, anchor, D, d)

    while True:
        # faces ordered [all lower, all upper]; first maximal excess wins
        best = 0
        best_excess = -1e300
        for i in range(d):
            tol = INSIDE_RTOL * fmax(1.0, fmax(fabs(lower[i]), fabs(upper[i])))
            excess = (lower[i] - y[i]) - tol
            if excess > best_excess:
                best_excess = excess
                best = i
        for i in range(d):
            tol = INSIDE_RTOL * fmax(1.0, fmax(fabs(lower[i]), fabs(upper[i])))
            excess = (y[i] - upper[i]) - tol
            if excess > best_excess:
                best_excess = excess
                best = d + i
        so_calls += 1
        if best_excess <= 0.0:
            return out, so_calls, steps
        if steps >= max_iter:
            raise IterationCapExceeded(
                f"still outside after {steps} corrective steps (delta={delta})")
        # separator is a signed coordinate axis; unit norm
        scale = step / 1.0
        if best < d:
            y[best] = y[best] - scale * (-1.0)
        else:
            face = best - d
            y[face] = y[face] - scale * 1.0
        steps += 1


def ipso_simplex(const double[::1] anchor, double r, double D, double delta,
                 long max_iter, const double[::1] y0):
    cdef Py_ssize_t d = y0.shape[0]
    cdef object out = np.empty(d, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, low
    cdef long so_calls = 0, steps = 0
    cdef double step = delta * r
    cdef double s, shift, gn, scale, base

    s = 0.0
    for i in range(d):
        s += y0[i]
    shift = (1.0 - s) / d
    for i in range(d):
        y[i] = y0[i] + shift
    _clip_to_anchor_ball(y, anchor, D, d)

    while True:
        s = 0.0
        for i in range(d):
            s += y[i]
        so_calls += 1
        if fabs(s - 1.0) > INSIDE_RTOL:
            # separator along (1,..,1) has no component inside the hull
            raise IterationCapExceeded(
                "separator unusable inside aff(K): direction is normal to the "
                "sum-to-one hyperplane")
        low = 0
        for i in range(1, d):
            if y[i] < y[low]:
                low = i
        if y[low] >= -INSIDE_RTOL:
            return out, so_calls, steps
        if steps >= max_iter:
            raise IterationCapExceeded(
                f"still outside after {steps} corrective steps (delta={delta})")
        # separator -e_low projected into the hyperplane: add back its mean
        base = 1.0 / d
        gn = 0.0
        for i in range(d):
            if i == low:
                gn += (base - 1.0) * (base - 1.0)
            else:
                gn += base * base
        gn = sqrt(gn)
        if gn < DIRECTION_EPS:
            raise IterationCapExceeded("separator unusable inside aff(K)")
        scale = step / gn
        for i in range(d):
            if i == low:
                y[i] = y[i] - scale * (base - 1.0)
            else:
                y[i] = y[i] - scale * base
        steps += 1


def ipso_polytope(const double[:, ::1] normals, const double[::1] offsets,
                  const double[::1] anchor, double r, double D, double delta,
                  long max_iter, const double[::1] y0):
    cdef Py_ssize_t d = y0.shape[0]
    cdef Py_ssize_t m = normals.shape[0]
    cdef object out = np.empty(d, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, j, best
    cdef long so_calls = 0, steps = 0
    cdef double step = delta * r
    cdef double acc, excess, best_excess, gn, scale

    for i in range(d):
        y[i] = y0[i]
    _clip_to_anchor_ball(y, anchor, D, d)

    while True:
        best = 0
        best_excess = -1e300
        for j in range(m):
            acc = 0.0
            for i in range(d):
                acc += normals[j, i] * y[i]
            excess = acc - offsets[j] - INSIDE_RTOL * fmax(1.0, fabs(offsets[j]))
            if excess > best_excess:
                best_excess = excess
                best = j
        so_calls += 1
        if best_excess <= 0.0:
            return out, so_calls, steps
        if steps >= max_iter:
            raise IterationCapExceeded(
                f"still outside after {steps} corrective steps (delta={delta})")
        gn = 0.0
        for i in range(d):
            gn += normals[best, i] * normals[best, i]
        gn = sqrt(gn)
        if gn < DIRECTION_EPS:
            raise IterationCapExceeded("separator unusable inside aff(K)")
        scale = step / gn
        for i in range(d):
            y[i] = y[i] - scale * normals[best, i]
        steps += 1
