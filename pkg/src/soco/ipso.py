"""Infeasible projection via a separation oracle.

Given a query point, the routine walks it back toward the body with
fixed-length steps of delta * r along (affine-hull projections of) returned
separators, stopping at the first membership certificate.  The output lands
in K and is at least as close as the input to every point of the shrunk set
K_delta; the number of oracle calls is bounded by
dist(y, K_delta)^2 / (delta^2 r^2) + 1, measured after the clipping preamble.

The preamble projects onto aff(K) and then clips into the D-ball around the
anchor (the printed clip `||y1|| / D` is taken relative to the anchor:
distances in the termination argument are anchored at c, so for bodies not
centered at the origin the anchored form is the meaningful one).

Two interchangeable implementations exist: a compiled kernel specialized to
the built-in geometries (same loop, oracle logic inlined) and a pure-Python
loop that works for any ConvexBody.  Selection happens at import; set
SOCO_PURE_PYTHON=1 to force the fallback.  Both count oracle calls
identically, and a benchmark compares them (`soco bench`).
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, InvalidConfig, InvalidDelta, IterationCapExceeded
from .geometry import as_vector

if os.environ.get("SOCO_PURE_PYTHON"):
    _core = None
else:
    try:
        from . import _ipso_core as _core
    except ImportError:
        _core = None

HAVE_KERNELS = _core is not None
_KERNEL_KINDS = ("ball", "box", "simplex", "polytope")


def default_max_iterations(body, delta):
    """Safety cap: 10x the worst-case call bound, so it only fires on bugs."""
    if delta == 0.0:
        return 16
    ratio = body.diameter_D / (delta * body.inner_radius_r)
    return int(math.ceil(10.0 * (ratio * ratio + 1.0)))


@dataclass(frozen=True)
class IpsoConfig:
    delta: float
    max_iterations: int

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise InvalidDelta(f"delta must lie in [0, 1), got {self.delta}")
        if self.max_iterations < 1:
            raise InvalidConfig("max_iterations must be positive")

    @classmethod
    def for_body(cls, body, delta, max_iterations=None):
        if max_iterations is None:
            max_iterations = default_max_iterations(body, delta)
        return cls(delta=float(delta), max_iterations=int(max_iterations))


@dataclass
class IpsoOutcome:
    point: np.ndarray
    so_calls: int
    steps_taken: int
    path: list | None = None


def kernel_supported(body):
    return HAVE_KERNELS and body.kind in _KERNEL_KINDS


def infeasible_project(body, cfg, y0, record_path=False, use_kernel=None):
    """Run the oracle-stepping loop; returns the point and call accounting.

    `record_path` keeps the full iterate trajectory (pure path only, used by
    the contract tests); `use_kernel` forces the compiled or pure route.
    """
    y0 = as_vector(y0, body.dimension_d)
    if cfg.delta > 0.0:
        need = math.ceil((body.diameter_D / (cfg.delta * body.inner_radius_r)) ** 2) + 1
        if cfg.max_iterations < need:
            raise InvalidConfig(
                f"max_iterations {cfg.max_iterations} below the guaranteed bound {need}"
            )
    if use_kernel is None:
        use_kernel = kernel_supported(body) and not record_path
    if use_kernel:
        if not kernel_supported(body):
            raise InvalidConfig("compiled kernel unavailable for this body")
        point, so_calls, steps = _run_kernel(body, cfg, y0)
        return IpsoOutcome(point=point, so_calls=so_calls, steps_taken=steps)
    return _run_pure(body, cfg, y0, record_path)


def _run_kernel(body, cfg, y0):
    kind = body.kind
    if kind == "ball":
        return _core.ipso_ball(
            body.center, body.radius, body.anchor_c, body.inner_radius_r,
            body.diameter_D, cfg.delta, cfg.max_iterations, y0,
        )
    if kind == "box":
        return _core.ipso_box(
            body.lower, body.upper, body.anchor_c, body.inner_radius_r,
            body.diameter_D, cfg.delta, cfg.max_iterations, y0,
        )
    if kind == "simplex":
        return _core.ipso_simplex(
            body.anchor_c, body.inner_radius_r, body.diameter_D,
            cfg.delta, cfg.max_iterations, y0,
        )
    return _core.ipso_polytope(
        body.normals, body.offsets, body.anchor_c, body.inner_radius_r,
        body.diameter_D, cfg.delta, cfg.max_iterations, y0,
    )


def _run_pure(body, cfg, y0, record_path):
    anchor = body.anchor_c
    D = body.diameter_D
    step = cfg.delta * body.inner_radius_r

    y = np.array(body.affine_projection(y0), dtype=np.float64, copy=True)
    dev = y - anchor
    nd = math.sqrt(float(dev @ dev))
    if nd > D:
        y = anchor + dev / (nd / D)

    path = [y.copy()] if record_path else None
    so_calls = 0
    steps = 0
    while True:
        res = body.separation_oracle(y)
        so_calls += 1
        if res.inside:
            return IpsoOutcome(point=y, so_calls=so_calls, steps_taken=steps, path=path)
        if steps >= cfg.max_iterations:
            raise IterationCapExceeded(
                f"still outside after {steps} corrective steps (delta={cfg.delta})"
            )
        try:
            gp = body.affine_direction_projection(res.separator)
        except DegenerateDirection as exc:
            raise IterationCapExceeded(f"separator unusable inside aff(K): {exc}") from exc
        gn = math.sqrt(float(gp @ gp))
        y = y - (step / gn) * gp
        steps += 1
        if record_path:
            path.append(y.copy())
