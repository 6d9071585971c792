"""Reproducible adversarial cost/constraint sequences.

Scenarios declare their Lipschitz constant M1 and strong-convexity modulus up
front, keep a designated anchor feasible for every generated constraint (so
the feasible set is never empty), and draw every random quantity from the
counter-based generator in :mod:`soco.rng`, which makes sequences
bit-identical for a given spec.

Costs are linear or isotropic-quadratic, so every round also exposes its
closed form (``quad_form``) for the hindsight machinery; constraints are
(maxima of) affine halfspaces through points beyond the anchor.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidScenario
from .geometry import as_vector
from .rng import CounterRng

KINDS = ("drifting_linear", "rotating_quadratic", "switching_halfspace", "custom")


@dataclass
class RoundOracle:
    """One round's cost and (aggregated) constraint, value + gradient."""

    eval_f: callable
    grad_f: callable
    eval_g: callable
    grad_g: callable
    declared_M1: float
    declared_theta: float = 0.0
    quad_form: tuple | None = None          # (a, w, const): f = a/2 |x|^2 + <w,x> + const
    constraint_affine: list | None = None   # [(a_i, b_i)]: g = max_i <a_i,x> - b_i


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    seed: int
    horizon_T: int
    dimension_d: int
    feasible_anchor: np.ndarray | None = None
    inactive_constraints: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidScenario(f"unknown scenario kind {self.kind!r}")
        if self.horizon_T <= 0 or self.dimension_d <= 0:
            raise InvalidScenario("horizon and dimension must be positive")


def aggregate_constraints(constraints):
    """Collapse constraint oracles into one: max value, lowest-index maximizer.

    `constraints` is a list of (eval, grad) callable pairs; ties go to the
    lowest index so runs stay reproducible.
    """
    if not constraints:
        raise InvalidScenario("need at least one constraint")
    if len(constraints) == 1:
        return constraints[0]

    def eval_g(x):
        return max(ev(x) for ev, _ in constraints)

    def grad_g(x):
        best = 0
        best_val = constraints[0][0](x)
        for i in range(1, len(constraints)):
            v = constraints[i][0](x)
            if v > best_val:
                best_val = v
                best = i
        return constraints[best][1](x)

    return eval_g, grad_g


def _project_direction(body, v):
    """Push a raw direction into aff(K) - c and normalize; None if degenerate."""
    from .errors import DegenerateDirection

    try:
        p = body.affine_direction_projection(v)
    except DegenerateDirection:
        return None
    n = float(np.linalg.norm(p))
    if n < 1e-12:
        return None
    return p / n


def _smoothed_unit_walk(body, rng, start_counter, T, d, drift):
    """Unit directions u_t wandering on the sphere (inside aff(K) - c)."""
    noise = rng.normals(start_counter, (T + 1) * d).reshape(T + 1, d)
    out = np.empty((T, d))
    u = _project_direction(body, noise[0])
    if u is None:
        u = _project_direction(body, noise[0] + 1e-3 * np.arange(1, d + 1))
    for t in range(T):
        out[t] = u
        step = _project_direction(body, noise[t + 1])
        if step is not None:
            cand = u + drift * step
            n = float(np.linalg.norm(cand))
            if n > 1e-12:
                u = cand / n
    return out


def _halfspace_constraints(body, rng_c, anchor, T, spec, margin_lo, margin_hi,
                           switch_every, n_dirs, jitter=0.0):
    """Per-round unit normals and offsets with the anchor always feasible.

    With jitter > 0 the boundary additionally slides toward the anchor by a
    fresh uniform draw each round (offset = margin * xi, xi in [0, 1]), so the
    feasible band keeps brushing the anchor and violations never die out.
    """
    d = body.dimension_d
    D = body.diameter_D
    raw = rng_c.normals(0, n_dirs * d).reshape(n_dirs, d)
    dirs = np.empty((n_dirs, d))
    for j in range(n_dirs):
        # opposite pairs: any steady cost pull along the active normal cancels
        # over a full phase cycle instead of biasing the hindsight optimum
        if j % 2 == 1:
            dirs[j] = -dirs[j - 1]
            continue
        u = _project_direction(body, raw[j])
        if u is None:
            u = _project_direction(body, raw[j] + 1e-3 * np.arange(1, d + 1))
        dirs[j] = u
    margins = margin_lo + (margin_hi - margin_lo) * rng_c.uniforms(10_000_000, n_dirs)
    idx = (np.arange(T) // switch_every) % n_dirs
    a = dirs[idx]
    if spec.inactive_constraints:
        mu = np.full(T, 2.0 * D)
    else:
        mu = margins[idx] * D
        if jitter > 0.0:
            mu = mu * (1.0 - jitter + jitter * rng_c.uniforms(11_000_000, T))
    b = a @ anchor + mu
    return a, b


def _linear_round(u, scale=1.0):
    w = scale * u

    def eval_f(x, w=w):
        return float(w @ x)

    def grad_f(x, w=w):
        return w

    return eval_f, grad_f, (0.0, w, 0.0)


def _quadratic_round(z, theta):
    w = -theta * z
    const = 0.5 * theta * float(z @ z)

    def eval_f(x, z=z, theta=theta):
        dev = x - z
        return 0.5 * theta * float(dev @ dev)

    def grad_f(x, z=z, theta=theta):
        return theta * (x - z)

    return eval_f, grad_f, (theta, w, const)


def _pinned_round(pin, kappa, v):
    """f(x) = kappa/2 |x - pin|^2 + <v, x>."""
    w = v - kappa * pin
    const = 0.5 * kappa * float(pin @ pin)

    def eval_f(x, pin=pin, kappa=kappa, v=v):
        dev = x - pin
        return 0.5 * kappa * float(dev @ dev) + float(v @ x)

    def grad_f(x, pin=pin, kappa=kappa, v=v):
        return kappa * (x - pin) + v

    return eval_f, grad_f, (kappa, w, const)


def _affine_constraint(a, b):
    def eval_g(x, a=a, b=b):
        return float(a @ x) - b

    def grad_g(x, a=a):
        return a

    return eval_g, grad_g


def generate(spec, body):
    """Produce the scenario's T round oracles; deterministic given the spec."""
    if spec.dimension_d != body.dimension_d:
        raise InvalidScenario("scenario dimension does not match the body")
    anchor = spec.feasible_anchor
    anchor = body.anchor_c.copy() if anchor is None else as_vector(anchor, body.dimension_d)
    if not body.contains(anchor):
        raise InvalidScenario("feasible anchor lies outside the body")

    T, d = spec.horizon_T, spec.dimension_d
    p = spec.params
    rng_f = CounterRng(spec.seed, stream=1)
    rng_c = CounterRng(spec.seed, stream=2)

    if spec.kind == "drifting_linear":
        u = _smoothed_unit_walk(body, rng_f, 0, T, d, drift=p.get("drift", 0.12))
        a, b = _halfspace_constraints(
            body, rng_c, anchor, T, spec,
            p.get("margin_lo", 0.05), p.get("margin_hi", 0.25),
            p.get("switch_every", 32), p.get("n_dirs", 4),
        )
        costs = [_linear_round(u[t]) for t in range(T)]
        M1, theta = 1.0, 0.0
    elif spec.kind == "rotating_quadratic":
        theta = p.get("theta", 1.0)
        reach = p.get("reach", 0.9) * body.inner_radius_r
        v = _smoothed_unit_walk(body, rng_f, 0, T, d, drift=p.get("drift", 0.2))
        radii = rng_f.uniforms(4 * (T + 1) * d, T)
        centers = anchor + reach * radii[:, None] * v
        a, b = _halfspace_constraints(
            body, rng_c, anchor, T, spec,
            p.get("margin_lo", 0.05), p.get("margin_hi", 0.25),
            p.get("switch_every", 32), p.get("n_dirs", 4),
        )
        costs = [_quadratic_round(centers[t], theta) for t in range(T)]
        M1 = theta * body.diameter_D
    elif spec.kind == "switching_halfspace":
        a, b = _halfspace_constraints(
            body, rng_c, anchor, T, spec,
            p.get("margin_lo", 0.1), p.get("margin_hi", 0.25),
            p.get("switch_every", 16), p.get("n_dirs", 4),
            jitter=p.get("jitter", 1.0),
        )
        # Quadratic pull toward the anchor plus i.i.d. linear noise and an
        # alternating push into the active constraint face.  The pull keeps
        # the iterate hovering where the jittered boundaries brush past, so
        # violations track the (shrinking) step size instead of a free random
        # walk; the noise keeps the hindsight comparator sqrt(T) ahead.
        kappa = p.get("kappa", 1.0)
        bias = p.get("cost_bias", 0.5)
        nu = p.get("cost_noise", 0.7)
        noise = rng_f.normals(0, T * d).reshape(T, d)
        norms = np.linalg.norm(noise, axis=1)
        norms[norms == 0.0] = 1.0
        costs = []
        for t in range(T):
            v = -bias * a[t] + nu * (noise[t] / norms[t])
            costs.append(_pinned_round(anchor, kappa, v))
        M1 = kappa * body.diameter_D + bias + nu
        theta = 0.0
    elif spec.kind == "custom":
        costs, M1, theta = _custom_costs(spec, body, rng_f, T, d)
        a, b = _halfspace_constraints(
            body, rng_c, anchor, T, spec,
            p.get("margin_lo", 0.05), p.get("margin_hi", 0.3),
            p.get("switch_every", 16), p.get("n_dirs", 6),
        )
    else:  # pragma: no cover - guarded by ScenarioSpec
        raise InvalidScenario(spec.kind)

    n_extra = p.get("num_constraints", 1) - 1
    rounds = []
    for t in range(T):
        eval_f, grad_f, quad = costs[t]
        pieces = [(a[t], b[t])]
        if n_extra > 0:
            off = rng_c.uniforms(20_000_000 + t * n_extra, n_extra)
            for j in range(n_extra):
                rolled = np.roll(a[t], j + 1) if d > 1 else a[t]
                pieces.append((rolled, float(rolled @ anchor) + off[j] * body.diameter_D))
        cons = [_affine_constraint(av, bv) for av, bv in pieces]
        eval_g, grad_g = aggregate_constraints(cons)
        rounds.append(
            RoundOracle(
                eval_f=eval_f, grad_f=grad_f, eval_g=eval_g, grad_g=grad_g,
                declared_M1=max(M1, 1.0), declared_theta=theta,
                quad_form=quad, constraint_affine=pieces,
            )
        )
    return rounds


def _custom_costs(spec, body, rng_f, T, d):
    """Seeded mixture of linear and quadratic rounds; optional pulsed scales."""
    p = spec.params
    pulse = p.get("pulse")
    theta_q = p.get("theta", 1.0)
    p_quad = p.get("quad_prob", 0.0 if pulse else 0.35)
    u = _smoothed_unit_walk(body, rng_f, 0, T, d, drift=p.get("drift", 0.1))
    coin = rng_f.uniforms(6 * (T + 1) * d, T)
    reach = p.get("reach", 0.8) * body.inner_radius_r
    radii = rng_f.uniforms(8 * (T + 1) * d, T)

    if pulse:
        # Three phases.  Ramp: linear costs whose scale doubles once per
        # `per_rounds` rounds from a tiny floor up to 1 (the huge dynamic
        # range is what separates the epsilon > 0 and epsilon = 0 step-size
        # floors).  Rendezvous: a pure quadratic pulls every learner to the
        # anchor so trajectories re-synchronize.  Hold: anchor-pinned
        # quadratic plus unit noise, identical costs for everyone.
        import math

        per = max(1, int(pulse.get("per_rounds", 16)))
        rate = math.log(2.0) / per
        r1 = pulse.get("ramp_frac", 0.45)
        r2 = r1 + pulse.get("rendezvous_frac", 0.10)
        kappa = pulse.get("kappa", 1.0)
        nu = pulse.get("noise", 2.0)
        anchor = body.anchor_c
        t_idx = np.arange(1, T + 1, dtype=float)
        scales = np.exp(np.minimum((t_idx - r1 * T) * rate, 0.0))
        scales = np.maximum(scales, 1e-60)
        # hold-phase noise is constant within an update block so blocked
        # averaging does not cancel it
        noise = rng_f.normals(12 * (T + 1) * d, (T // per + 2) * d).reshape(-1, d)
        norms = np.linalg.norm(noise, axis=1)
        norms[norms == 0.0] = 1.0
        costs = []
        for t in range(T):
            if t < r1 * T:
                costs.append(_linear_round(u[t], scales[t]))
            elif t < r2 * T:
                costs.append(_quadratic_round(anchor, kappa))
            else:
                j = t // per
                costs.append(_pinned_round(anchor, kappa, nu * (noise[j] / norms[j])))
        M1 = max(1.0, kappa * body.diameter_D + nu)
        return costs, M1, 0.0

    scales = p.get("scale_lo", 0.5) + (1.0 - p.get("scale_lo", 0.5)) * rng_f.uniforms(
        9 * (T + 1) * d, T
    )
    costs = []
    any_quad = False
    for t in range(T):
        if coin[t] < p_quad:
            any_quad = True
            z = body.anchor_c + reach * radii[t] * u[t]
            costs.append(_quadratic_round(z, theta_q))
        else:
            costs.append(_linear_round(u[t], scales[t]))
    M1 = max(1.0, theta_q * body.diameter_D if any_quad else 1.0)
    return costs, M1, 0.0


def scenario_constants(rounds):
    """(M1, theta) declared across a generated sequence."""
    M1 = max(r.declared_M1 for r in rounds)
    theta = min(r.declared_theta for r in rounds)
    return M1, theta
