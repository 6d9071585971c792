"""Hindsight optima, certificates, scaling fits, and a projection baseline.

Exact projections live here (via :mod:`soco.exact`) and are never called
from the learner modules; regret is reported against the minimizer of the
summed costs over K, while the surrogate-decomposition certificate uses a
point that additionally satisfies every round's constraint (the inequality
it checks needs a feasible comparator).  Both points are computed and
labeled separately.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import exact
from .errors import DegenerateFit, InfeasibleCertificate, InvalidConfig, Unsupported
from .records import RoundRecord, RunReport

_FEAS_TOL = 1e-9


# ---------------------------------------------------------------------------
# hindsight optima


def _aggregate_quad(rounds):
    """Sum the per-round closed forms a/2 |x|^2 + <w, x> + c, if all exist."""
    if any(r.quad_form is None for r in rounds):
        return None
    A = sum(r.quad_form[0] for r in rounds)
    W = np.sum([r.quad_form[1] for r in rounds], axis=0)
    C = sum(r.quad_form[2] for r in rounds)
    return A, W, C


def _total_cost(rounds, x):
    return float(sum(r.eval_f(x) for r in rounds))


def _greedy_descent(body, value, grad, x0, max_iter=600):
    """Projected descent with multiplicative step adaptation; test-scale tool."""
    x = x0.copy()
    fx = value(x)
    step = body.diameter_D
    best_x, best_f = x.copy(), fx
    for _ in range(max_iter):
        g = grad(x)
        n = float(np.linalg.norm(g))
        if n < 1e-14 or step < 1e-10 * body.diameter_D:
            break
        cand = exact.exact_project(body, x - (step / n) * g)
        fc = value(cand)
        if fc < fx:
            x, fx = cand, fc
            step = min(step * 1.4, body.diameter_D)
            if fx < best_f:
                best_x, best_f = x.copy(), fx
        else:
            step *= 0.5
    return best_x, best_f


def hindsight_optimum(body, rounds):
    """Minimizer of the summed costs over K; exact for the built-in cost forms."""
    if not rounds:
        raise InvalidConfig("need at least one round")
    agg = _aggregate_quad(rounds)
    if agg is not None:
        A, W, _ = agg
        if A > 0.0:
            x = exact.exact_project(body, -W / A)
        else:
            x = exact.support_argmin(body, W)
    else:
        def value(p):
            return _total_cost(rounds, p)

        def grad(p):
            return np.sum([r.grad_f(p) for r in rounds], axis=0)

        x, _ = _greedy_descent(body, value, grad, body.anchor_c)
    return x, _total_cost(rounds, x)


def _dedup_constraints(rounds):
    """Unique affine pieces, keeping the tightest offset per direction."""
    pieces = {}
    for r in rounds:
        if r.constraint_affine is None:
            return None
        for a, b in r.constraint_affine:
            key = tuple(np.round(a, 12))
            if key not in pieces or b < pieces[key][1]:
                pieces[key] = (a, b)
    return list(pieces.values())


def _max_violation(rounds, x):
    return max(float(r.eval_g(x)) for r in rounds)


def _restore_toward(rounds, x, anchor):
    """Smallest slide toward the anchor that clears every constraint."""
    s_need = 0.0
    for r in rounds:
        gx = float(r.eval_g(x))
        if gx > 0.0:
            ga = float(r.eval_g(anchor))
            if ga >= gx:
                raise InfeasibleCertificate("anchor does not dominate a violated constraint")
            s_need = max(s_need, gx / (gx - ga))
    if s_need == 0.0:
        return x
    s = min(1.0, s_need * (1.0 + 1e-9) + 1e-12)
    return x + s * (anchor - x)


def feasible_hindsight_optimum(body, rounds, anchor=None):
    """Minimizer of the summed costs over {x in K : g_t(x) <= 0 for all t}.

    Uses exact projection plus Dykstra over the (deduplicated) constraint
    halfspaces, then a feasibility-restoring slide toward the anchor; the
    result is certified against all T constraints before it is returned.
    """
    if anchor is None:
        anchor = body.anchor_c
    if _max_violation(rounds, anchor) > _FEAS_TOL:
        raise InfeasibleCertificate("designated anchor violates a constraint")
    x0, v0 = hindsight_optimum(body, rounds)
    if _max_violation(rounds, x0) <= _FEAS_TOL:
        return x0, v0

    pieces = _dedup_constraints(rounds)
    agg = _aggregate_quad(rounds)

    def feas_project(y):
        if pieces is None:
            return exact.exact_project(body, y)
        return _dykstra_body_halfspaces(body, pieces, y)

    if agg is not None and pieces is not None and agg[0] > 0.0:
        x = feas_project(-agg[1] / agg[0])
    else:
        def value(p):
            return _total_cost(rounds, p)

        def grad(p):
            return np.sum([r.grad_f(p) for r in rounds], axis=0)

        x = _restore_toward(rounds, exact.exact_project(body, x0), anchor)
        fx = value(x)
        step = body.diameter_D
        for _ in range(400):
            g = grad(x)
            n = float(np.linalg.norm(g))
            if n < 1e-14 or step < 1e-9 * body.diameter_D:
                break
            cand = feas_project(x - (step / n) * g)
            cand = _restore_toward(rounds, cand, anchor)
            fc = value(cand)
            if fc < fx:
                x, fx = cand, fc
                step = min(step * 1.4, body.diameter_D)
            else:
                step *= 0.5

    x = _restore_toward(rounds, exact.exact_project(body, x), anchor)
    if _max_violation(rounds, x) > _FEAS_TOL:
        raise InfeasibleCertificate("feasibility restoration failed")
    return x, _total_cost(rounds, x)


def _dykstra_body_halfspaces(body, pieces, y, cycles=3000, tol=1e-11):
    """Dykstra's projections onto K intersected with affine halfspaces."""
    A = np.array([a for a, _ in pieces])
    b = np.array([bb for _, bb in pieces])
    norms = np.linalg.norm(A, axis=1)
    x = y.copy()
    corr = [np.zeros_like(y) for _ in range(len(pieces) + 1)]
    for _ in range(cycles):
        shift = 0.0
        z = x + corr[0]
        newx = exact.exact_project(body, z)
        corr[0] = z - newx
        shift = max(shift, float(np.max(np.abs(newx - x))))
        x = newx
        for i in range(len(pieces)):
            z = x + corr[i + 1]
            viol = float(A[i] @ z - b[i])
            newx = z - (viol / (norms[i] ** 2)) * A[i] if viol > 0.0 else z
            corr[i + 1] = z - newx
            shift = max(shift, float(np.max(np.abs(newx - x))))
            x = newx
        if shift < tol:
            break
    return x


# ---------------------------------------------------------------------------
# certificates


def regret_certificate(report, body):
    """Realized linearized regret against the shrunk hindsight point vs. the
    adaptive-step telescoping bound (3/2) D K sqrt(sum ||avg grad||^2)."""
    delta = report.params_echo["delta"]
    K = report.params_echo["K"]
    xs = (1.0 - delta) * report.hindsight_point + delta * body.anchor_c
    realized = 0.0
    sq = 0.0
    for blk in report.blocks:
        realized += K * float(blk.mean_grad @ (blk.action - xs))
        sq += float(blk.mean_grad @ blk.mean_grad)
    bound = 1.5 * body.diameter_D * K * math.sqrt(sq)
    return {"realized": realized, "bound": bound, "margin": bound - realized}


def surrogate_certificate(report, body, rounds, params, anchor=None):
    """Realized R(surrogate) - V R(scaled cost) - Phi(Q_T) at a feasible point.

    Both regrets are measured against the same certified-feasible comparator;
    the decomposition inequality says the result is >= 0 up to float noise.
    """
    xs, _ = feasible_hindsight_optimum(body, rounds, anchor)
    g_at_xs = np.array([max(float(r.eval_g(xs)), 0.0) for r in rounds])
    f_at_xs = np.array([float(r.eval_f(xs)) for r in rounds])
    R_hat = 0.0
    R_tilde = 0.0
    for rec, f_s, g_s in zip(report.rounds, f_at_xs, g_at_xs):
        w = params.phi.slope(rec.Q_t)
        hat_played = params.V * params.gamma * rec.f_value + w * params.gamma * rec.g_plus_value
        hat_star = params.V * params.gamma * f_s + w * params.gamma * g_s
        R_hat += hat_played - hat_star
        R_tilde += params.gamma * (rec.f_value - f_s)
    phi_QT = params.phi.value(report.Q_final)
    return {
        "R_hat": R_hat,
        "R_tilde": R_tilde,
        "phi_QT": phi_QT,
        "margin": R_hat - params.V * R_tilde - phi_QT,
        "feasible_point": xs,
    }


# ---------------------------------------------------------------------------
# projection baseline


def projection_baseline_run(body, horizon_T, rounds, params, x1=None):
    """Same surrogate construction, but exact Euclidean projection instead of
    the separation-oracle loop; so_calls counts projection invocations."""
    from .bagel import surrogate_gradient

    if body.kind == "custom":
        raise Unsupported("baseline needs a geometry with an exact projection")
    if x1 is None:
        x1 = body.anchor_c
    x = x1.copy()
    K = params.block_K
    rule = params.step_rule
    d = body.dimension_d
    grad_sum = np.zeros(d)
    m = 1
    cum_sq = 0.0
    Q = 0.0
    raw_ccv = 0.0
    proj_calls = 0
    eta = math.inf
    total_cost = 0.0
    round_log = []
    for t in range(1, horizon_T + 1):
        oracle = rounds[t - 1]
        f_val = float(oracle.eval_f(x))
        g_val = float(oracle.eval_g(x))
        v = g_val if g_val > 0.0 else 0.0
        raw_ccv += v
        Q += params.gamma * v
        grad_g = oracle.grad_g(x) if g_val > 0.0 else None
        grad_sum += surrogate_gradient(params, Q, oracle.grad_f(x), g_val, grad_g)
        total_cost += f_val
        round_log.append(
            RoundRecord(t=t, block_m=m, action=x, f_value=f_val,
                        g_plus_value=v, Q_t=Q, so_calls_cum=proj_calls, eta_current=eta)
        )
        if t % K == 0:
            mean_grad = grad_sum / K
            sq = float(mean_grad @ mean_grad)
            cum_sq += sq
            eta = rule.eta(m, cum_sq)
            tentative = x.copy() if sq == 0.0 else x - eta * mean_grad
            x = exact.exact_project(body, tentative)
            proj_calls += 1
            m += 1
            grad_sum = np.zeros(d)

    hind_x, hind_val = hindsight_optimum(body, rounds[:horizon_T])
    return RunReport(
        rounds=round_log,
        blocks=[],
        regret=total_cost - hind_val,
        ccv=raw_ccv,
        total_so_calls=proj_calls,
        hindsight_point=hind_x,
        hindsight_value=hind_val,
        total_cost_played=total_cost,
        Q_final=Q,
        params_echo=params.echo() | {"T": horizon_T, "algorithm": "projection_baseline"},
    )


# ---------------------------------------------------------------------------
# scaling fits


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    substituted: bool = False


_METRIC_ATTR = {"regret": "regret", "ccv": "ccv", "so_calls": "total_so_calls"}


def fit_scaling(reports_by_T, metric):
    """Least-squares fit of log(mean metric) against log T.

    Accepts RunReports or plain numbers per horizon.  A non-positive mean is
    DegenerateFit, except that CCV falls back to fitting (mean + 1): CCV can
    legitimately be zero and the +1 keeps the fit defined.
    """
    metric = metric.lower()
    if metric not in _METRIC_ATTR:
        raise InvalidConfig(f"unknown metric {metric!r}")
    Ts = sorted(reports_by_T)
    if len(Ts) < 2:
        raise DegenerateFit("need at least two horizons")
    means = []
    for T in Ts:
        vals = [
            getattr(r, _METRIC_ATTR[metric]) if isinstance(r, RunReport) else float(r)
            for r in reports_by_T[T]
        ]
        means.append(float(np.mean(vals)))
    substituted = False
    if any(mv <= 0.0 for mv in means):
        if metric == "ccv":
            means = [mv + 1.0 for mv in means]
            substituted = True
        else:
            raise DegenerateFit(f"non-positive mean {metric}; cannot take logs")
    lx = np.log(np.asarray(Ts, dtype=float))
    ly = np.log(np.asarray(means))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(float(slope), float(intercept), r2, substituted)


# ---------------------------------------------------------------------------
# cross-checks and report consistency


def grid_refine_minimum(body, value, levels=7, width=41):
    """Brute-force minimum of `value` over K for d <= 2 (grid + refinement)."""
    if body.dimension_d > 2:
        raise Unsupported("grid search is for d <= 2 only")
    lo = body.anchor_c - body.diameter_D
    hi = body.anchor_c + body.diameter_D
    best_x, best_v = None, math.inf
    for _ in range(levels):
        axes = [np.linspace(lo[i], hi[i], width) for i in range(body.dimension_d)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, body.dimension_d)
        for p in mesh:
            q = exact.exact_project(body, p)
            v = value(q)
            if v < best_v:
                best_v, best_x = v, q
        span = (hi - lo) * (2.5 / width)
        lo = best_x - span
        hi = best_x + span
    return best_x, best_v


def recompute_metrics(report):
    """Regret and CCV recomputed from the per-round log."""
    total_cost = sum(rec.f_value for rec in report.rounds)
    ccv = sum(rec.g_plus_value for rec in report.rounds)
    return total_cost - report.hindsight_value, ccv
