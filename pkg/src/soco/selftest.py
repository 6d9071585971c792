"""Invariant suites behind the `soco selftest` command.

Each check returns (ok, detail); the CLI prints one PASS/FAIL line per
check.  Tests reuse the same functions at larger trial counts.
"""

import math

import numpy as np

from . import adversary, evaluation, exact, geometry, ogd
from .ipso import IpsoConfig, infeasible_project
from .rng import CounterRng


def standard_bodies():
    poly = geometry.HalfspacePolytope(
        np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0]]),
        np.array([1.0, 1.0, 1.0, 1.0, 1.5]),
    )
    return [
        geometry.Ball(np.zeros(2), 1.0),
        geometry.Ball(np.array([0.4, -0.2, 0.1]), 0.8),
        geometry.Box(np.zeros(2), np.ones(2)),
        geometry.Box(np.array([-1.0, 0.0, 2.0]), np.array([1.0, 0.5, 3.0])),
        geometry.Simplex(3),
        geometry.Simplex(4),
        poly,
    ]


def check_separator_validity(trials=1000, samples=100, seed=7):
    """Outside points get separators with <y - x, g> > 0 on sampled x in K."""
    bodies = standard_bodies()
    rng = CounterRng(seed)
    checked = 0
    for i in range(trials):
        body = bodies[i % len(bodies)]
        d = body.dimension_d
        u = rng.split(i).normals(0, d)
        scale = 0.6 + 2.0 * rng.split(i).uniforms(4 * d, 1)[0]
        y = body.anchor_c + scale * body.diameter_D * u / max(np.linalg.norm(u), 1e-12)
        res = body.separation_oracle(y)
        if res.inside:
            continue
        xs = exact.sample_inside(body, seed + i, samples)
        inner = (y - xs) @ res.separator
        if not np.all(inner > 0.0):
            return False, f"separator failed on {body.kind} trial {i}: min {inner.min()}"
        checked += 1
    return True, f"{checked} outside points, {samples} witnesses each"


def check_affine_idempotence(trials=200, seed=11):
    rng = CounterRng(seed)
    for i, body in enumerate(standard_bodies() * (trials // 7 + 1)):
        y = body.anchor_c + rng.split(i).normals(0, body.dimension_d)
        once = body.affine_projection(y)
        twice = body.affine_projection(once)
        if not np.allclose(once, twice, atol=1e-12, rtol=0.0):
            return False, f"affine projection not idempotent on {body.kind}"
        if i >= trials:
            break
    return True, f"{trials} projections"


def check_shrunk_containment(trials=300, seed=13):
    rng = CounterRng(seed)
    for i in range(trials):
        body = standard_bodies()[i % 7]
        delta = float(rng.split(i).uniforms(0, 1)[0] * 0.95)
        x = exact.sample_inside(body, seed + i, 1)[0]
        z = geometry.shrunk_member(body, delta, x)
        if not body.contains(z):
            return False, f"shrunk member escaped K on {body.kind} (delta={delta})"
    return True, f"{trials} members"


def check_ipso_contract(trials=1000, samples=50, seed=23, step_check_every=10):
    """Membership, call bound, sampled non-expansiveness, exact step length."""
    bodies = standard_bodies()
    rng = CounterRng(seed)
    worst_margin = math.inf
    for i in range(trials):
        body = bodies[i % len(bodies)]
        d = body.dimension_d
        sub = rng.split(1000 + i)
        delta = 0.02 + 0.3 * float(sub.uniforms(0, 1)[0])
        u = sub.normals(2, d)
        reach = float(sub.uniforms(1, 1)[0]) * 2.0
        y0 = body.anchor_c + reach * body.diameter_D * u / max(np.linalg.norm(u), 1e-12)
        cfg = IpsoConfig.for_body(body, delta)
        record = (i % step_check_every) == 0
        out = infeasible_project(body, cfg, y0, record_path=record, use_kernel=False if record else None)
        if not body.contains(out.point):
            return False, f"output escaped K on {body.kind} trial {i}"
        if out.so_calls != out.steps_taken + 1:
            return False, f"call accounting broken on trial {i}"
        # call bound, measured from the clipped start
        start = out.path[0] if record else _clipped_start(body, y0)
        dist = geometry.distance_to_shrunk(body, delta, start)
        bound = dist * dist / (delta * body.inner_radius_r) ** 2 + 1.0
        if out.so_calls > bound + 1e-9:
            return False, f"call bound violated on {body.kind}: {out.so_calls} > {bound:.3f}"
        # sampled non-expansiveness toward K_delta
        xs = exact.sample_inside(body, seed + i, samples, delta=delta)
        d_new = np.linalg.norm(xs - out.point, axis=1)
        d_old = np.linalg.norm(xs - y0, axis=1)
        margin = float(np.min(d_old - d_new))
        worst_margin = min(worst_margin, margin)
        if margin < -1e-9:
            return False, f"expansion toward K_delta on {body.kind}: {margin}"
        if record:
            step = delta * body.inner_radius_r
            for a, b in zip(out.path, out.path[1:]):
                if abs(float(np.linalg.norm(b - a)) - step) > 1e-12:
                    return False, f"step length drifted on {body.kind}"
    return True, f"{trials} trials, worst non-expansiveness margin {worst_margin:.2e}"


def _clipped_start(body, y0):
    y = body.affine_projection(y0)
    dev = y - body.anchor_c
    nd = float(np.linalg.norm(dev))
    if nd > body.diameter_D:
        y = body.anchor_c + dev / (nd / body.diameter_D)
    return y


def check_orabona_summation(sequences=10_000, max_len=40, seed=31):
    """sum a_t f(a_0 + prefix_t) <= integral of f over [a_0, a_0 + sum a_t]
    for non-increasing f; checked for f = 1/sqrt(x) and f = 1/x."""
    rng = CounterRng(seed)
    lens = (rng.uniforms(0, sequences) * (max_len - 1) + 1).astype(int)
    worst = math.inf
    for i in range(sequences):
        sub = rng.split(i + 1)
        n = int(lens[i])
        a = sub.uniforms(0, n + 1) * 3.0
        a0 = float(a[0]) + 1e-6
        seq = a[1:]
        prefix = a0 + np.cumsum(seq)
        total = float(prefix[-1])
        lhs_sqrt = float(np.sum(seq / np.sqrt(prefix)))
        rhs_sqrt = 2.0 * math.sqrt(total) - 2.0 * math.sqrt(a0)
        lhs_inv = float(np.sum(seq / prefix))
        rhs_inv = math.log(total) - math.log(a0)
        worst = min(worst, rhs_sqrt - lhs_sqrt, rhs_inv - lhs_inv)
        if lhs_sqrt > rhs_sqrt + 1e-9 or lhs_inv > rhs_inv + 1e-9:
            return False, f"summation bound violated on sequence {i}"
    return True, f"{sequences} sequences, min slack {worst:.2e}"


def check_regret_certificates(n_scenarios=50, seed=41):
    """Realized linearized regret vs (3/2) D K sqrt(sum ||avg grad||^2)."""
    rng = CounterRng(seed)
    worst = math.inf
    for i in range(n_scenarios):
        sub = rng.split(i)
        body = standard_bodies()[i % 4]  # full-dimensional bodies keep it quick
        T = int(64 * (1 + int(sub.uniforms(0, 1)[0] * 3)))
        K = [1, 2, 4, 8][i % 4]
        delta = 0.02 + 0.2 * float(sub.uniforms(1, 1)[0])
        spec = adversary.ScenarioSpec(
            kind="custom", seed=seed + i, horizon_T=T, dimension_d=body.dimension_d,
        )
        rounds = adversary.generate(spec, body)
        rule = ogd.ConvexStep(epsilon=1.0, diameter=body.diameter_D)
        report = ogd.run_oco(body, T, K, delta, rule, rounds)
        cert = evaluation.regret_certificate(report, body)
        worst = min(worst, cert["margin"])
        if cert["realized"] > cert["bound"] + 1e-6:
            return False, f"certificate violated on scenario {i}: {cert}"
    return True, f"{n_scenarios} scenarios, min bound slack {worst:.3e}"


def check_adversary_honesty(samples=10_000, seed=53):
    """Declared M1 bound and convexity midpoint inequality on random draws."""
    body = geometry.Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
    for ik, kind in enumerate(adversary.KINDS):
        spec = adversary.ScenarioSpec(kind=kind, seed=seed, horizon_T=64, dimension_d=2,
                                      params={"theta": 0.7} if kind != "custom" else {})
        rounds = adversary.generate(spec, body)
        M1 = max(r.declared_M1 for r in rounds)
        rng = CounterRng(seed + 1000 * ik)
        n = samples // len(adversary.KINDS)
        ts = (rng.uniforms(0, n) * len(rounds)).astype(int)
        xs = exact.sample_inside(body, seed, n)
        ys = exact.sample_inside(body, seed + 1, n)
        for j in range(n):
            r = rounds[int(ts[j])]
            x, y = xs[j], ys[j]
            if np.linalg.norm(r.grad_f(x)) > M1 + 1e-9 or np.linalg.norm(r.grad_g(x)) > M1 + 1e-9:
                return False, f"{kind}: gradient bound broken"
            mid = 0.5 * (x + y)
            if r.eval_f(mid) > 0.5 * (r.eval_f(x) + r.eval_f(y)) + 1e-9:
                return False, f"{kind}: cost not midpoint-convex"
            if r.eval_g(mid) > 0.5 * (r.eval_g(x) + r.eval_g(y)) + 1e-9:
                return False, f"{kind}: constraint not midpoint-convex"
            anchor_violation = r.eval_g(body.anchor_c)
            if anchor_violation > 1e-12:
                return False, f"{kind}: anchor infeasible ({anchor_violation})"
    return True, f"{samples} samples across {len(adversary.KINDS)} kinds"


ALL_CHECKS = [
    ("separator_validity", check_separator_validity),
    ("affine_idempotence", check_affine_idempotence),
    ("shrunk_containment", check_shrunk_containment),
    ("ipso_contract", check_ipso_contract),
    ("orabona_summation", check_orabona_summation),
    ("regret_certificates", check_regret_certificates),
    ("adversary_honesty", check_adversary_honesty),
]


def run_all(verbose=True):
    ok_all = True
    for name, fn in ALL_CHECKS:
        ok, detail = fn()
        ok_all &= ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return ok_all
