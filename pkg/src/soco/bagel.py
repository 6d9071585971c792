"""Surrogate-cost learner for constrained online convex optimization.

Each round the constraint violation is folded into a running total Q_t and
the gradient handed to the inner blocked-OGD learner is that of

    V * (gamma f_t)  +  Phi'(Q_t) * (gamma (g_t)^+),

where Phi is a non-decreasing convex potential with Phi(0) = 0.  Q_t is
updated with the current round's violation *before* Phi' weights that same
round (the telescoping Phi(Q_t) - Phi(Q_{t-1}) <= Phi'(Q_t) dQ needs the
post-update argument), and the update is gamma-scaled, so the reported CCV
is Q_T / gamma.

Presets:

* convex:           gamma = 1/(M1 D), V = 1, Phi(q) = exp(lambda q) - 1 with
                    lambda = 1/(2 delta T + 3 sqrt(2 T K)),
                    delta = c_delta T^-beta, K ~ c_K T^(1-2 beta), beta in (0, 1/2]
* strongly convex:  gamma = 1, V = 8 M1^2 K log(T e / K) / theta, Phi(q) = q^2,
                    delta = c_delta T^-beta log T, K ~ c_K T^(1-beta), beta in (0, 1]

In the strongly-convex preset the inner learner's step modulus is V * theta:
that is the strong-convexity constant of the surrogate it actually sees.
"""

import math
from dataclasses import dataclass

from .errors import InvalidConfig, NumericOverflow
from .ipso import IpsoConfig
from .ogd import BlockLearner, ConvexStep, StronglyConvexStep
from .records import RoundRecord, RunReport


@dataclass(frozen=True)
class ExponentialPhi:
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise InvalidConfig("lambda must be positive")

    def value(self, q):
        return math.expm1(self.lam * q)

    def slope(self, q):
        x = self.lam * q
        if x > 700.0:
            raise NumericOverflow(f"potential weight exp({x:.1f}) overflows")
        return self.lam * math.exp(x)


@dataclass(frozen=True)
class SquarePhi:
    def value(self, q):
        return q * q

    def slope(self, q):
        return 2.0 * q


def lambda_for(T, K, delta):
    """Potential rate 1 / (2 delta T + 3 sqrt(2 T K)), i.e. 1/(2S)."""
    return 1.0 / (2.0 * delta * T + 3.0 * math.sqrt(2.0 * T * K))


def block_size_for(T, target):
    """Largest divisor of T not exceeding target (at least 1)."""
    k = max(1, min(int(target), T))
    while T % k != 0:
        k -= 1
    return k


@dataclass(frozen=True)
class BagelParams:
    gamma: float
    V: float
    phi: object
    beta: float
    delta: float
    block_K: int
    step_rule: object
    M1: float
    mode: str = "convex"

    def __post_init__(self):
        if self.gamma <= 0 or self.V <= 0:
            raise InvalidConfig("gamma and V must be positive")
        if not 0.0 < self.delta < 1.0:
            raise InvalidConfig(f"delta must lie in (0, 1), got {self.delta}")
        if self.block_K < 1:
            raise InvalidConfig("block size must be positive")

    @classmethod
    def convex_preset(cls, body, T, beta, M1, c_delta=1.0, c_K=1.0, epsilon=1.0):
        if not 0.0 < beta <= 0.5:
            raise InvalidConfig(f"convex mode needs beta in (0, 1/2], got {beta}")
        delta = c_delta * T ** (-beta)
        if not 0.0 < delta < 1.0:
            raise InvalidConfig(f"preset produced delta={delta}; shrink c_delta")
        K = block_size_for(T, round(c_K * T ** (1.0 - 2.0 * beta)))
        return cls(
            gamma=1.0 / (M1 * body.diameter_D),
            V=1.0,
            phi=ExponentialPhi(lambda_for(T, K, delta)),
            beta=beta,
            delta=delta,
            block_K=K,
            step_rule=ConvexStep(epsilon=epsilon, diameter=body.diameter_D),
            M1=M1,
            mode="convex",
        )

    @classmethod
    def strongly_convex_preset(cls, body, T, beta, M1, theta, c_delta=1.0, c_K=1.0):
        if not 0.0 < beta <= 1.0:
            raise InvalidConfig(f"strongly-convex mode needs beta in (0, 1], got {beta}")
        if theta <= 0:
            raise InvalidConfig("theta must be positive")
        delta = c_delta * T ** (-beta) * math.log(T)
        if not 0.0 < delta < 1.0:
            raise InvalidConfig(f"preset produced delta={delta}; shrink c_delta")
        K = block_size_for(T, round(c_K * T ** (1.0 - beta)))
        V = 8.0 * M1 * M1 * K * math.log(T * math.e / K) / theta
        return cls(
            gamma=1.0,
            V=V,
            phi=SquarePhi(),
            beta=beta,
            delta=delta,
            block_K=K,
            step_rule=StronglyConvexStep(theta=V * theta),
            M1=M1,
            mode="strongly_convex",
        )

    def echo(self):
        lam = self.phi.lam if isinstance(self.phi, ExponentialPhi) else ""
        rule = self.step_rule
        return {
            "algorithm": "bagel",
            "mode": self.mode,
            "gamma": self.gamma,
            "V": self.V,
            "phi": type(self.phi).__name__,
            "lambda": lam,
            "beta": self.beta,
            "delta": self.delta,
            "K": self.block_K,
            "epsilon": getattr(rule, "epsilon", ""),
            "theta_inner": getattr(rule, "theta", ""),
            "M1": self.M1,
        }


@dataclass
class ViolationState:
    Q_t: float = 0.0
    raw_ccv: float = 0.0

    def absorb(self, gamma, g_value):
        v = g_value if g_value > 0.0 else 0.0
        self.raw_ccv += v
        self.Q_t += gamma * v
        return self.Q_t


def surrogate_gradient(params, Q_t, grad_f, g_value, grad_g=None):
    """Gradient of V g f + Phi'(Q) g (g)^+ at the played point.

    The positive part's subgradient at g_value <= 0 is the zero vector, so
    the constraint term simply drops out there.
    """
    base = params.V * params.gamma * grad_f
    if g_value <= 0.0:
        return base
    weight = params.phi.slope(Q_t)
    return base + (weight * params.gamma) * grad_g


def scaled_cost_oracles(params, rounds):
    """Cost-only providers for V gamma f_t; used by reductions and baselines."""
    s = params.V * params.gamma

    class _Scaled:
        __slots__ = ("eval_f", "grad_f", "quad_form")

        def __init__(self, oracle):
            self.eval_f = lambda x, o=oracle: params.V * params.gamma * o.eval_f(x)
            self.grad_f = lambda x, o=oracle: params.V * params.gamma * o.grad_f(x)
            q = oracle.quad_form
            self.quad_form = None if q is None else (s * q[0], s * q[1], s * q[2])

    return [_Scaled(r) for r in rounds]


def step_round(params, learner, violation, oracle, ipso_cfg, t):
    """Advance one round: play, absorb violation, feed the surrogate gradient."""
    x = learner.action
    f_val = float(oracle.eval_f(x))
    g_val = float(oracle.eval_g(x))
    Q = violation.absorb(params.gamma, g_val)
    grad_g = oracle.grad_g(x) if g_val > 0.0 else None
    grad = surrogate_gradient(params, Q, oracle.grad_f(x), g_val, grad_g)
    learner.feed_gradient(grad)
    record = RoundRecord(
        t=t,
        block_m=learner.block_index_m,
        action=x,
        f_value=f_val,
        g_plus_value=g_val if g_val > 0.0 else 0.0,
        Q_t=Q,
        so_calls_cum=learner.total_so_calls,
        eta_current=learner.last_eta,
    )
    block_record = learner.end_block(ipso_cfg) if learner.block_full() else None
    return record, block_record


def run_coco(body, horizon_T, params, rounds, x1=None):
    """Full constrained run; returns the report with regret, CCV, call counts."""
    from . import evaluation

    if len(rounds) < horizon_T:
        raise InvalidConfig(f"need {horizon_T} rounds, got {len(rounds)}")
    if x1 is None:
        x1 = body.anchor_c
    learner = BlockLearner(body, horizon_T, params.block_K, params.delta, params.step_rule, x1)
    ipso_cfg = IpsoConfig.for_body(body, params.delta)
    violation = ViolationState()

    round_log = []
    block_log = []
    total_cost = 0.0
    for t in range(1, horizon_T + 1):
        record, block_record = step_round(params, learner, violation, rounds[t - 1], ipso_cfg, t)
        total_cost += record.f_value
        round_log.append(record)
        if block_record is not None:
            block_log.append(block_record)

    hind_x, hind_val = evaluation.hindsight_optimum(body, rounds[:horizon_T])
    return RunReport(
        rounds=round_log,
        blocks=block_log,
        regret=total_cost - hind_val,
        ccv=violation.raw_ccv,
        total_so_calls=learner.total_so_calls,
        hindsight_point=hind_x,
        hindsight_value=hind_val,
        total_cost_played=total_cost,
        Q_final=violation.Q_t,
        params_echo=params.echo() | {"T": horizon_T},
    )
