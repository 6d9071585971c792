"""Blocked online gradient descent with infeasible-projection updates.

Rounds are grouped into blocks of size K; one action is played for a whole
block and the update uses the block-averaged gradient.  The post-update point
is mapped back into the body with the separation-oracle projection, so the
learner never performs an exact projection.

Step sizes come in two flavors:

* convex:           eta_m = D / sqrt(epsilon + sum_{tau<=m} ||avg grad_tau||^2)
* strongly convex:  eta_m = 1 / (m * theta)

The floor constant epsilon defaults to 1; epsilon = 0 is legal but makes the
oracle-call budget degrade from near-linear to quadratic in the horizon, so
callers opt into it explicitly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlockOverflow, InvalidConfig
from .geometry import as_vector
from .ipso import IpsoConfig, infeasible_project
from .records import BlockRecord, RoundRecord, RunReport


@dataclass(frozen=True)
class ConvexStep:
    epsilon: float
    diameter: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidConfig("epsilon must be >= 0")
        if self.diameter <= 0:
            raise InvalidConfig("diameter must be positive")

    def eta(self, m, cumulative_sq_grad):
        s = self.epsilon + cumulative_sq_grad
        if s <= 0.0:
            return math.inf
        return self.diameter / math.sqrt(s)


@dataclass(frozen=True)
class StronglyConvexStep:
    theta: float

    def __post_init__(self):
        if self.theta <= 0:
            raise InvalidConfig("theta must be positive")

    def eta(self, m, cumulative_sq_grad):
        return 1.0 / (m * self.theta)


class BlockLearner:
    """Single-owner mutable learner state, advanced round by round.

    Independent learners may run concurrently; operations on one instance
    must not be invoked concurrently with each other.
    """

    def __init__(self, body, horizon_T, block_K, delta, rule, x1):
        if horizon_T <= 0 or block_K <= 0:
            raise InvalidConfig("horizon and block size must be positive")
        if horizon_T % block_K != 0:
            raise InvalidConfig(
                f"block size {block_K} must divide the horizon {horizon_T}"
            )
        if not 0.0 < delta < 1.0:
            raise InvalidConfig(f"delta must lie in (0, 1), got {delta}")
        x1 = as_vector(x1, body.dimension_d)
        if not body.contains(x1):
            raise InvalidConfig("initial action is outside the body")
        self.body = body
        self.horizon_T = int(horizon_T)
        self.block_K = int(block_K)
        self.delta = float(delta)
        self.rule = rule
        self.block_index_m = 1
        self.action = x1.copy()
        self.grad_sum = np.zeros(body.dimension_d)
        self.rounds_in_block = 0
        self.cumulative_sq_grad = 0.0
        self.total_so_calls = 0
        self.last_eta = math.inf

    def feed_gradient(self, grad):
        if self.rounds_in_block >= self.block_K:
            raise BlockOverflow(f"block already holds {self.block_K} gradients")
        self.grad_sum += as_vector(grad, self.body.dimension_d)
        self.rounds_in_block += 1

    def block_full(self):
        return self.rounds_in_block == self.block_K

    def end_block(self, ipso_cfg=None):
        """Average the block's gradients, step, and project back via the oracle."""
        if self.rounds_in_block != self.block_K:
            raise InvalidConfig(
                f"block has {self.rounds_in_block} of {self.block_K} gradients"
            )
        if ipso_cfg is None:
            ipso_cfg = IpsoConfig.for_body(self.body, self.delta)
        mean_grad = self.grad_sum / self.block_K
        sq = float(mean_grad @ mean_grad)
        self.cumulative_sq_grad += sq
        eta = self.rule.eta(self.block_index_m, self.cumulative_sq_grad)
        if sq == 0.0:
            tentative = self.action.copy()
        else:
            tentative = self.action - eta * mean_grad
        outcome = infeasible_project(self.body, ipso_cfg, tentative)
        record = BlockRecord(
            m=self.block_index_m,
            action=self.action,
            mean_grad=mean_grad,
            eta=eta,
            tentative=tentative,
            so_calls=outcome.so_calls,
        )
        self.total_so_calls += outcome.so_calls
        self.action = outcome.point
        self.block_index_m += 1
        self.grad_sum = np.zeros(self.body.dimension_d)
        self.rounds_in_block = 0
        self.last_eta = eta
        return record


def new_learner(body, horizon_T, block_K, delta, rule, x1):
    return BlockLearner(body, horizon_T, block_K, delta, rule, x1)


def run_oco(body, horizon_T, block_K, delta, rule, rounds, x1=None, ipso_cfg=None):
    """Drive a learner through T rounds of cost oracles and report metrics.

    `rounds` supplies eval_f/grad_f per round; the learner itself only ever
    sees gradients evaluated at its current action.
    """
    from . import evaluation

    if len(rounds) < horizon_T:
        raise InvalidConfig(f"need {horizon_T} rounds, got {len(rounds)}")
    if x1 is None:
        x1 = body.anchor_c
    learner = BlockLearner(body, horizon_T, block_K, delta, rule, x1)
    if ipso_cfg is None:
        ipso_cfg = IpsoConfig.for_body(body, delta)

    round_log = []
    block_log = []
    total_cost = 0.0
    for t in range(1, horizon_T + 1):
        oracle = rounds[t - 1]
        x = learner.action
        f_val = float(oracle.eval_f(x))
        total_cost += f_val
        learner.feed_gradient(oracle.grad_f(x))
        round_log.append(
            RoundRecord(
                t=t,
                block_m=learner.block_index_m,
                action=x,
                f_value=f_val,
                so_calls_cum=learner.total_so_calls,
                eta_current=learner.last_eta,
            )
        )
        if learner.block_full():
            block_log.append(learner.end_block(ipso_cfg))

    hind_x, hind_val = evaluation.hindsight_optimum(body, rounds[:horizon_T])
    return RunReport(
        rounds=round_log,
        blocks=block_log,
        regret=total_cost - hind_val,
        ccv=0.0,
        total_so_calls=learner.total_so_calls,
        hindsight_point=hind_x,
        hindsight_value=hind_val,
        total_cost_played=total_cost,
        params_echo={
            "algorithm": "base_ogd",
            "T": horizon_T,
            "K": block_K,
            "delta": delta,
            "rule": repr(rule),
        },
    )
