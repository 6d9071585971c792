"""Run logs and reports shared by the learners and the evaluation code."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RoundRecord:
    t: int
    block_m: int
    action: np.ndarray
    f_value: float
    g_plus_value: float = 0.0
    Q_t: float = 0.0
    so_calls_cum: int = 0
    eta_current: float = float("inf")


@dataclass
class BlockRecord:
    m: int
    action: np.ndarray          # action played during the block
    mean_grad: np.ndarray       # averaged gradient that closed the block
    eta: float                  # step size used for the closing update
    tentative: np.ndarray       # pre-correction point x_m - eta * mean_grad
    so_calls: int               # oracle calls spent correcting it


@dataclass
class RunReport:
    rounds: list
    blocks: list
    regret: float
    ccv: float
    total_so_calls: int
    hindsight_point: np.ndarray
    hindsight_value: float
    params_echo: dict = field(default_factory=dict)
    total_cost_played: float = 0.0
    Q_final: float = 0.0
    feasible_hindsight_point: np.ndarray | None = None
    feasible_hindsight_value: float | None = None

    @property
    def actions(self):
        return np.array([rec.action for rec in self.rounds])
