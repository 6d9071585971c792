"""Projection-free constrained online convex optimization via separation oracles."""

from .geometry import Ball, Box, ConvexBody, HalfspacePolytope, SeparationResult, Simplex
from .ipso import HAVE_KERNELS, IpsoConfig, IpsoOutcome, infeasible_project
from .ogd import BlockLearner, ConvexStep, StronglyConvexStep, run_oco
from .bagel import BagelParams, ExponentialPhi, SquarePhi, lambda_for, run_coco, surrogate_gradient
from .adversary import RoundOracle, ScenarioSpec, aggregate_constraints, generate
from .records import RunReport

__version__ = "0.1.0"

__all__ = [
    "Ball", "Box", "ConvexBody", "HalfspacePolytope", "SeparationResult", "Simplex",
    "HAVE_KERNELS", "IpsoConfig", "IpsoOutcome", "infeasible_project",
    "BlockLearner", "ConvexStep", "StronglyConvexStep", "run_oco",
    "BagelParams", "ExponentialPhi", "SquarePhi", "lambda_for", "run_coco",
    "surrogate_gradient",
    "RoundOracle", "ScenarioSpec", "aggregate_constraints", "generate",
    "RunReport",
    "__version__",
]
