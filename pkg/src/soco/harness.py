"""Config-driven experiment suites with CSV output.

Configs are flat ``key=value`` lines with ``#`` comments.  Example::

    algorithm = bagel
    mode = convex
    geometry = ball d=2 radius=1
    scenario = switching_halfspace
    horizons = 1024,2048,4096
    seeds = 1,2,3,4,5
    beta = 0.5

Scenario knobs use the ``scenario_`` prefix (e.g. ``scenario_switch_every=24``)
and are forwarded verbatim to the adversary.  Every run is deterministic
given its config; data rows are byte-identical across reruns except for the
``runtime_ms`` column.  The ``SOCO_OUTPUT_DIR`` environment variable
overrides ``output_dir``.
"""

import csv
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import adversary, bagel, evaluation, ogd
from .errors import ConfigError, SocoError
from .geometry import Ball, Box, HalfspacePolytope, Simplex

ALGORITHMS = ("bagel", "base_ogd", "projection_baseline")
MODES = ("convex", "strongly_convex")

ROW_COLUMNS = [
    "T", "K", "delta", "beta", "seed", "regret", "ccv", "so_calls",
    "hindsight_value", "runtime_ms", "status", "algorithm", "mode",
    "scenario", "geometry", "gamma", "V", "lambda", "epsilon", "theta", "M1",
    "c_delta", "c_K",
]


@dataclass
class ExperimentConfig:
    algorithm: str = "bagel"
    mode: str = "convex"
    geometry: str = "ball d=2 radius=1"
    scenario: str = "switching_halfspace"
    horizons: tuple = ()
    seeds: tuple = ()
    beta: float | None = None
    beta_list: tuple = ()
    c_delta: float = 1.0
    c_K: float = 1.0
    epsilon: float = 1.0
    theta: float = 1.0
    M1_override: float | None = None
    inactive_constraints: bool = False
    scenario_params: dict = field(default_factory=dict)
    output_dir: str = "out"
    label: str = "suite"


_FLOAT_KEYS = {"beta", "c_delta", "c_k", "epsilon", "theta", "m1_override"}
_LIST_KEYS = {"horizons", "seeds", "beta_list"}


def parse_config(text):
    """Parse the line-oriented config format; raises ConfigError with location."""
    cfg = ExperimentConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected key=value", line=lineno)
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if key in seen:
            raise ConfigError("duplicate key", key=key, line=lineno)
        seen.add(key)
        try:
            _apply_key(cfg, key, value)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"bad value {value!r}: {exc}", key=key, line=lineno) from exc
    _validate(cfg)
    return cfg


def _apply_key(cfg, key, value):
    if key == "algorithm":
        if value not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}", key=key)
        cfg.algorithm = value
    elif key == "mode":
        if value not in MODES:
            raise ConfigError(f"mode must be one of {MODES}", key=key)
        cfg.mode = value
    elif key == "geometry":
        build_geometry(value)  # fail fast
        cfg.geometry = value
    elif key == "scenario":
        if value not in adversary.KINDS:
            raise ConfigError(f"scenario must be one of {adversary.KINDS}", key=key)
        cfg.scenario = value
    elif key == "horizons":
        cfg.horizons = tuple(int(v) for v in value.split(",") if v.strip())
    elif key == "seeds":
        cfg.seeds = tuple(int(v) for v in value.split(",") if v.strip())
    elif key == "beta":
        cfg.beta = float(value)
    elif key == "beta_list":
        cfg.beta_list = tuple(float(v) for v in value.split(",") if v.strip())
    elif key == "c_delta":
        cfg.c_delta = float(value)
    elif key == "c_k":
        cfg.c_K = float(value)
    elif key == "epsilon":
        cfg.epsilon = float(value)
    elif key == "theta":
        cfg.theta = float(value)
    elif key == "m1_override":
        cfg.M1_override = float(value) if value else None
    elif key == "inactive_constraints":
        cfg.inactive_constraints = value.lower() in ("1", "true", "yes")
    elif key == "output_dir":
        cfg.output_dir = value
    elif key == "label":
        cfg.label = value
    elif key.startswith("scenario_"):
        name = key[len("scenario_"):]
        try:
            parsed = int(value)
        except ValueError:
            try:
                parsed = float(value)
            except ValueError:
                parsed = value
        cfg.scenario_params[name] = parsed
    else:
        raise ConfigError("unknown key", key=key)


def _validate(cfg):
    if not cfg.horizons:
        raise ConfigError("missing horizons", key="horizons")
    if not cfg.seeds:
        raise ConfigError("missing or empty seeds", key="seeds")
    if cfg.beta is None and not cfg.beta_list:
        raise ConfigError("missing beta (or beta_list)", key="beta")
    betas = list(cfg.beta_list) or [cfg.beta]
    hi = 0.5 if cfg.mode == "convex" else 1.0
    for b in betas:
        if not 0.0 < b <= hi:
            raise ConfigError(f"beta must lie in (0, {hi}] for {cfg.mode} mode", key="beta")
    if any(T <= 0 for T in cfg.horizons):
        raise ConfigError("horizons must be positive", key="horizons")


def format_config(cfg):
    """Inverse of parse_config for the round-trip contract."""
    lines = [
        f"algorithm={cfg.algorithm}",
        f"mode={cfg.mode}",
        f"geometry={cfg.geometry}",
        f"scenario={cfg.scenario}",
        "horizons=" + ",".join(str(t) for t in cfg.horizons),
        "seeds=" + ",".join(str(s) for s in cfg.seeds),
    ]
    if cfg.beta is not None:
        lines.append(f"beta={cfg.beta}")
    if cfg.beta_list:
        lines.append("beta_list=" + ",".join(repr(b) for b in cfg.beta_list))
    lines += [
        f"c_delta={cfg.c_delta}",
        f"c_k={cfg.c_K}",
        f"epsilon={cfg.epsilon}",
        f"theta={cfg.theta}",
    ]
    if cfg.M1_override is not None:
        lines.append(f"m1_override={cfg.M1_override}")
    if cfg.inactive_constraints:
        lines.append("inactive_constraints=true")
    for k, v in sorted(cfg.scenario_params.items()):
        lines.append(f"scenario_{k}={v}")
    lines.append(f"output_dir={cfg.output_dir}")
    lines.append(f"label={cfg.label}")
    return "\n".join(lines) + "\n"


def build_geometry(text):
    """Construct a body from tokens like 'ball d=2 radius=1'."""
    tokens = text.split()
    if not tokens:
        raise ConfigError("empty geometry", key="geometry")
    kind, opts = tokens[0], {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ConfigError(f"geometry token {tok!r} is not key=value", key="geometry")
        k, v = tok.split("=", 1)
        opts[k] = v
    try:
        d = int(opts.get("d", 2))
        if kind == "ball":
            center = float(opts.get("center", 0.0)) * np.ones(d)
            return Ball(center, float(opts.get("radius", 1.0)))
        if kind == "box":
            lo = float(opts.get("lower", 0.0)) * np.ones(d)
            hi = float(opts.get("upper", 1.0)) * np.ones(d)
            return Box(lo, hi)
        if kind == "simplex":
            return Simplex(d)
        if kind == "polygon":
            sides = int(opts.get("sides", 6))
            radius = float(opts.get("radius", 1.0))
            ang = 2.0 * np.pi * np.arange(sides) / sides
            normals = np.stack([np.cos(ang), np.sin(ang)], axis=1)
            return HalfspacePolytope(normals, radius * np.ones(sides))
    except ConfigError:
        raise
    except SocoError as exc:
        raise ConfigError(f"bad geometry: {exc}", key="geometry") from exc
    raise ConfigError(f"unknown geometry kind {kind!r}", key="geometry")


def _scenario_spec(cfg, body, T, seed):
    params = dict(cfg.scenario_params)
    if cfg.scenario == "rotating_quadratic":
        params.setdefault("theta", cfg.theta)
    return adversary.ScenarioSpec(
        kind=cfg.scenario,
        seed=seed,
        horizon_T=T,
        dimension_d=body.dimension_d,
        inactive_constraints=cfg.inactive_constraints,
        params=params,
    )


def make_params(cfg, body, T, M1, beta=None):
    beta = cfg.beta if beta is None else beta
    if cfg.mode == "convex":
        return bagel.BagelParams.convex_preset(
            body, T, beta, M1, c_delta=cfg.c_delta, c_K=cfg.c_K, epsilon=cfg.epsilon
        )
    return bagel.BagelParams.strongly_convex_preset(
        body, T, beta, M1, cfg.theta, c_delta=cfg.c_delta, c_K=cfg.c_K
    )


def run_cell(cfg, T, seed, beta=None):
    """One (T, seed) cell: returns (row dict, report)."""
    body = build_geometry(cfg.geometry)
    spec = _scenario_spec(cfg, body, T, seed)
    rounds = adversary.generate(spec, body)
    M1, _ = adversary.scenario_constants(rounds)
    if cfg.M1_override is not None:
        M1 = cfg.M1_override
    params = make_params(cfg, body, T, M1, beta)

    start = time.perf_counter()
    if cfg.algorithm == "bagel":
        report = bagel.run_coco(body, T, params, rounds)
    elif cfg.algorithm == "projection_baseline":
        report = evaluation.projection_baseline_run(body, T, rounds, params)
    else:
        # plain blocked OGD on the raw costs; constraints are ignored
        rule = params.step_rule
        if cfg.mode == "strongly_convex":
            rule = ogd.StronglyConvexStep(cfg.theta)
        report = ogd.run_oco(body, T, params.block_K, params.delta, rule, rounds)
    runtime_ms = 1000.0 * (time.perf_counter() - start)

    echo = params.echo()
    row = {
        "T": T,
        "K": params.block_K,
        "delta": repr(params.delta),
        "beta": repr(params.beta),
        "seed": seed,
        "regret": repr(report.regret),
        "ccv": repr(report.ccv),
        "so_calls": report.total_so_calls,
        "hindsight_value": repr(report.hindsight_value),
        "runtime_ms": f"{runtime_ms:.3f}",
        "status": "ok",
        "algorithm": cfg.algorithm,
        "mode": cfg.mode,
        "scenario": cfg.scenario,
        "geometry": cfg.geometry,
        "gamma": repr(echo["gamma"]),
        "V": repr(echo["V"]),
        "lambda": repr(echo["lambda"]) if echo["lambda"] != "" else "",
        "epsilon": echo["epsilon"],
        "theta": echo["theta_inner"],
        "M1": repr(float(M1)),
        "c_delta": cfg.c_delta,
        "c_K": cfg.c_K,
    }
    return row, report


def _out_dir(cfg):
    path = os.environ.get("SOCO_OUTPUT_DIR", cfg.output_dir)
    os.makedirs(path, exist_ok=True)
    return path


def _write_rows(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=ROW_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_suite(cfg):
    """All (T, seed) cells plus a slope-fit summary; returns (status, paths)."""
    out = _out_dir(cfg)
    rows = []
    reports_by_T = {T: [] for T in cfg.horizons}
    status = 0
    for T in cfg.horizons:
        for seed in cfg.seeds:
            try:
                row, report = run_cell(cfg, T, seed)
                rows.append(row)
                reports_by_T[T].append(report)
            except SocoError as exc:
                rows.append({"T": T, "seed": seed, "status": f"error:{type(exc).__name__}"})
                status = 1
    rows_path = os.path.join(out, f"{cfg.label}_rows.csv")
    _write_rows(rows_path, rows)

    summary_path = os.path.join(out, f"{cfg.label}_summary.csv")
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "slope", "intercept", "r_squared", "substituted"])
        if status == 0 and len(cfg.horizons) >= 2:
            for metric in ("regret", "ccv", "so_calls"):
                try:
                    fit = evaluation.fit_scaling(reports_by_T, metric)
                    writer.writerow([metric, repr(fit.slope), repr(fit.intercept),
                                     repr(fit.r_squared), fit.substituted])
                except SocoError as exc:
                    writer.writerow([metric, "", "", "", f"error:{type(exc).__name__}"])
    return status, [rows_path, summary_path]


def emit_tradeoff_table(cfg):
    """Per-beta metrics at a fixed horizon, with the theoretical exponents."""
    if len(cfg.beta_list) < 2:
        raise ConfigError("tradeoff needs at least two betas", key="beta_list")
    if len(cfg.horizons) != 1:
        raise ConfigError("tradeoff uses exactly one horizon", key="horizons")
    T = cfg.horizons[0]
    out = _out_dir(cfg)
    path = os.path.join(out, f"{cfg.label}_tradeoff.csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "beta", "T", "K", "delta", "mean_regret", "mean_ccv", "mean_so_calls",
            "regret_exponent_theory", "so_calls_exponent_theory",
        ])
        for beta in cfg.beta_list:
            regs, ccvs, calls, K, delta = [], [], [], None, None
            for seed in cfg.seeds:
                row, report = run_cell(cfg, T, seed, beta=beta)
                regs.append(report.regret)
                ccvs.append(report.ccv)
                calls.append(report.total_so_calls)
                K, delta = row["K"], row["delta"]
            writer.writerow([
                repr(beta), T, K, delta,
                repr(float(np.mean(regs))), repr(float(np.mean(ccvs))),
                repr(float(np.mean(calls))),
                repr(1.0 - beta), repr(2.0 * beta),
            ])
    return 0, [path]
