"""Command-line interface: run, tradeoff, selftest, bench."""

import argparse
import sys
import time

import numpy as np


def _load_config(path):
    from . import harness

    with open(path, encoding="utf-8") as fh:
        return harness.parse_config(fh.read())


def cmd_run(args):
    from . import harness

    cfg = _load_config(args.config)
    status, paths = harness.run_suite(cfg)
    for p in paths:
        print(p)
    return status


def cmd_tradeoff(args):
    from . import harness

    cfg = _load_config(args.config)
    status, paths = harness.emit_tradeoff_table(cfg)
    for p in paths:
        print(p)
    return status


def cmd_selftest(args):
    from . import selftest

    return 0 if selftest.run_all(verbose=True) else 1


def cmd_bench(args):
    """Time the compiled oracle-stepping kernel against the pure fallback."""
    from . import selftest
    from .ipso import HAVE_KERNELS, IpsoConfig, infeasible_project
    from .rng import CounterRng

    if not HAVE_KERNELS:
        print("compiled kernels unavailable; benchmarking the pure path only")
    rng = CounterRng(2024)
    print(f"{'geometry':<10} {'reps':>6} {'pure ms':>10} {'kernel ms':>10} {'speedup':>8}")
    for body in selftest.standard_bodies()[:5]:
        d = body.dimension_d
        queries = []
        for i in range(args.reps):
            u = rng.split(i).normals(0, d)
            queries.append(body.anchor_c + 1.5 * body.diameter_D * u / max(np.linalg.norm(u), 1e-12))
        cfg = IpsoConfig.for_body(body, args.delta)

        t0 = time.perf_counter()
        pure = [infeasible_project(body, cfg, q, use_kernel=False) for q in queries]
        t_pure = 1000.0 * (time.perf_counter() - t0)
        if HAVE_KERNELS:
            t0 = time.perf_counter()
            fast = [infeasible_project(body, cfg, q, use_kernel=True) for q in queries]
            t_fast = 1000.0 * (time.perf_counter() - t0)
            for a, b in zip(pure, fast):
                if a.so_calls != b.so_calls or not np.allclose(a.point, b.point, atol=1e-9):
                    print(f"MISMATCH on {body.kind}")
                    return 1
            print(f"{body.kind:<10} {args.reps:>6} {t_pure:>10.2f} {t_fast:>10.2f} "
                  f"{t_pure / max(t_fast, 1e-9):>7.1f}x")
        else:
            print(f"{body.kind:<10} {args.reps:>6} {t_pure:>10.2f} {'-':>10} {'-':>8}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="soco",
        description="Projection-free constrained online convex optimization benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment suite from a config file")
    p_run.add_argument("config")
    p_run.set_defaults(fn=cmd_run)

    p_tr = sub.add_parser("tradeoff", help="emit the per-beta trade-off table")
    p_tr.add_argument("config")
    p_tr.set_defaults(fn=cmd_tradeoff)

    p_st = sub.add_parser("selftest", help="run the invariant suites")
    p_st.set_defaults(fn=cmd_selftest)

    p_b = sub.add_parser("bench", help="compare compiled and pure projection loops")
    p_b.add_argument("--reps", type=int, default=200)
    p_b.add_argument("--delta", type=float, default=0.05)
    p_b.set_defaults(fn=cmd_bench)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
