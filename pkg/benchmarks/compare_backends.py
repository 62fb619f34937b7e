"""Timing comparison of the numba and pure-numpy kernel backends.

The kernel module compiles its hot functions with numba unless
QPAIR_PURE_NUMPY=1 is set before import, so each backend runs in its own
subprocess over identical seeded workloads: raw objective evaluations,
single-weight feasibility solves, and a small end-to-end ls_optimize.
Workload values are printed next to the timings.  The backends run the
same source; bisection outputs match exactly, while values fed by raw
eigensolver margins can differ in the last ulp.

Usage: python benchmarks/compare_backends.py [--scale N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads(scale: int) -> dict:
    import numpy as np

    from qpair import (
        Rank2Params,
        RankTwo,
        Werner,
        construct_family,
        ls_optimize,
        pure_projector,
        to_density_matrix,
    )
    from qpair import _kernels

    rho4 = to_density_matrix(construct_family(Werner(0.8)))
    rrho4 = _kernels.reflect4(rho4)
    eye4 = np.eye(4, dtype=complex)
    rng = np.random.default_rng(0)
    thetas = [
        np.concatenate([rng.uniform(0.0, np.pi / 2, 3), rng.uniform(-np.pi, np.pi, 3)])
        for _ in range(15 * scale)
    ]
    # perturbed singlet angles keep some evaluations on the feasible
    # (bisection) branch; fully random pure parts are all infeasible here
    singlet_th = np.array([np.pi / 2, np.pi / 4, 0.0, 0.0, np.pi, 0.0])
    thetas += [singlet_th + rng.normal(scale=0.05, size=6) for _ in range(5 * scale)]

    # first call pays numba compilation; keep it out of the timings
    _kernels.neg_lambda_objective(thetas[0], eye4, rho4, rrho4, 1e-10, 1e-6)
    start = time.perf_counter()
    checksum = 0.0
    for th in thetas:
        checksum += _kernels.neg_lambda_objective(th, eye4, rho4, rrho4, 1e-10, 1e-6)
    objective_ms = (time.perf_counter() - start) * 1e3 / len(thetas)

    singlet = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    proj = pure_projector(singlet)
    rproj = _kernels.reflect4(proj)
    rho6 = to_density_matrix(construct_family(Werner(0.6)))
    rrho6 = _kernels.reflect4(rho6)
    _kernels.max_feasible_lambda(rho6, rrho6, proj, rproj, 1e-10, 1e-8)
    start = time.perf_counter()
    lam = 0.0
    repeats = 50 * scale
    for _ in range(repeats):
        lam = _kernels.max_feasible_lambda(rho6, rrho6, proj, rproj, 1e-10, 1e-8)
    solve_ms = (time.perf_counter() - start) * 1e3 / repeats

    state = construct_family(RankTwo(Rank2Params(1.1, 0.7, 0.3, 0.25, 0.4)))
    start = time.perf_counter()
    dec = ls_optimize(state, restarts=4, seed=1)
    optimize_s = time.perf_counter() - start

    return {
        "backend": _kernels.BACKEND,
        "timings": {
            "objective eval (ms)": objective_ms,
            "feasibility solve (ms)": solve_ms,
            "ls_optimize rank-2 (s)": optimize_s,
        },
        "values": {
            "objective checksum": float(checksum),
            "solved weight": float(lam),
            "ls_optimize weight": float(dec.lambda_),
        },
    }


def _run_worker(pure_numpy: bool, scale: int) -> dict:
    env = dict(os.environ)
    if pure_numpy:
        env["QPAIR_PURE_NUMPY"] = "1"
    else:
        env.pop("QPAIR_PURE_NUMPY", None)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", "--scale", str(scale)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scale", type=int, default=1, help="workload size multiplier")
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        json.dump(_workloads(args.scale), sys.stdout)
        return

    numba = _run_worker(pure_numpy=False, scale=args.scale)
    numpy_ = _run_worker(pure_numpy=True, scale=args.scale)
    if numba["backend"] != "numba":
        sys.exit("numba backend unavailable; nothing to compare")

    width = max(len(k) for k in numba["timings"])
    print(f"{'workload':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for key, fast in numba["timings"].items():
        slow = numpy_["timings"][key]
        print(f"{key:<{width}}  {fast:>12.4f}  {slow:>12.4f}  {slow / fast:>7.1f}x")
    print()
    for key, fast_val in numba["values"].items():
        slow_val = numpy_["values"][key]
        if fast_val == slow_val:
            print(f"{key}: {fast_val!r} (exact match)")
        else:
            delta = abs(fast_val - slow_val)
            print(f"{key}: {fast_val!r} vs {slow_val!r} (delta {delta:.2e})")


if __name__ == "__main__":
    main()
