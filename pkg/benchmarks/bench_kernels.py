"""Benchmark the hot kernels on the active backend.

Times state-bound propagation, single relaxation solves, partitioned
expected-value relaxations, and the fused sample-average kernel.  With
--compare the script re-runs itself in a subprocess with the numba
backend disabled and prints both columns side by side.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --compare --samples 100000
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

import stochrelax as sr


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks(samples, repeat, mesh):
    model = sr.circuit_model()
    cfg = sr.IntegratorConfig(bound_mesh=mesh)
    p = np.array([0.2, 0.2])
    w = np.array([1.0, 1.0])

    # warm up every code path once so jit compilation stays out of the timings
    bounds = sr.compute_state_bounds(model, config=cfg)
    sr.relax_terminal(model, p, w, bounds, cfg)
    sr.saa_estimate(model, p, 8, seed=0, config=cfg)
    part = sr.uniform_partition(model.wbox, 4, model.dist)
    rel = sr.ExpectedValueRelaxation(model, part, config=cfg)
    rel.evaluate(p)

    rng = np.random.default_rng(5)
    points = [
        np.array([rng.uniform(iv.lo, iv.hi) for iv in model.pbox])
        for _ in range(6)
    ]

    results = {}
    results["state_bounds"] = best_of(
        lambda: sr.compute_state_bounds(model, config=cfg), repeat
    )
    results["relax_solve"] = best_of(
        lambda: sr.relax_terminal(model, p, w, bounds, cfg), repeat
    )
    results["jensen_16"] = best_of(
        lambda: [rel.evaluate(q) for q in points], repeat
    ) / len(points)
    results["saa"] = best_of(
        lambda: sr.saa_estimate(model, p, samples, seed=1, config=cfg), repeat
    )
    results["saa_rate"] = samples / results["saa"]
    return results


ROWS = [
    ("state_bounds", "state bounds (mesh {mesh})", "ms", 1e3),
    ("relax_solve", "relaxation solve", "ms", 1e3),
    ("jensen_16", "16-cell expected-value relaxation", "ms", 1e3),
    ("saa", "sample average ({samples} draws)", "ms", 1e3),
    ("saa_rate", "  draws per second", "", 1.0),
]


def print_table(results, args, other=None, other_name=""):
    label_w = 44
    head = f"{'benchmark':<{label_w}}{sr.backend_name():>12}"
    if other is not None:
        head += f"{other_name:>12}{'speedup':>10}"
    print(head)
    print("-" * len(head))
    for key, label, unit, scale in ROWS:
        label = label.format(mesh=args.mesh, samples=args.samples)
        v = results[key] * scale
        text = f"{v:,.0f}" if key == "saa_rate" else f"{v:.3f} {unit}"
        line = f"{label:<{label_w}}{text:>12}"
        if other is not None:
            o = other[key] * scale
            otext = f"{o:,.0f}" if key == "saa_rate" else f"{o:.3f} {unit}"
            line += f"{otext:>12}"
            if key != "saa_rate":
                line += f"{other[key] / results[key]:>9.1f}x"
        print(line)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=None,
                    help="sample-average batch size "
                         "(default 200000, or 5000 with --compare)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--mesh", type=int, default=4000)
    ap.add_argument("--compare", action="store_true",
                    help="also time the pure-python backend and show speedups")
    ap.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.samples is None:
        args.samples = 5_000 if args.compare else 200_000

    results = run_benchmarks(args.samples, args.repeat, args.mesh)
    if args.emit_json:
        json.dump(results, sys.stdout)
        return 0

    other = None
    if args.compare:
        if not sr.NUMBA_ENABLED:
            print("already on the python backend, nothing to compare against",
                  file=sys.stderr)
            return 2
        env = dict(os.environ, STOCHRELAX_NUMBA="0")
        cmd = [sys.executable, os.path.abspath(__file__),
               "--samples", str(args.samples), "--repeat", str(args.repeat),
               "--mesh", str(args.mesh), "--emit-json"]
        out = subprocess.run(cmd, env=env, capture_output=True, text=True,
                             check=True)
        other = json.loads(out.stdout)

    print_table(results, args, other, other_name="python" if other else "")
    return 0


if __name__ == "__main__":
    sys.exit(main())
