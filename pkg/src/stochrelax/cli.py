"""Command-line interface.

Four subcommands:

  surface    evaluate (gcv, gcc) on a parameter grid for one partition
  bounds     certified lower/upper bounds on the minimal expected cost
  saa        sample-average estimate of the expected cost at a point
  casestudy  run the oscillator study end to end into a directory

Exit codes: 0 on success, 2 for usage or input errors (bad flags,
unparseable model, boxes out of range), 3 for numeric failures
(bound blowup, step failure, non-finite states).

All CSV output uses %.17g formatting, so reruns with the same seed are
byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import (
    CellOutsideSupport,
    DimensionError,
    OutOfRange,
    ParseError,
    StochRelaxError,
)
from .expectation import (
    compute_bounds,
    grid_points,
    relaxation_surface,
    saa_estimate,
    simulate_terminal,
)
from .expr import load_model
from .interval import Interval, IntervalBox
from .models import circuit_model
from .odeint import IntegratorConfig
from .stochastics import sample, uniform_partition


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _parse_counts(spec: str, n: int, what: str):
    parts = spec.lower().split("x")
    try:
        vals = [int(s) for s in parts]
    except ValueError:
        raise ValueError(f"bad {what} spec {spec!r}: expected N or NxNx...") from None
    if len(vals) == 1 and n > 1:
        vals = vals * n
    if len(vals) != n:
        raise ValueError(f"{what} spec {spec!r} has {len(vals)} entries, need {n}")
    if any(v < 1 for v in vals):
        raise ValueError(f"{what} entries must be positive, got {spec!r}")
    return tuple(vals)


def _parse_box(spec: str, n: int, what: str) -> IntervalBox:
    parts = spec.split("x")
    pairs = []
    for part in parts:
        bits = part.split(",")
        if len(bits) != 2:
            raise ValueError(f"bad {what} spec {spec!r}: expected lo,hi pairs joined by 'x'")
        try:
            pairs.append((float(bits[0]), float(bits[1])))
        except ValueError:
            raise ValueError(f"bad {what} spec {spec!r}: entries must be numbers") from None
    if len(pairs) == 1 and n > 1:
        pairs = pairs * n
    if len(pairs) != n:
        raise ValueError(f"{what} spec {spec!r} has {len(pairs)} pairs, need {n}")
    try:
        return IntervalBox([Interval(lo, hi) for lo, hi in pairs])
    except ValueError as exc:
        raise ValueError(f"bad {what} spec {spec!r}: {exc}") from None


def _parse_point(spec: str, n: int, what: str) -> np.ndarray:
    bits = spec.split(",")
    try:
        vals = [float(s) for s in bits]
    except ValueError:
        raise ValueError(f"bad {what} spec {spec!r}: entries must be numbers") from None
    if len(vals) != n:
        raise ValueError(f"{what} spec {spec!r} has {len(vals)} entries, need {n}")
    return np.array(vals)


def _config(args) -> IntegratorConfig:
    steps = getattr(args, "steps", None)
    rtol = getattr(args, "rtol", None)
    atol = getattr(args, "atol", None)
    if steps is not None:
        if rtol is not None or atol is not None:
            raise ValueError("--steps selects fixed-step RK4; it excludes --rtol/--atol")
        return IntegratorConfig(method="rk4", steps=steps)
    kw = {}
    if rtol is not None:
        kw["rtol"] = rtol
    if atol is not None:
        kw["atol"] = atol
    return IntegratorConfig(**kw)


def _load(args):
    if getattr(args, "model", None):
        return load_model(args.model)
    return circuit_model(getattr(args, "tf", 5.0))


def _write_csv(path: str, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_surface(args) -> int:
    model = _load(args)
    cfg = _config(args)
    pbox = _parse_box(args.pbox, model.n_p, "pbox") if args.pbox else model.pbox
    cells = _parse_counts(args.cells, model.n_w, "cells")
    grid = _parse_counts(args.grid, model.n_p, "grid")
    part = uniform_partition(model.wbox, cells, model.dist)
    res = relaxation_surface(model, part, pbox, grid, cfg, jobs=args.jobs)
    header = [f"p{i + 1}" for i in range(model.n_p)] + ["gcv", "gcc"]
    rows = [list(res.points[i]) + [res.gcv[i], res.gcc[i]] for i in range(len(res.gcv))]
    _write_csv(args.out, header, rows)
    if args.out != "-":
        print(f"surface: {len(rows)} grid points, {part.n_cells} cells -> {args.out}")
    return 0


def cmd_bounds(args) -> int:
    model = _load(args)
    cfg = _config(args)
    pbox = _parse_box(args.pbox, model.n_p, "pbox") if args.pbox else model.pbox
    cells = _parse_counts(args.cells, model.n_w, "cells")
    part = uniform_partition(model.wbox, cells, model.dist)
    rep = compute_bounds(model, part, pbox, cfg, budget=args.budget)
    header = (
        ["cells", "lower", "upper", "gap", "n_evals"]
        + [f"p{i + 1}" for i in range(model.n_p)]
    )
    cells_txt = "x".join(str(c) for c in rep.cells)
    rows = [[cells_txt, rep.lower, rep.upper, rep.gap, str(rep.n_evals)] + list(rep.p_lower)]
    _write_csv(args.out, header, rows)
    if args.out != "-":
        print(
            f"bounds: [{_fmt(rep.lower)}, {_fmt(rep.upper)}] with {cells_txt} cells -> {args.out}"
        )
    return 0


def cmd_saa(args) -> int:
    model = _load(args)
    cfg = _config(args)
    if args.p:
        p = _parse_point(args.p, model.n_p, "p")
    else:
        p = model.pbox.mid
    res = saa_estimate(model, p, args.samples, args.seed, cfg)
    header = [f"p{i + 1}" for i in range(model.n_p)] + ["mean", "stderr", "n", "seed"]
    rows = [list(p) + [res.mean, res.stderr, str(res.n), str(res.seed)]]
    _write_csv(args.out, header, rows)
    if args.out != "-":
        print(f"saa: {res.n} samples at seed {res.seed} -> {args.out}")
    return 0


def cmd_casestudy(args) -> int:
    model = _load(args)
    cfg = _config(args)
    grid = _parse_counts(args.grid, model.n_p, "grid")
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    pts = grid_points(model.pbox, grid)
    npts = pts.shape[0]
    pheader = [f"p{i + 1}" for i in range(model.n_p)]

    center = model.pbox.mid
    icenter = int(np.argmin(np.sum((pts - center) ** 2, axis=1)))
    written = []

    for per_dim in (1, 4, 8):
        part = uniform_partition(model.wbox, per_dim, model.dist)
        res = relaxation_surface(model, part, None, grid, cfg, jobs=args.jobs)
        name = f"surface_cells_{part.n_cells}.csv"
        rows = [list(res.points[i]) + [res.gcv[i], res.gcc[i]] for i in range(npts)]
        _write_csv(os.path.join(outdir, name), pheader + ["gcv", "gcc"], rows)
        written.append(name)
        gap = res.gcc[icenter] - res.gcv[icenter]
        print(
            f"casestudy: {part.n_cells:3d} cells, center gap {_fmt(gap)} -> {name}"
        )

    ss = np.random.SeedSequence(args.seed)
    children = ss.spawn(npts + 1)
    rows = []
    for i in range(npts):
        rng = np.random.default_rng(children[i])
        W = sample(model.dist, rng, args.samples)
        gvals, _ = simulate_terminal(model, pts[i], W, cfg)
        mean = float(np.mean(gvals))
        stderr = float(np.std(gvals, ddof=1) / np.sqrt(args.samples))
        rows.append(list(pts[i]) + [mean, stderr])
    name = "saa_surface.csv"
    _write_csv(os.path.join(outdir, name), pheader + ["mean", "stderr"], rows)
    written.append(name)
    print(f"casestudy: saa surface, {args.samples} samples per point -> {name}")

    rng = np.random.default_rng(children[npts])
    W = sample(model.dist, rng, args.scatter)
    gvals, _ = simulate_terminal(model, center, W, cfg)
    name = "terminal_samples.csv"
    wheader = [f"w{i + 1}" for i in range(model.n_w)]
    rows = [list(W[i]) + [gvals[i]] for i in range(args.scatter)]
    _write_csv(os.path.join(outdir, name), wheader + ["g"], rows)
    written.append(name)
    print(f"casestudy: {args.scatter} terminal samples at the center point -> {name}")
    print(f"casestudy: wrote {len(written)} files to {outdir}")
    return 0


def _add_common(sp, model_required: bool) -> None:
    sp.add_argument("--model", required=model_required, help="model file path")
    sp.add_argument("--steps", type=int, default=None, help="fixed-step RK4 with this many steps")
    sp.add_argument("--rtol", type=float, default=None, help="adaptive relative tolerance")
    sp.add_argument("--atol", type=float, default=None, help="adaptive absolute tolerance")
    sp.add_argument("--out", default="-", help="output CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochrelax",
        description="Relaxations and bounds for expected costs of ODEs with random inputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("surface", help="relaxation surface on a parameter grid")
    _add_common(sp, model_required=True)
    sp.add_argument("--pbox", default=None, help="parameter box lo,hi[xlo,hi...]")
    sp.add_argument("--cells", default="1", help="partition cells per input, N or NxN...")
    sp.add_argument("--grid", default="11", help="grid points per parameter, N or NxN...")
    sp.add_argument("--jobs", type=int, default=1, help="worker threads")
    sp.set_defaults(func=cmd_surface)

    sp = sub.add_parser("bounds", help="certified bounds on the minimal expected cost")
    _add_common(sp, model_required=True)
    sp.add_argument("--pbox", default=None, help="parameter box lo,hi[xlo,hi...]")
    sp.add_argument("--cells", default="1", help="partition cells per input, N or NxN...")
    sp.add_argument("--budget", type=int, default=500, help="search evaluation budget")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("saa", help="sample-average estimate at a parameter point")
    _add_common(sp, model_required=True)
    sp.add_argument("--p", default=None, help="parameter point v1,v2,... (default: box midpoint)")
    sp.add_argument("--samples", type=int, default=1000, help="number of draws")
    sp.add_argument("--seed", type=int, default=0, help="random seed")
    sp.set_defaults(func=cmd_saa)

    sp = sub.add_parser("casestudy", help="oscillator study: surfaces, saa, samples")
    _add_common(sp, model_required=False)
    sp.add_argument("--tf", type=float, default=5.0, help="final time for the built-in model")
    sp.add_argument("--grid", default="11", help="grid points per parameter")
    sp.add_argument("--samples", type=int, default=200, help="saa draws per grid point")
    sp.add_argument("--scatter", type=int, default=50, help="terminal samples at the center")
    sp.add_argument("--seed", type=int, default=12345, help="random seed")
    sp.add_argument("--jobs", type=int, default=1, help="worker threads")
    sp.set_defaults(func=cmd_casestudy, out="casestudy_out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return args.func(args)
    except (ParseError, DimensionError, CellOutsideSupport, OutOfRange, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StochRelaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
