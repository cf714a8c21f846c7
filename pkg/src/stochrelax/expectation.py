"""Relaxations and bounds for expected terminal costs.

For a partition of the random-input support into cells, the expected
cost E[g(p, w, x(tf; p, w))] is relaxed cell by cell: conditioning on
each cell and moving the conditional expectation inside the relaxation
(valid by Jensen's inequality on the convex side, mirrored on the
concave side) gives

    gcv(p) = sum_i P(cell_i) * Gcv_i(p, E[w | cell_i])
    gcc(p) = sum_i P(cell_i) * Gcc_i(p, E[w | cell_i])

where Gcv_i/Gcc_i relax the terminal cost over pbox x cell_i.  Both are
convex respectively concave in p, and they tighten as the partition is
refined.  A rigorous lower bound on min_p E[...] follows by minimizing
gcv over pbox with a derivative-free compass search; an upper bound at
a chosen p comes from the concave relaxation built over the degenerate
parameter box [p, p].
"""

from __future__ import annotations

import itertools
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as _k
from .errors import DimensionError, StepFailure
from .expr import Model
from .interval import Interval, IntervalBox
from .odeint import IntegratorConfig
from .staterelax import (
    StateBoundTrajectory,
    compute_state_bounds,
    relax_terminal,
    _point_in_box,
)
from .stochastics import Partition, sample, uniform_partition

_SEARCH_BUDGET = 500
_SEARCH_STEP_FRACTION = 0.25
_SEARCH_STOP_FRACTION = 1e-4


class ExpectedValueRelaxation:
    """Convex/concave relaxations of p -> E[g] over pbox, for one partition.

    Per-cell state-bound tubes are computed once at construction;
    evaluate() then costs one relaxation integration per cell.
    """

    def __init__(
        self,
        model: Model,
        partition: Partition | None = None,
        pbox: IntervalBox | None = None,
        config: IntegratorConfig | None = None,
    ):
        self.model = model
        self.pbox = model.pbox if pbox is None else pbox
        self.config = config if config is not None else IntegratorConfig()
        if partition is None:
            partition = uniform_partition(model.wbox, 1, model.dist)
        if partition.conditional_means.shape[1] != model.n_w:
            raise DimensionError(
                f"partition is over {partition.conditional_means.shape[1]} components, "
                f"model has {model.n_w}"
            )
        self.partition = partition
        self.cell_bounds: list[StateBoundTrajectory] = [
            compute_state_bounds(model, self.pbox, cell, self.config)
            for cell in partition.cells
        ]

    def evaluate(self, p) -> tuple[float, float]:
        """(gcv(p), gcc(p)) at a parameter point inside pbox."""
        part = self.partition
        gcv = 0.0
        gcc = 0.0
        for i in range(part.n_cells):
            cv, cc = relax_terminal(
                self.model, p, part.conditional_means[i], self.cell_bounds[i], self.config
            )
            prob = part.probabilities[i]
            gcv += prob * cv
            gcc += prob * cc
        return gcv, gcc

    def evaluate_many(self, points, jobs: int = 1):
        """Evaluate at many points; returns (gcv, gcc) arrays aligned with points."""
        points = np.asarray(points, dtype=float)
        n = points.shape[0]
        gcv = np.empty(n)
        gcc = np.empty(n)
        if jobs > 1 and n > 1:
            def worker(i):
                gcv[i], gcc[i] = self.evaluate(points[i])
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(worker, range(n)))
        else:
            for i in range(n):
                gcv[i], gcc[i] = self.evaluate(points[i])
        return gcv, gcc


_RELAX_CACHE: OrderedDict = OrderedDict()
_RELAX_CACHE_MAX = 8


def _partition_key(partition: Partition):
    return (
        partition.counts,
        tuple((iv.lo, iv.hi) for cell in partition.cells for iv in cell),
    )


def _config_key(cfg: IntegratorConfig):
    return (cfg.method, cfg.rtol, cfg.atol, cfg.steps, cfg.bound_mesh)


def _cached_relaxation(
    model: Model,
    partition: Partition | None,
    pbox: IntervalBox | None,
    config: IntegratorConfig | None,
) -> ExpectedValueRelaxation:
    cfg = config if config is not None else IntegratorConfig()
    box = model.pbox if pbox is None else pbox
    key = (
        model.cache_token,
        tuple((iv.lo, iv.hi) for iv in box),
        None if partition is None else _partition_key(partition),
        _config_key(cfg),
    )
    hit = _RELAX_CACHE.get(key)
    if hit is not None:
        _RELAX_CACHE.move_to_end(key)
        return hit
    rel = ExpectedValueRelaxation(model, partition, box, cfg)
    _RELAX_CACHE[key] = rel
    while len(_RELAX_CACHE) > _RELAX_CACHE_MAX:
        _RELAX_CACHE.popitem(last=False)
    return rel


def relax_expected_value(
    model: Model,
    p,
    partition: Partition | None = None,
    pbox: IntervalBox | None = None,
    config: IntegratorConfig | None = None,
) -> tuple[float, float]:
    """(gcv(p), gcc(p)) with per-cell state bounds cached across calls."""
    return _cached_relaxation(model, partition, pbox, config).evaluate(p)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


@dataclass
class LowerBoundResult:
    value: float
    p: np.ndarray
    n_evals: int


def _compass_minimize(fn, box: IntervalBox, budget: int):
    lo = box.lo
    hi = box.hi
    width = hi - lo
    active = [j for j in range(len(box)) if width[j] > 0.0]
    p = 0.5 * (lo + hi)
    best = fn(p)
    evals = 1
    if not active:
        return best, p, evals
    step = width * _SEARCH_STEP_FRACTION
    while evals < budget:
        if all(step[j] < _SEARCH_STOP_FRACTION * width[j] for j in active):
            break
        move_v = best
        move_p = None
        for j in active:
            for sgn in (1.0, -1.0):
                if evals >= budget:
                    break
                cand = p.copy()
                cand[j] = min(max(p[j] + sgn * step[j], lo[j]), hi[j])
                if cand[j] == p[j]:
                    continue
                v = fn(cand)
                evals += 1
                if v < move_v:
                    move_v = v
                    move_p = cand
        if move_p is None:
            step = 0.5 * step
        else:
            p = move_p
            best = move_v
    return best, p, evals


def lower_bound(
    model: Model,
    partition: Partition | None = None,
    pbox: IntervalBox | None = None,
    config: IntegratorConfig | None = None,
    budget: int = _SEARCH_BUDGET,
) -> LowerBoundResult:
    """Rigorous lower bound on min over pbox of E[g(p, w, x(tf; p, w))].

    Minimizes the convex relaxation gcv by compass search: start at the
    box midpoint with steps of a quarter width per coordinate, halve on
    failure, stop when steps fall below 1e-4 of the width or the
    evaluation budget is spent.  Since gcv underestimates the objective
    everywhere, any evaluation is already a valid bound; the search just
    tightens it.
    """
    rel = _cached_relaxation(model, partition, pbox, config)
    value, p, evals = _compass_minimize(lambda q: rel.evaluate(q)[0], rel.pbox, budget)
    return LowerBoundResult(value=value, p=p, n_evals=evals)


def upper_bound(
    model: Model,
    p,
    partition: Partition | None = None,
    config: IntegratorConfig | None = None,
) -> float:
    """Rigorous upper bound on E[g] at the point p.

    Uses the concave relaxation over the degenerate parameter box
    [p, p], with fresh per-cell state bounds for that box, so the bound
    is as tight as the partition allows at this p.
    """
    p = _point_in_box(p, model.pbox, "p")
    cfg = config if config is not None else IntegratorConfig()
    if partition is None:
        partition = uniform_partition(model.wbox, 1, model.dist)
    pt_box = IntervalBox([Interval(v, v) for v in p])
    total = 0.0
    for i, cell in enumerate(partition.cells):
        bounds = compute_state_bounds(model, pt_box, cell, cfg)
        _, cc = relax_terminal(model, p, partition.conditional_means[i], bounds, cfg)
        total += partition.probabilities[i] * cc
    return total


@dataclass
class BoundReport:
    """Certified enclosure of the minimal expected cost over a parameter box."""

    lower: float
    upper: float
    p_lower: np.ndarray
    p_upper: np.ndarray
    cells: tuple
    n_evals: int

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def compute_bounds(
    model: Model,
    partition: Partition | None = None,
    pbox: IntervalBox | None = None,
    config: IntegratorConfig | None = None,
    budget: int = _SEARCH_BUDGET,
) -> BoundReport:
    """Lower bound via search, upper bound at the search's best point."""
    lb = lower_bound(model, partition, pbox, config, budget)
    ub = upper_bound(model, lb.p, partition, config)
    counts = partition.counts if partition is not None else (1,) * model.n_w
    return BoundReport(
        lower=lb.value,
        upper=ub,
        p_lower=lb.p,
        p_upper=lb.p,
        cells=counts,
        n_evals=lb.n_evals,
    )


# ---------------------------------------------------------------------------
# sample-average approximation
# ---------------------------------------------------------------------------


@dataclass
class SaaResult:
    mean: float
    stderr: float
    n: int
    seed: int


def simulate_terminal(model: Model, p, W, config: IntegratorConfig | None = None):
    """Integrate the model at (p, w_s) for every sample row of W.

    Returns (g values, terminal states).  Raises StepFailure if any
    sample fails to integrate.
    """
    cfg = config if config is not None else IntegratorConfig()
    p = _point_in_box(p, model.pbox, "p")
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[1] != model.n_w:
        raise DimensionError(f"W must have shape (n, {model.n_w}), got {W.shape}")
    P = np.tile(p, (W.shape[0], 1))
    fg, x0g, gg = model.f, model.x0, model.g
    use_rk4 = 1 if cfg.method == "rk4" else 0
    status, gvals, xend = _k.drive_real_batch(
        fg.ops, fg.ia, fg.ib, fg.cval, fg.roots,
        x0g.ops, x0g.ia, x0g.ib, x0g.cval, x0g.roots,
        gg.ops, gg.ia, gg.ib, gg.cval, gg.roots,
        model.t0, model.tf, P, W, cfg.rtol, cfg.atol, cfg.max_steps,
        use_rk4, cfg.steps,
    )
    nfail = int(np.count_nonzero(status))
    if nfail:
        raise StepFailure(f"{nfail} of {W.shape[0]} sample integrations failed")
    return gvals, xend


def saa_estimate(
    model: Model,
    p,
    n: int,
    seed: int,
    config: IntegratorConfig | None = None,
) -> SaaResult:
    """Sample-average estimate of E[g] at p with n draws from the model's distribution."""
    if n < 2:
        raise ValueError(f"sample count must be at least 2, got {n}")
    rng = np.random.default_rng(seed)
    W = sample(model.dist, rng, n)
    gvals, _ = simulate_terminal(model, p, W, config)
    mean = float(np.mean(gvals))
    stderr = float(np.std(gvals, ddof=1) / math.sqrt(n))
    return SaaResult(mean=mean, stderr=stderr, n=n, seed=seed)


# ---------------------------------------------------------------------------
# relaxation surfaces on parameter grids
# ---------------------------------------------------------------------------


@dataclass
class SurfaceResult:
    points: np.ndarray
    gcv: np.ndarray
    gcc: np.ndarray
    shape: tuple = field(default=())


def grid_points(pbox: IntervalBox, shape) -> np.ndarray:
    """Uniform grid over pbox, first coordinate slowest; shape (prod, n_p)."""
    if len(shape) != len(pbox):
        raise DimensionError(f"grid shape has {len(shape)} entries, box has {len(pbox)}")
    if any(s < 1 for s in shape):
        raise ValueError(f"grid shape entries must be positive, got {shape}")
    axes = [np.linspace(iv.lo, iv.hi, s) for iv, s in zip(pbox, shape)]
    pts = np.array(list(itertools.product(*axes)))
    return pts.reshape(-1, len(pbox))


def relaxation_surface(
    model: Model,
    partition: Partition | None = None,
    pbox: IntervalBox | None = None,
    shape=None,
    config: IntegratorConfig | None = None,
    jobs: int = 1,
) -> SurfaceResult:
    """Evaluate (gcv, gcc) on a uniform parameter grid."""
    rel = _cached_relaxation(model, partition, pbox, config)
    if shape is None:
        shape = (11,) * model.n_p
    shape = tuple(int(s) for s in shape)
    pts = grid_points(rel.pbox, shape)
    gcv, gcc = rel.evaluate_many(pts, jobs=jobs)
    return SurfaceResult(points=pts, gcv=gcv, gcc=gcc, shape=shape)
