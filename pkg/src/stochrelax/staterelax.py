"""State bounds and state relaxations for parametric ODEs.

compute_state_bounds produces an interval tube X(t) enclosing every
solution of the ODE over a parameter box and random-input box, by
integrating differential inequalities: the lower bound of component k
evolves with the infimum of f_k over the current box with x_k pinned at
its lower face, and symmetrically above.

solve_relaxation_ode then integrates, for a fixed (p, w), the coupled
2*nx auxiliary system whose components are convex under- and concave
over-estimates of x(t; p, w), jointly convex/concave in (p, w) over
pbox x wbox.  At each right-hand-side evaluation the current pair is
clipped into the tube, and equation k sees component k pinned at the
estimate being propagated.  After every accepted step the pair is
projected back into the tube (projection preserves convexity since the
tube is constant in (p, w)) and ulp-level crossings are snapped.

eval_terminal_relaxation composes the terminal pair with the cost
expression under McCormick semantics, yielding relaxations of
g(p, w, x(tf; p, w)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from .errors import (
    BoundBlowup,
    DimensionError,
    InvalidRelaxationPair,
    NonFiniteState,
    OutOfRange,
    StepFailure,
)
from .expr import ExprGraph, Model
from .interval import Interval, IntervalBox, get_inflation
from .mccormick import McCormickValue, mc_from_state, mc_from_variable
from .odeint import IntegratorConfig

DEFAULT_WIDTH_CAP = 1e6
_SNAP_TOL = 1e-9
_BOX_TOL = 1e-12


@dataclass(eq=False)
class StateBoundTrajectory:
    """Interval tube for the state on a uniform time mesh."""

    ts: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    pbox: IntervalBox
    wbox: IntervalBox

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def tf(self) -> float:
        return float(self.ts[-1])

    def at(self, t: float):
        """Linearly interpolated (lo, hi) bound vectors at time t."""
        span = self.tf - self.t0
        if t < self.t0 - 1e-9 * span or t > self.tf + 1e-9 * span:
            raise OutOfRange(
                f"t = {t} is outside the horizon [{self.t0}, {self.tf}]"
            )
        m = len(self.ts) - 1
        dt = span / m
        s = (t - self.t0) / dt
        j = min(max(int(np.floor(s)), 0), m - 1)
        th = min(max(s - j, 0.0), 1.0)
        lo = self.lo[j] * (1.0 - th) + self.lo[j + 1] * th
        hi = self.hi[j] * (1.0 - th) + self.hi[j + 1] * th
        return lo, hi

    def terminal_box(self) -> IntervalBox:
        return IntervalBox.from_arrays(self.lo[-1], self.hi[-1])


@dataclass(eq=False)
class RelaxationTrajectory:
    """Convex/concave state estimates along the accepted integration mesh."""

    ts: np.ndarray
    cv: np.ndarray
    cc: np.ndarray
    p: np.ndarray
    w: np.ndarray
    bounds: StateBoundTrajectory

    @property
    def terminal_cv(self) -> np.ndarray:
        return self.cv[-1]

    @property
    def terminal_cc(self) -> np.ndarray:
        return self.cc[-1]


def _subbox_of(inner: IntervalBox, outer: IntervalBox, what: str) -> None:
    if len(inner) != len(outer):
        raise DimensionError(f"{what} has {len(inner)} components, expected {len(outer)}")
    if not outer.encloses(inner, tol=_BOX_TOL):
        raise OutOfRange(f"{what} {inner!r} is not contained in {outer!r}")


def _point_in_box(x, box: IntervalBox, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (len(box),):
        raise DimensionError(f"{what} must have shape ({len(box)},), got {x.shape}")
    if not box.contains(x, tol=_BOX_TOL):
        raise OutOfRange(f"{what} {x.tolist()} lies outside {box!r}")
    return x


def compute_state_bounds(
    model: Model,
    pbox: IntervalBox | None = None,
    wbox: IntervalBox | None = None,
    config: IntegratorConfig | None = None,
    width_cap: float = DEFAULT_WIDTH_CAP,
) -> StateBoundTrajectory:
    """Bound the state over pbox x wbox on a dense uniform mesh.

    Defaults to the model's own boxes; sub-boxes must be contained in
    them.  Raises BoundBlowup when any component's width passes
    width_cap, at which point the tube carries no information.
    """
    cfg = config if config is not None else IntegratorConfig()
    pbox = model.pbox if pbox is None else pbox
    wbox = model.wbox if wbox is None else wbox
    _subbox_of(pbox, model.pbox, "parameter box")
    _subbox_of(wbox, model.wbox, "random-input box")

    plo, phi = pbox.lo, pbox.hi
    wlo, whi = wbox.lo, wbox.hi
    infl = get_inflation()
    x0g = model.x0
    lo0, hi0 = _k.eval_interval_roots(
        x0g.ops, x0g.ia, x0g.ib, x0g.cval, x0g.roots,
        model.t0, model.t0, plo, phi, wlo, whi, np.empty(0), np.empty(0), infl,
    )
    fg = model.f
    nsteps = cfg.bound_mesh
    status, Mlo, Mhi = _k.drive_bounds_rk4(
        fg.ops, fg.ia, fg.ib, fg.cval, fg.roots,
        model.t0, model.tf, lo0, hi0, plo, phi, wlo, whi,
        nsteps, float(width_cap), infl,
    )
    if status == 1:
        raise BoundBlowup(
            f"state bound width exceeded cap {width_cap:g}; the enclosure is useless"
        )
    if status == 2:
        raise NonFiniteState("state bounds became non-finite")
    ts = np.linspace(model.t0, model.tf, nsteps + 1)
    return StateBoundTrajectory(ts=ts, lo=Mlo, hi=Mhi, pbox=pbox, wbox=wbox)


def solve_relaxation_ode(
    model: Model,
    p,
    w,
    bounds: StateBoundTrajectory,
    config: IntegratorConfig | None = None,
) -> RelaxationTrajectory:
    """Integrate the auxiliary relaxation system at (p, w) inside bounds' boxes."""
    cfg = config if config is not None else IntegratorConfig()
    p = _point_in_box(p, bounds.pbox, "p")
    w = _point_in_box(w, bounds.wbox, "w")

    plo, phi = bounds.pbox.lo, bounds.pbox.hi
    wlo, whi = bounds.wbox.lo, bounds.wbox.hi
    x0g = model.x0
    e = np.empty(0)
    ycv0, ycc0, _, _ = _k.eval_mc_roots(
        x0g.ops, x0g.ia, x0g.ib, x0g.cval, x0g.roots,
        model.t0, p, p, plo, phi, w, w, wlo, whi, e, e, e, e,
    )
    fg = model.f
    if cfg.method == "rk4":
        status, ts, Rcv, Rcc = _k.drive_relax_rk4(
            fg.ops, fg.ia, fg.ib, fg.cval, fg.roots,
            model.t0, model.tf, ycv0, ycc0,
            p, plo, phi, w, wlo, whi,
            bounds.lo, bounds.hi,
            cfg.steps, _SNAP_TOL,
        )
    else:
        status, ts, Rcv, Rcc = _k.drive_relax_rk45(
            fg.ops, fg.ia, fg.ib, fg.cval, fg.roots,
            model.t0, model.tf, ycv0, ycc0,
            p, plo, phi, w, wlo, whi,
            bounds.lo, bounds.hi,
            cfg.rtol, cfg.atol, cfg.max_steps, _SNAP_TOL,
        )
    if status == 1:
        raise StepFailure("relaxation integration could not complete a step")
    if status == 2:
        raise NonFiniteState("relaxation estimates became non-finite")
    if status == 3:
        raise InvalidRelaxationPair(
            "convex estimate crossed its concave partner beyond snap tolerance"
        )
    return RelaxationTrajectory(ts=ts, cv=Rcv, cc=Rcc, p=p, w=w, bounds=bounds)


def eval_terminal_relaxation(
    model: Model,
    traj: RelaxationTrajectory,
) -> tuple[float, float]:
    """Relax the terminal cost at traj's (p, w): returns (cv, cc) for g."""
    bounds = traj.bounds
    xlo, xhi = bounds.lo[-1], bounds.hi[-1]
    xs = [
        mc_from_state(traj.terminal_cv[i], traj.terminal_cc[i], Interval(xlo[i], xhi[i]))
        for i in range(model.n_x)
    ]
    ps = [
        mc_from_variable(traj.p[i], bounds.pbox[i])
        for i in range(model.n_p)
    ]
    ws = [
        mc_from_variable(traj.w[i], bounds.wbox[i])
        for i in range(model.n_w)
    ]
    gg = model.g
    pcv = np.array([v.cv for v in ps])
    wcv = np.array([v.cv for v in ws])
    ocv, occ, _, _ = _k.eval_mc_roots(
        gg.ops, gg.ia, gg.ib, gg.cval, gg.roots,
        model.tf, pcv, pcv, bounds.pbox.lo, bounds.pbox.hi,
        wcv, wcv, bounds.wbox.lo, bounds.wbox.hi,
        np.array([v.cv for v in xs]), np.array([v.cc for v in xs]),
        xlo, xhi,
    )
    return float(ocv[0]), float(occ[0])


def relax_terminal(
    model: Model,
    p,
    w,
    bounds: StateBoundTrajectory,
    config: IntegratorConfig | None = None,
) -> tuple[float, float]:
    """Convex/concave estimates of g(p, w, x(tf; p, w)) in one call."""
    traj = solve_relaxation_ode(model, p, w, bounds, config)
    return eval_terminal_relaxation(model, traj)
