"""Explicit Runge-Kutta integration for user-supplied right-hand sides.

Two methods: adaptive Dormand-Prince 5(4) with a PI-free step controller
("rk45", the default) and classic fixed-step RK4 ("rk4").  The compiled
drivers elsewhere in the package implement the identical scheme for
expression-tape right-hand sides; this module is the reference path for
arbitrary Python callables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState, StepFailure

# Dormand-Prince tableau
_C = np.array([0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([0.2]),
    np.array([3.0 / 40.0, 9.0 / 40.0]),
    np.array([44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]),
    np.array([19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0]),
    np.array([9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0]),
    np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0]),
]
_E = np.array([
    71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
])


@dataclass
class IntegratorConfig:
    """Knobs for the integrators.

    method      "rk45" (adaptive) or "rk4" (fixed step)
    rtol, atol  error-control tolerances for rk45
    steps       step count for rk4
    bound_mesh  mesh size used when storing state-bound trajectories
    max_steps   safety limit on accepted rk45 steps
    """

    method: str = "rk45"
    rtol: float = 1e-8
    atol: float = 1e-10
    steps: int = 1000
    bound_mesh: int = 4000
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError(f"tolerances must be positive, got rtol={self.rtol}, atol={self.atol}")
        if self.steps < 1:
            raise ValueError(f"steps must be positive, got {self.steps}")
        if self.bound_mesh < 2000:
            raise ValueError(f"bound_mesh must be at least 2000, got {self.bound_mesh}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive, got {self.max_steps}")


@dataclass
class Trajectory:
    """Accepted mesh points of one integration."""

    ts: np.ndarray
    ys: np.ndarray

    @property
    def terminal(self) -> np.ndarray:
        return self.ys[-1]

    def __len__(self) -> int:
        return len(self.ts)


def _check_finite(y: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"state became non-finite at t = {t}")


def _initial_step(t0: float, tf: float, y0, f0, rtol: float, atol: float) -> float:
    sc = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / sc) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / sc) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * (tf - t0)
    else:
        h0 = 0.01 * d0 / d1
    return min(h0, 0.1 * (tf - t0))


def integrate(rhs, y0, span, config: IntegratorConfig | None = None) -> Trajectory:
    """Integrate y' = rhs(t, y) over span = (t0, tf).

    rhs maps (float, ndarray) to an ndarray.  Returns the accepted mesh
    including both endpoints.  Raises StepFailure when the controller
    stalls and NonFiniteState when the state leaves the reals.
    """
    cfg = config if config is not None else IntegratorConfig()
    t0, tf = float(span[0]), float(span[1])
    if not t0 < tf:
        raise ValueError(f"span must satisfy t0 < tf, got ({t0}, {tf})")
    y = np.asarray(y0, dtype=float).copy()
    if y.ndim != 1:
        raise ValueError(f"y0 must be 1-d, got shape {y.shape}")

    if cfg.method == "rk4":
        return _integrate_rk4(rhs, y, t0, tf, cfg.steps)
    return _integrate_rk45(rhs, y, t0, tf, cfg)


def _integrate_rk4(rhs, y, t0, tf, nsteps) -> Trajectory:
    h = (tf - t0) / nsteps
    ts = np.empty(nsteps + 1)
    ys = np.empty((nsteps + 1, y.shape[0]))
    ts[0] = t0
    ys[0] = y
    for i in range(nsteps):
        t = t0 + i * h
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(y, t + h)
        ts[i + 1] = t0 + (i + 1) * h
        ys[i + 1] = y
    ts[nsteps] = tf
    return Trajectory(ts=ts, ys=ys)


def _integrate_rk45(rhs, y, t0, tf, cfg) -> Trajectory:
    span = tf - t0
    n = y.shape[0]
    kk = np.empty((7, n))
    f0 = np.asarray(rhs(t0, y), dtype=float)
    h = _initial_step(t0, tf, y, f0, cfg.rtol, cfg.atol)
    t = t0
    ts = [t0]
    ys = [y.copy()]
    nsteps = 0
    while t < tf:
        if nsteps >= cfg.max_steps:
            raise StepFailure(f"exceeded {cfg.max_steps} accepted steps at t = {t}")
        if h < 1e-14 * span:
            raise StepFailure(f"step size collapsed to {h} at t = {t}")
        h = min(h, tf - t)
        kk[0] = rhs(t, y)
        for s in range(1, 6):
            ys_stage = y + h * (_A[s] @ kk[:s])
            kk[s] = rhs(t + _C[s] * h, ys_stage)
        y5 = y + h * (_A[6] @ kk[:6])
        kk[6] = rhs(t + h, y5)
        e = h * (_E @ kk)
        sc = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean((e / sc) ** 2)))
        if err <= 1.0:
            t = t + h
            if tf - t < 1e-12 * span:
                t = tf
            _check_finite(y5, t)
            y = y5.copy()
            ts.append(t)
            ys.append(y.copy())
            nsteps += 1
        if err <= 0.0:
            fac = 10.0
        else:
            fac = min(10.0, max(0.2, 0.9 * err ** -0.2))
        h = h * fac
    return Trajectory(ts=np.array(ts), ys=np.array(ys))
