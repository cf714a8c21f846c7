"""McCormick relaxation values and their arithmetic.

A McCormickValue carries a convex underestimate cv, a concave
overestimate cc, and the interval box of the underlying quantity.  Every
operation ends with a cut that clips cv and cc into the box; cv <= cc is
maintained throughout, with crossings up to SNAP_TOL silently snapped
and anything larger rejected as InvalidRelaxationPair.

No subgradients are propagated; bound optimization uses derivative-free
search instead.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from . import _kernels as _k
from .errors import InvalidRelaxationPair, OutOfRange
from .interval import Interval

SNAP_TOL = 1e-9


@dataclass(frozen=True)
class McCormickValue:
    cv: float
    cc: float
    box: Interval

    def __post_init__(self):
        cv = float(self.cv)
        cc = float(self.cc)
        if not (math.isfinite(cv) and math.isfinite(cc)):
            raise ValueError(f"relaxation estimates must be finite, got cv={cv}, cc={cc}")
        if cv > cc + SNAP_TOL:
            raise InvalidRelaxationPair(
                f"convex estimate {cv} exceeds concave estimate {cc} by more than {SNAP_TOL}"
            )
        cv, cc = _k.mc_cut(cv, cc, self.box.lo, self.box.hi)
        object.__setattr__(self, "cv", cv)
        object.__setattr__(self, "cc", cc)

    @property
    def gap(self) -> float:
        return self.cc - self.cv

    def astuple(self):
        return (self.cv, self.cc, self.box.lo, self.box.hi)


def _wrap(cv: float, cc: float, lo: float, hi: float) -> McCormickValue:
    return McCormickValue(cv, cc, Interval(lo, hi))


def mc_from_variable(value: float, box: Interval) -> McCormickValue:
    """Identity relaxation of a variable at a point of its box."""
    value = float(value)
    if not box.contains(value):
        raise OutOfRange(f"value {value} lies outside [{box.lo}, {box.hi}]")
    return McCormickValue(value, value, box)


def mc_from_state(cv: float, cc: float, box: Interval) -> McCormickValue:
    """Relaxation pair for a state component, clipped into its bounds.

    The pair may stick out of the box (the box is often tighter than
    what the pair's own dynamics know); clipping is the final cut.  A
    crossing beyond SNAP_TOL after clipping is an error.
    """
    cv = float(cv)
    cc = float(cc)
    if not (math.isfinite(cv) and math.isfinite(cc)):
        raise ValueError(f"relaxation estimates must be finite, got cv={cv}, cc={cc}")
    cv = min(max(cv, box.lo), box.hi)
    cc = min(max(cc, box.lo), box.hi)
    if cv > cc + SNAP_TOL:
        raise InvalidRelaxationPair(
            f"convex estimate {cv} exceeds concave estimate {cc} by more than {SNAP_TOL}"
        )
    if cv > cc:
        cv = cc
    return McCormickValue(cv, cc, box)


def mc_add(a: McCormickValue, b: McCormickValue) -> McCormickValue:
    return _wrap(*_k.mc_add(*a.astuple(), *b.astuple()))


def mc_sub(a: McCormickValue, b: McCormickValue) -> McCormickValue:
    return _wrap(*_k.mc_sub(*a.astuple(), *b.astuple()))


def mc_neg(a: McCormickValue) -> McCormickValue:
    return _wrap(*_k.mc_neg(*a.astuple()))


def mc_scale(a: McCormickValue, c: float) -> McCormickValue:
    return _wrap(*_k.mc_scale(*a.astuple(), float(c)))


def mc_mul(a: McCormickValue, b: McCormickValue) -> McCormickValue:
    return _wrap(*_k.mc_mul(*a.astuple(), *b.astuple()))


def mc_div(a: McCormickValue, b: McCormickValue) -> McCormickValue:
    # raises DivisionByZeroInterval when 0 is in b's box
    return _wrap(*_k.mc_div(*a.astuple(), *b.astuple()))


def mc_pow_int(a: McCormickValue, k: int) -> McCormickValue:
    if k != int(k) or k < 0:
        raise ValueError(f"integer power must be a nonnegative integer, got {k}")
    return _wrap(*_k.mc_pow(*a.astuple(), int(k)))


def mc_exp(a: McCormickValue) -> McCormickValue:
    return _wrap(*_k.mc_exp(*a.astuple()))
