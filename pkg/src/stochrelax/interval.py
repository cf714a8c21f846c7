"""Closed-interval arithmetic over finite floats.

Operations use outward-exact endpoint formulas without directed rounding.
An optional relative inflation factor (default 0) widens every operation
result by factor * width / 2 on each side, as a cheap hedge against
accumulated rounding; it is global to the module.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels as _k
from .errors import DimensionError

_INFLATION = 0.0


def set_inflation(factor: float) -> None:
    """Set the global relative inflation factor applied to op results."""
    global _INFLATION
    if not (factor >= 0.0 and math.isfinite(factor)):
        raise ValueError(f"inflation factor must be finite and >= 0, got {factor}")
    _INFLATION = float(factor)


def get_inflation() -> float:
    return _INFLATION


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with finite endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def encloses(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)


class IntervalBox:
    """A Cartesian product of intervals, one per coordinate."""

    __slots__ = ("intervals",)

    def __init__(self, intervals):
        self.intervals = tuple(
            iv if isinstance(iv, Interval) else Interval(iv[0], iv[1]) for iv in intervals
        )

    @staticmethod
    def from_arrays(lo, hi) -> "IntervalBox":
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionError(f"box endpoint arrays must be 1-d and equal length, got {lo.shape} and {hi.shape}")
        return IntervalBox([Interval(a, b) for a, b in zip(lo, hi)])

    @property
    def lo(self) -> np.ndarray:
        return np.array([iv.lo for iv in self.intervals])

    @property
    def hi(self) -> np.ndarray:
        return np.array([iv.hi for iv in self.intervals])

    @property
    def widths(self) -> np.ndarray:
        return np.array([iv.width for iv in self.intervals])

    @property
    def mid(self) -> np.ndarray:
        return np.array([iv.mid for iv in self.intervals])

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (len(self),):
            raise DimensionError(f"point has {x.shape} entries, box has {len(self)}")
        return all(iv.contains(v, tol) for iv, v in zip(self.intervals, x))

    def encloses(self, other: "IntervalBox", tol: float = 0.0) -> bool:
        if len(other) != len(self):
            raise DimensionError(f"boxes have different lengths: {len(self)} vs {len(other)}")
        return all(a.encloses(b, tol) for a, b in zip(self.intervals, other.intervals))

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    def __iter__(self):
        return iter(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalBox):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        parts = ", ".join(f"[{iv.lo}, {iv.hi}]" for iv in self.intervals)
        return f"IntervalBox({parts})"


def _finish(lo: float, hi: float) -> Interval:
    if _INFLATION > 0.0:
        pad = 0.5 * _INFLATION * (hi - lo)
        lo -= pad
        hi += pad
    return Interval(lo, hi)


def iv_add(a: Interval, b: Interval) -> Interval:
    return _finish(*_k.iv_add(a.lo, a.hi, b.lo, b.hi))


def iv_sub(a: Interval, b: Interval) -> Interval:
    return _finish(*_k.iv_sub(a.lo, a.hi, b.lo, b.hi))


def iv_neg(a: Interval) -> Interval:
    return _finish(*_k.iv_neg(a.lo, a.hi))


def iv_mul(a: Interval, b: Interval) -> Interval:
    return _finish(*_k.iv_mul(a.lo, a.hi, b.lo, b.hi))


def iv_div(a: Interval, b: Interval) -> Interval:
    # raises DivisionByZeroInterval when 0 is in b
    return _finish(*_k.iv_div(a.lo, a.hi, b.lo, b.hi))


def iv_pow_int(a: Interval, k: int) -> Interval:
    if k != int(k) or k < 0:
        raise ValueError(f"integer power must be a nonnegative integer, got {k}")
    return _finish(*_k.iv_pow(a.lo, a.hi, int(k)))


def iv_exp(a: Interval) -> Interval:
    return _finish(*_k.iv_exp(a.lo, a.hi))
