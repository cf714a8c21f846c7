"""Distributions over random inputs, box partitions, and sampling.

Random inputs are componentwise independent with bounded support; each
marginal is either uniform on [a, b] or a normal truncated to [a, b].
Partitions split the support box into axis-aligned cells; conditional
cell statistics are closed-form via the error function.

Sampling is inverse-CDF on rng.random() uniforms, drawn component by
component, so a fixed seed yields identical draws on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
import itertools
import math

import numpy as np

from . import _kernels as _k
from .errors import CellOutsideSupport, DimensionError, ZeroProbabilityCell
from .interval import Interval, IntervalBox

_PROB_FLOOR = 1e-300
_SUPPORT_TOL = 1e-12


def erf(x: float) -> float:
    """Error function, accurate to about 1e-15 absolute."""
    return _k.erf_scalar(float(x))


def _norm_cdf(x: float) -> float:
    return _k.norm_cdf_scalar(float(x))


def _norm_pdf(x: float) -> float:
    return _k.norm_pdf_scalar(float(x))


@dataclass(frozen=True)
class Uniform:
    """Uniform marginal on [a, b]."""

    a: float
    b: float

    def validate(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"uniform support must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise ValueError(f"uniform support must satisfy a < b, got [{self.a}, {self.b}]")

    def support(self):
        return (self.a, self.b)

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def interval_probability(self, lo: float, hi: float) -> float:
        return (hi - lo) / (self.b - self.a)

    def interval_mean(self, lo: float, hi: float) -> float:
        return 0.5 * (lo + hi)

    def transform(self, u: np.ndarray) -> np.ndarray:
        return self.a + u * (self.b - self.a)


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal(mu, sigma) truncated to [a, b]."""

    mu: float
    sigma: float
    a: float
    b: float

    def validate(self) -> None:
        vals = (self.mu, self.sigma, self.a, self.b)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"truncated normal parameters must be finite, got {vals}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.a < self.b:
            raise ValueError(f"truncation must satisfy a < b, got [{self.a}, {self.b}]")

    def support(self):
        return (self.a, self.b)

    def _z(self, v: float) -> float:
        return (v - self.mu) / self.sigma

    def _mass(self) -> float:
        return _norm_cdf(self._z(self.b)) - _norm_cdf(self._z(self.a))

    def mean(self) -> float:
        return self.interval_mean(self.a, self.b)

    def interval_probability(self, lo: float, hi: float) -> float:
        return (_norm_cdf(self._z(hi)) - _norm_cdf(self._z(lo))) / self._mass()

    def interval_mean(self, lo: float, hi: float) -> float:
        alpha = self._z(lo)
        beta = self._z(hi)
        num = _norm_pdf(alpha) - _norm_pdf(beta)
        den = _norm_cdf(beta) - _norm_cdf(alpha)
        if den <= _PROB_FLOOR:
            raise ZeroProbabilityCell(
                f"interval [{lo}, {hi}] carries no probability mass"
            )
        return self.mu + self.sigma * num / den

    def transform(self, u: np.ndarray) -> np.ndarray:
        out = np.empty(u.shape[0])
        _k.sample_truncnorm(np.asarray(u, dtype=float), self.mu, self.sigma, self.a, self.b, out)
        return out


@dataclass(frozen=True)
class DistributionSpec:
    """Independent product of bounded marginals, one per random input."""

    marginals: tuple

    def __post_init__(self):
        for m in self.marginals:
            m.validate()

    @property
    def n_w(self) -> int:
        return len(self.marginals)

    @property
    def support(self) -> IntervalBox:
        return IntervalBox([Interval(*m.support()) for m in self.marginals])

    def mean(self) -> np.ndarray:
        return np.array([m.mean() for m in self.marginals])


@dataclass(eq=False)
class Partition:
    """Axis-aligned cells covering a support box, with their statistics."""

    cells: tuple
    probabilities: np.ndarray
    conditional_means: np.ndarray
    counts: tuple

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def _check_cell(dist: DistributionSpec, cell: IntervalBox) -> None:
    if len(cell) != dist.n_w:
        raise DimensionError(
            f"cell has {len(cell)} components, distribution has {dist.n_w}"
        )
    sup = dist.support
    for j, (iv, siv) in enumerate(zip(cell, sup)):
        tol = _SUPPORT_TOL * max(1.0, abs(siv.lo), abs(siv.hi))
        if iv.lo < siv.lo - tol or iv.hi > siv.hi + tol:
            raise CellOutsideSupport(
                f"cell component {j + 1} is [{iv.lo}, {iv.hi}], outside the support "
                f"[{siv.lo}, {siv.hi}]"
            )


def cell_probability(dist: DistributionSpec, cell: IntervalBox) -> float:
    """Probability mass of an axis-aligned cell inside the support."""
    _check_cell(dist, cell)
    prob = 1.0
    for m, iv in zip(dist.marginals, cell):
        prob *= m.interval_probability(iv.lo, iv.hi)
    return prob


def cell_conditional_mean(dist: DistributionSpec, cell: IntervalBox) -> np.ndarray:
    """Conditional mean of the random input given that it lies in the cell."""
    _check_cell(dist, cell)
    prob = cell_probability(dist, cell)
    if prob <= _PROB_FLOOR:
        raise ZeroProbabilityCell(
            f"cell {cell!r} carries no probability mass"
        )
    return np.array([m.interval_mean(iv.lo, iv.hi) for m, iv in zip(dist.marginals, cell)])


def uniform_partition(wbox: IntervalBox, counts, dist: DistributionSpec) -> Partition:
    """Split wbox into a uniform grid of cells and attach their statistics.

    counts gives the number of subintervals per component; an int is
    broadcast to every component.  Cells are ordered lexicographically
    with the first component slowest.
    """
    n = len(wbox)
    if isinstance(counts, (int, np.integer)):
        counts = (int(counts),) * n
    counts = tuple(int(c) for c in counts)
    if len(counts) != n:
        raise DimensionError(f"counts has {len(counts)} entries, box has {n}")
    if any(c < 1 for c in counts):
        raise ValueError(f"cell counts must be positive, got {counts}")
    if dist.n_w != n:
        raise DimensionError(f"distribution has {dist.n_w} components, box has {n}")
    edges = [np.linspace(iv.lo, iv.hi, c + 1) for iv, c in zip(wbox, counts)]
    cells = []
    for multi in itertools.product(*(range(c) for c in counts)):
        cells.append(
            IntervalBox(
                [Interval(edges[j][i], edges[j][i + 1]) for j, i in enumerate(multi)]
            )
        )
    probs = np.array([cell_probability(dist, c) for c in cells])
    means = np.array([cell_conditional_mean(dist, c) for c in cells])
    return Partition(
        cells=tuple(cells), probabilities=probs, conditional_means=means, counts=counts
    )


def sample(dist: DistributionSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n joint samples, shape (n, n_w), by inverse CDF per component."""
    if n < 0:
        raise ValueError(f"sample count must be nonnegative, got {n}")
    out = np.empty((n, dist.n_w))
    for j, m in enumerate(dist.marginals):
        u = rng.random(n)
        v = m.transform(u)
        lo, hi = m.support()
        np.clip(v, lo, hi, out=v)
        out[:, j] = v
    return out
