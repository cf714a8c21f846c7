"""Interval arithmetic: frozen examples, containment, inclusion monotonicity."""

import math

import numpy as np
import pytest

import stochrelax as sr
from stochrelax import Interval, IntervalBox


def test_constructor_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)
    with pytest.raises(ValueError):
        Interval(math.nan, 1.0)


def test_accessors():
    iv = Interval(-1.0, 3.0)
    assert iv.width == 4.0
    assert iv.mid == 1.0
    assert iv.contains(0.0)
    assert iv.contains(3.0)
    assert not iv.contains(3.1)
    assert iv.contains(3.05, tol=0.1)
    assert iv.encloses(Interval(0.0, 1.0))
    assert not iv.encloses(Interval(0.0, 4.0))
    assert Interval.point(0.5).is_degenerate()
    assert not iv.is_degenerate()


def test_frozen_arithmetic():
    a = Interval(1.0, 2.0)
    b = Interval(-3.0, 4.0)
    assert sr.iv_add(a, b) == Interval(-2.0, 6.0)
    assert sr.iv_sub(a, b) == Interval(-3.0, 5.0)
    assert sr.iv_neg(b) == Interval(-4.0, 3.0)
    assert sr.iv_mul(a, b) == Interval(-6.0, 8.0)
    assert sr.iv_pow_int(Interval(-2.0, 3.0), 2) == Interval(0.0, 9.0)
    assert sr.iv_pow_int(Interval(-2.0, 3.0), 3) == Interval(-8.0, 27.0)
    assert sr.iv_pow_int(b, 0) == Interval(1.0, 1.0)
    d = sr.iv_div(Interval(1.0, 1.0), Interval(2.0, 4.0))
    assert d == Interval(0.25, 0.5)
    e = sr.iv_exp(Interval(0.0, 1.0))
    assert e.lo == 1.0
    assert e.hi == math.exp(1.0)


def test_division_by_sign_indefinite_interval_raises():
    with pytest.raises(sr.DivisionByZeroInterval):
        sr.iv_div(Interval(1.0, 2.0), Interval(-1.0, 1.0))
    with pytest.raises(sr.DivisionByZeroInterval):
        sr.iv_div(Interval(1.0, 2.0), Interval(0.0, 1.0))


def _random_interval(rng, scale=3.0):
    a, b = sorted(rng.uniform(-scale, scale, 2))
    return Interval(float(a), float(b))


def test_containment_property():
    # f(x) op g(y) must land inside the interval extension
    rng = np.random.default_rng(42)
    for _ in range(500):
        a = _random_interval(rng)
        b = _random_interval(rng)
        x = rng.uniform(a.lo, a.hi)
        y = rng.uniform(b.lo, b.hi)
        assert sr.iv_add(a, b).contains(x + y, tol=1e-12)
        assert sr.iv_sub(a, b).contains(x - y, tol=1e-12)
        assert sr.iv_mul(a, b).contains(x * y, tol=1e-10)
        k = int(rng.integers(2, 6))
        assert sr.iv_pow_int(a, k).contains(x**k, tol=1e-9)
        assert sr.iv_exp(Interval(a.lo / 3, a.hi / 3)).contains(
            math.exp(x / 3), tol=1e-10
        )
        if b.lo > 0.1 or b.hi < -0.1:
            assert sr.iv_div(a, b).contains(x / y, tol=1e-9)


def test_inclusion_monotonicity():
    rng = np.random.default_rng(7)
    for _ in range(500):
        big_a = _random_interval(rng)
        big_b = _random_interval(rng)
        lo = rng.uniform(big_a.lo, big_a.hi)
        hi = rng.uniform(lo, big_a.hi)
        sub_a = Interval(float(lo), float(hi))
        lo = rng.uniform(big_b.lo, big_b.hi)
        hi = rng.uniform(lo, big_b.hi)
        sub_b = Interval(float(lo), float(hi))
        tol = 1e-12
        assert sr.iv_add(big_a, big_b).encloses(sr.iv_add(sub_a, sub_b), tol)
        assert sr.iv_sub(big_a, big_b).encloses(sr.iv_sub(sub_a, sub_b), tol)
        assert sr.iv_mul(big_a, big_b).encloses(sr.iv_mul(sub_a, sub_b), tol)
        k = int(rng.integers(2, 6))
        assert sr.iv_pow_int(big_a, k).encloses(sr.iv_pow_int(sub_a, k), tol)


def test_inflation_widens_and_still_contains():
    sr.set_inflation(1e-12)
    try:
        a = Interval(1.0, 2.0)
        b = Interval(3.0, 4.0)
        plain = Interval(4.0, 6.0)
        padded = sr.iv_add(a, b)
        assert padded.encloses(plain)
        assert padded.lo < plain.lo or padded.hi > plain.hi
        assert sr.get_inflation() == 1e-12
    finally:
        sr.set_inflation(0.0)
    assert sr.get_inflation() == 0.0


def test_interval_box():
    box = IntervalBox([Interval(0.0, 1.0), Interval(-2.0, 2.0)])
    assert box == IntervalBox.from_arrays([0.0, -2.0], [1.0, 2.0])
    assert hash(box) == hash(IntervalBox.from_arrays([0.0, -2.0], [1.0, 2.0]))
    np.testing.assert_array_equal(box.lo, [0.0, -2.0])
    np.testing.assert_array_equal(box.hi, [1.0, 2.0])
    np.testing.assert_array_equal(box.widths, [1.0, 4.0])
    np.testing.assert_array_equal(box.mid, [0.5, 0.0])
    assert box.contains([0.5, 0.0])
    assert not box.contains([0.5, 2.5])
    assert box.encloses(IntervalBox.from_arrays([0.2, -1.0], [0.8, 1.0]))
    assert not box.encloses(IntervalBox.from_arrays([0.2, -3.0], [0.8, 1.0]))
    assert len(box) == 2
