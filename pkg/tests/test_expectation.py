"""Partitioned expected-value relaxations, bounds, search, and sampling.

Regression values were produced by this implementation at defaults and
frozen after the enclosure and convexity properties had been verified
against independent simulation.
"""

import math

import numpy as np
import pytest

import stochrelax as sr
from stochrelax import IntegratorConfig, IntervalBox


P0 = np.array([0.2, 0.2])

# (cells per dim, gcv, gcc) at P0, default config
FROZEN = [
    (1, 0.68508826410536872, 2.1871023162491712),
    (4, 1.2043805696898604, 1.9078306367584783),
    (8, 1.2901997830681873, 1.8637437986892378),
]


@pytest.mark.parametrize("per_dim,gcv,gcc", FROZEN)
def test_frozen_relaxation_values(circuit, per_dim, gcv, gcc):
    part = sr.uniform_partition(circuit.wbox, per_dim, circuit.dist)
    cv, cc = sr.relax_expected_value(circuit, P0, part)
    assert cv == pytest.approx(gcv, rel=1e-9)
    assert cc == pytest.approx(gcc, rel=1e-9)


def test_default_partition_is_single_cell(circuit):
    cv, cc = sr.relax_expected_value(circuit, P0)
    assert cv == pytest.approx(FROZEN[0][1], rel=1e-9)
    assert cc == pytest.approx(FROZEN[0][2], rel=1e-9)


def test_probability_weighting(circuit):
    # the relaxation is a probability-weighted sum of per-cell pairs,
    # so a two-cell split must stay between the cell extremes
    part = sr.uniform_partition(circuit.wbox, (2, 1), circuit.dist)
    rel = sr.ExpectedValueRelaxation(circuit, part)
    cv, cc = rel.evaluate(P0)
    assert cv <= cc
    assert part.probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_evaluate_many_matches_evaluate(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    rel = sr.ExpectedValueRelaxation(circuit, part)
    pts = np.array([[0.2, 0.2], [0.1, 0.3], [0.25, 0.15]])
    cv1, cc1 = rel.evaluate_many(pts, jobs=1)
    cv2, cc2 = rel.evaluate_many(pts, jobs=2)
    np.testing.assert_array_equal(cv1, cv2)
    np.testing.assert_array_equal(cc1, cc2)
    for i, q in enumerate(pts):
        a, b = rel.evaluate(q)
        assert cv1[i] == a
        assert cc1[i] == b


def test_point_outside_pbox_rejected(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    rel = sr.ExpectedValueRelaxation(circuit, part)
    with pytest.raises(sr.OutOfRange):
        rel.evaluate(np.array([0.9, 0.9]))


def test_tube_cache_reuse(circuit):
    from stochrelax.expectation import _RELAX_CACHE

    part = sr.uniform_partition(circuit.wbox, 3, circuit.dist)
    sr.relax_expected_value(circuit, P0, part)
    n = len(_RELAX_CACHE)
    sr.relax_expected_value(circuit, np.array([0.15, 0.25]), part)
    assert len(_RELAX_CACHE) == n  # same tubes, no new entry


def test_lower_bound_structure(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    res = sr.lower_bound(circuit, part, budget=200)
    assert res.value == pytest.approx(1.0126284217869737, rel=1e-9)
    assert res.n_evals == 93
    assert circuit.pbox.contains(res.p)
    cv_at_argmin, _ = sr.relax_expected_value(circuit, res.p, part)
    assert cv_at_argmin == pytest.approx(res.value, rel=1e-12)


def test_budget_is_respected(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    res = sr.lower_bound(circuit, part, budget=10)
    assert res.n_evals <= 10


def test_compute_bounds_report(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    rep = sr.compute_bounds(circuit, part, budget=200)
    assert rep.lower == pytest.approx(1.0126284217869737, rel=1e-9)
    assert rep.upper == pytest.approx(1.6607614725984385, rel=1e-9)
    assert rep.gap == pytest.approx(rep.upper - rep.lower)
    assert rep.cells == (2, 2)
    assert rep.lower <= rep.upper


def test_upper_bound_at_point(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    ub = sr.upper_bound(circuit, P0, part)
    cv, cc = sr.relax_expected_value(circuit, P0, part)
    # degenerate parameter box tightens the tube, so the pointwise
    # overestimate can only improve on the full-box concave value
    assert ub <= cc + 1e-9
    assert cv - 1e-9 <= ub


def test_lower_bound_degenerate_pbox_matches_evaluation(circuit):
    q = np.array([0.17, 0.23])
    box = IntervalBox.from_arrays(q, q)
    part = sr.uniform_partition(circuit.wbox, 4, circuit.dist)
    res = sr.lower_bound(circuit, part, pbox=box)
    cv, _ = sr.relax_expected_value(circuit, q, part, pbox=box)
    assert res.value == pytest.approx(cv, abs=1e-9)
    assert res.n_evals == 1


def test_saa_determinism_and_scaling(circuit):
    a = sr.saa_estimate(circuit, P0, 2000, seed=5)
    b = sr.saa_estimate(circuit, P0, 2000, seed=5)
    assert a.mean == b.mean and a.stderr == b.stderr
    c = sr.saa_estimate(circuit, P0, 2000, seed=6)
    assert c.mean != a.mean
    big = sr.saa_estimate(circuit, P0, 8000, seed=5)
    # quadrupling the sample roughly halves the standard error
    assert big.stderr < 0.75 * a.stderr
    assert a.n == 2000 and a.seed == 5
    with pytest.raises(ValueError):
        sr.saa_estimate(circuit, P0, 1, seed=5)


def test_frozen_saa_value(circuit):
    s = sr.saa_estimate(circuit, P0, 20_000, seed=7)
    assert s.mean == pytest.approx(1.6555058765106421, rel=1e-12)
    assert s.stderr == pytest.approx(0.00076169628080256801, rel=1e-9)


def test_saa_lands_inside_relaxation_interval(circuit):
    part = sr.uniform_partition(circuit.wbox, 8, circuit.dist)
    cv, cc = sr.relax_expected_value(circuit, P0, part)
    s = sr.saa_estimate(circuit, P0, 20_000, seed=7)
    assert cv - 3 * s.stderr <= s.mean <= cc + 3 * s.stderr


def test_simulate_terminal_shapes(circuit):
    rng = np.random.default_rng(1)
    W = sr.sample(circuit.dist, rng, 32)
    g, xend = sr.simulate_terminal(circuit, P0, W)
    assert g.shape == (32,)
    assert xend.shape == (32, 2)
    # g = x1 for the circuit cost
    np.testing.assert_array_equal(g, xend[:, 0])


def test_simulate_terminal_failure_is_reported():
    text = sr.CIRCUIT_MODEL_TEXT.replace("x1 = p1*x2", "x1 = x1^2 + p1*x2")
    model = sr.parse_model(text, name="explosive")
    W = np.full((3, 2), 1.3)
    with pytest.raises(sr.StepFailure, match="3 of 3"):
        sr.simulate_terminal(model, np.array([0.3, 0.1]), W)


def test_grid_points_order(circuit):
    pts = sr.grid_points(circuit.pbox, (3, 2))
    assert pts.shape == (6, 2)
    np.testing.assert_allclose(pts[0], [0.1, 0.1])
    np.testing.assert_allclose(pts[1], [0.1, 0.3])  # first coordinate slowest
    np.testing.assert_allclose(pts[-1], [0.3, 0.3])


def test_relaxation_surface(circuit):
    part = sr.uniform_partition(circuit.wbox, 2, circuit.dist)
    surf = sr.relaxation_surface(circuit, part, shape=(3, 3))
    assert surf.shape == (3, 3)
    assert surf.points.shape == (9, 2)
    assert surf.gcv.shape == (9,)
    assert (surf.gcv <= surf.gcc + 1e-12).all()
    again = sr.relaxation_surface(circuit, part, shape=(3, 3), jobs=2)
    np.testing.assert_array_equal(surf.gcv, again.gcv)
    np.testing.assert_array_equal(surf.gcc, again.gcc)


LINEAR = """[dims]
np = 1
nw = 1
nx = 1

[horizon]
t0 = 0.0
tf = 5.0

[pbox]
0.1, 0.3

[wbox]
0.7, 1.3

[dist]
uniform 0.7 1.3

[f]
x1 = -x1

[x0]
x1 = w1

[g]
g = x1
"""


def test_linear_model_relaxations_are_exact():
    model = sr.parse_model(LINEAR, name="decay")
    want = math.exp(-5.0)
    for per_dim in (1, 4, 16):
        part = sr.uniform_partition(model.wbox, per_dim, model.dist)
        cv, cc = sr.relax_expected_value(model, np.array([0.2]), part)
        assert cv == pytest.approx(want, abs=1e-6)
        assert cc == pytest.approx(want, abs=1e-6)


def test_compass_search_on_flat_objective():
    # the decay cost ignores p, so the search should stop quickly
    model = sr.parse_model(LINEAR, name="decay")
    part = sr.uniform_partition(model.wbox, 2, model.dist)
    res = sr.lower_bound(model, part, budget=200)
    assert res.value == pytest.approx(math.exp(-5.0), abs=1e-6)
    assert res.n_evals < 100
