"""State bounds and the relaxation ODE on the circuit model."""

import numpy as np
import pytest

import stochrelax as sr
from stochrelax import IntegratorConfig, IntervalBox


def _true_trajectory(model, p, w, cfg=None):
    def rhs(t, y):
        return sr.eval_real(model.f, t=t, p=p, w=w, x=y)

    y0 = sr.eval_real(model.x0, t=model.t0, p=p, w=w)
    return sr.integrate(rhs, y0, (model.t0, model.tf), cfg)


def test_bounds_enclose_sampled_trajectories(circuit, circuit_bounds):
    rng = np.random.default_rng(17)
    for _ in range(20):
        p = np.array([rng.uniform(iv.lo, iv.hi) for iv in circuit.pbox])
        w = np.array([rng.uniform(iv.lo, iv.hi) for iv in circuit.wbox])
        traj = _true_trajectory(circuit, p, w)
        for t, y in zip(traj.ts, traj.ys):
            lo, hi = circuit_bounds.at(float(t))
            assert (lo - 1e-6 <= y).all() and (y <= hi + 1e-6).all()


def test_bounds_metadata(circuit, circuit_bounds):
    assert circuit_bounds.t0 == circuit.t0
    assert circuit_bounds.tf == circuit.tf
    assert circuit_bounds.pbox == circuit.pbox
    assert circuit_bounds.wbox == circuit.wbox
    term = circuit_bounds.terminal_box()
    lo, hi = circuit_bounds.at(circuit.tf)
    np.testing.assert_array_equal(term.lo, lo)
    np.testing.assert_array_equal(term.hi, hi)
    # the initial box is the interval hull of x0 over wbox
    lo0, hi0 = circuit_bounds.at(circuit.t0)
    np.testing.assert_allclose(lo0, [0.7, 0.7])
    np.testing.assert_allclose(hi0, [1.3, 1.3])


def test_at_rejects_time_outside_horizon(circuit_bounds):
    with pytest.raises(sr.OutOfRange):
        circuit_bounds.at(-0.1)
    with pytest.raises(sr.OutOfRange):
        circuit_bounds.at(5.1)


def test_degenerate_boxes_collapse_to_the_trajectory(circuit):
    p = np.array([0.2, 0.2])
    w = np.array([1.0, 1.0])
    pbox = IntervalBox.from_arrays(p, p)
    wbox = IntervalBox.from_arrays(w, w)
    b = sr.compute_state_bounds(circuit, pbox=pbox, wbox=wbox)
    lo, hi = b.at(circuit.tf)
    assert (hi - lo <= 1e-6).all()
    xt = _true_trajectory(circuit, p, w).terminal
    assert (lo - 1e-6 <= xt).all() and (xt <= hi + 1e-6).all()


def test_sub_box_must_be_inside_model_box(circuit):
    with pytest.raises(sr.OutOfRange):
        sr.compute_state_bounds(
            circuit, pbox=IntervalBox.from_arrays([0.05, 0.1], [0.3, 0.3])
        )
    with pytest.raises(sr.OutOfRange):
        sr.compute_state_bounds(
            circuit, wbox=IntervalBox.from_arrays([0.7, 0.7], [1.4, 1.3])
        )


BLOWUP = """[dims]
np = 1
nw = 1
nx = 1

[horizon]
t0 = 0.0
tf = 2.0

[pbox]
0.1, 0.3

[wbox]
1.0, 2.0

[dist]
uniform 1.0 2.0

[f]
x1 = x1^2

[x0]
x1 = w1

[g]
g = x1
"""


def test_bound_blowup_raises():
    model = sr.parse_model(BLOWUP, name="blowup")
    with pytest.raises(sr.BoundBlowup):
        sr.compute_state_bounds(model)


def test_relaxation_sandwich_and_tube(circuit, circuit_bounds):
    rng = np.random.default_rng(29)
    for _ in range(10):
        p = np.array([rng.uniform(iv.lo, iv.hi) for iv in circuit.pbox])
        w = np.array([rng.uniform(iv.lo, iv.hi) for iv in circuit.wbox])
        traj = sr.solve_relaxation_ode(circuit, p, w, circuit_bounds)
        xt = _true_trajectory(circuit, p, w).terminal
        cv, cc = traj.terminal_cv, traj.terminal_cc
        assert (cv - 1e-6 <= xt).all() and (xt <= cc + 1e-6).all()
        lo, hi = circuit_bounds.at(circuit.tf)
        assert (lo - 1e-9 <= cv).all() and (cc <= hi + 1e-9).all()
        assert (cv <= cc + 1e-12).all()


def test_relaxation_point_validation(circuit, circuit_bounds):
    with pytest.raises(sr.OutOfRange):
        sr.solve_relaxation_ode(
            circuit, np.array([0.5, 0.2]), np.array([1.0, 1.0]), circuit_bounds
        )
    with pytest.raises(sr.OutOfRange):
        sr.solve_relaxation_ode(
            circuit, np.array([0.2, 0.2]), np.array([0.5, 1.0]), circuit_bounds
        )


def test_degenerate_point_relaxation_is_tight(circuit):
    p = np.array([0.2, 0.2])
    w = np.array([1.0, 1.0])
    pbox = IntervalBox.from_arrays(p, p)
    wbox = IntervalBox.from_arrays(w, w)
    b = sr.compute_state_bounds(circuit, pbox=pbox, wbox=wbox)
    cv, cc = sr.relax_terminal(circuit, p, w, b)
    xt = _true_trajectory(circuit, p, w).terminal
    assert cv == pytest.approx(xt[0], abs=1e-6)
    assert cc == pytest.approx(xt[0], abs=1e-6)


def test_fixed_step_relaxation_agrees_with_adaptive(circuit, circuit_bounds):
    p = np.array([0.15, 0.25])
    w = np.array([0.9, 1.1])
    a = sr.solve_relaxation_ode(circuit, p, w, circuit_bounds)
    cfg = IntegratorConfig(method="rk4", steps=2000)
    b = sr.solve_relaxation_ode(circuit, p, w, circuit_bounds, cfg)
    np.testing.assert_allclose(a.terminal_cv, b.terminal_cv, atol=1e-5)
    np.testing.assert_allclose(a.terminal_cc, b.terminal_cc, atol=1e-5)


def test_eval_terminal_matches_relax_terminal(circuit, circuit_bounds):
    p = np.array([0.22, 0.18])
    w = np.array([1.05, 0.95])
    traj = sr.solve_relaxation_ode(circuit, p, w, circuit_bounds)
    pair = sr.eval_terminal_relaxation(circuit, traj)
    assert pair == sr.relax_terminal(circuit, p, w, circuit_bounds)
    cv, cc = pair
    assert cv <= cc
