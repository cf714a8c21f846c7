"""Shared fixtures.

The session-scoped warmup touches every jitted kernel once so the timed
tests measure compute, not compilation.  With the numba backend disabled
the same calls are cheap no-ops.
"""

import re

import numpy as np
import pytest

import stochrelax as sr

_ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion.

    The lines are replayed in a dedicated section of the terminal
    summary, so they stay visible under default output capture.
    """

    def _report(num, label, ok, detail=""):
        line = f"[criterion {num}] {label}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES[num] = line
        return line

    return _report


def pytest_terminal_summary(terminalreporter):
    # a criterion that blew up before reporting still gets its line
    for key in ("failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", rep.nodeid)
            if m and int(m.group(1)) not in _ACCEPTANCE_LINES:
                num = int(m.group(1))
                _ACCEPTANCE_LINES[num] = (
                    f"[criterion {num}] {rep.nodeid.split('::')[-1]}: "
                    "FAIL (raised before reporting)"
                )
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[num])


@pytest.fixture(scope="session")
def circuit():
    return sr.circuit_model()


@pytest.fixture(scope="session")
def circuit_bounds(circuit):
    # default config, full parameter and disturbance boxes
    return sr.compute_state_bounds(circuit)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels(circuit):
    cfg = sr.IntegratorConfig(bound_mesh=2000)
    b = sr.compute_state_bounds(circuit, config=cfg)
    p = np.array([0.2, 0.2])
    w = np.array([1.0, 1.0])
    sr.relax_terminal(circuit, p, w, b, cfg)
    sr.simulate_terminal(circuit, p, w[None, :], cfg)
    sr.saa_estimate(circuit, p, 4, seed=0, config=cfg)
    rk4 = sr.IntegratorConfig(method="rk4", steps=50, bound_mesh=2000)
    sr.simulate_terminal(circuit, p, w[None, :], rk4)
    sr.solve_relaxation_ode(circuit, p, w, b, rk4)
    sr.erf(0.5)
    yield
