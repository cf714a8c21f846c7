"""The pure-python fallback must match the compiled backend.

A subprocess runs with STOCHRELAX_NUMBA=0 and reports representative
values; observed agreement is exact, asserted here at 1e-12 to stay
robust against platform-level libm differences.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

import stochrelax as sr

_SCRIPT = r"""
import json
import numpy as np
import stochrelax as sr

cfg = sr.IntegratorConfig(bound_mesh=2000)
m = sr.circuit_model()
p = np.array([0.15, 0.22])
w = np.array([1.05, 0.95])
b = sr.compute_state_bounds(m, config=cfg)
cv, cc = sr.relax_terminal(m, p, w, b, cfg)
g, _ = sr.simulate_terminal(m, p, np.array([[1.05, 0.95], [0.8, 1.2]]), cfg)
part = sr.uniform_partition(m.wbox, 2, m.dist)
print(json.dumps({
    "backend": sr.backend_name(),
    "cv": cv,
    "cc": cc,
    "g0": float(g[0]),
    "g1": float(g[1]),
    "prob": float(part.probabilities[0]),
    "mean": float(part.conditional_means[0][0]),
    "erf": sr.erf(1.2345),
}))
"""


@pytest.fixture(scope="module")
def fallback():
    env = dict(os.environ, STOCHRELAX_NUMBA="0")
    proc = subprocess.run(
        [sys.executable, "-c", _SCRIPT],
        capture_output=True,
        text=True,
        env=env,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout.strip().splitlines()[-1])


def test_fallback_reports_python_backend(fallback):
    assert fallback["backend"] == "python"


def test_fallback_values_match(fallback):
    cfg = sr.IntegratorConfig(bound_mesh=2000)
    m = sr.circuit_model()
    p = np.array([0.15, 0.22])
    w = np.array([1.05, 0.95])
    b = sr.compute_state_bounds(m, config=cfg)
    cv, cc = sr.relax_terminal(m, p, w, b, cfg)
    g, _ = sr.simulate_terminal(m, p, np.array([[1.05, 0.95], [0.8, 1.2]]), cfg)
    part = sr.uniform_partition(m.wbox, 2, m.dist)
    here = {
        "cv": cv,
        "cc": cc,
        "g0": float(g[0]),
        "g1": float(g[1]),
        "prob": float(part.probabilities[0]),
        "mean": float(part.conditional_means[0][0]),
        "erf": sr.erf(1.2345),
    }
    for key, val in here.items():
        assert fallback[key] == pytest.approx(val, rel=1e-12, abs=1e-15), key


def test_in_process_backend_name():
    assert sr.backend_name() in ("numba", "python")
    if sr.NUMBA_ENABLED:
        assert sr.backend_name() == "numba"
