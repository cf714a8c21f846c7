"""Built-in example models."""

from __future__ import annotations

from .expr import Model, parse_model

# Negative-resistance oscillator: two-state nonlinear circuit whose
# inductance and capacitance scalings enter as parameters and whose
# initial state is a truncated-normal random input.  The cost is the
# expected first state at the final time.
CIRCUIT_MODEL_TEXT = """\
# negative-resistance oscillator, random initial state
[dims]
np = 2
nw = 2
nx = 2

[horizon]
t0 = 0.0
tf = 5.0

[pbox]
0.1, 0.3
0.1, 0.3

[wbox]
0.7, 1.3
0.7, 1.3

[dist]
truncnormal 1.0 0.1 0.7 1.3
truncnormal 1.0 0.1 0.7 1.3

[f]
x1 = p1*x2
x2 = -p2*(x1 - x2 + x2^3/3)

[x0]
x1 = w1
x2 = w2

[g]
g = x1
"""


def circuit_model(tf: float = 5.0) -> Model:
    """The oscillator model, optionally with a different final time."""
    model = parse_model(CIRCUIT_MODEL_TEXT, name="circuit")
    if tf != 5.0:
        model = model.with_tf(tf)
    return model


def write_circuit_model(path) -> None:
    """Write the oscillator model file verbatim."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CIRCUIT_MODEL_TEXT)
