"""Convex/concave relaxations and rigorous bounds for expected-value
costs of parametric ODEs with bounded random inputs."""

from ._backend import NUMBA_ENABLED, backend_name
from .errors import (
    BoundBlowup,
    CellOutsideSupport,
    DimensionError,
    DivisionByZeroInterval,
    EvalDomainError,
    InvalidRelaxationPair,
    NonFiniteState,
    OutOfRange,
    ParseError,
    StepFailure,
    StochRelaxError,
    ZeroProbabilityCell,
)
from .interval import (
    Interval,
    IntervalBox,
    get_inflation,
    iv_add,
    iv_div,
    iv_exp,
    iv_mul,
    iv_neg,
    iv_pow_int,
    iv_sub,
    set_inflation,
)
from .mccormick import (
    McCormickValue,
    mc_add,
    mc_div,
    mc_exp,
    mc_from_state,
    mc_from_variable,
    mc_mul,
    mc_neg,
    mc_pow_int,
    mc_scale,
    mc_sub,
)
from .expr import (
    ExprGraph,
    GraphBuilder,
    Model,
    eval_interval,
    eval_mccormick,
    eval_real,
    load_model,
    parse_expression,
    parse_model,
)
from .stochastics import (
    DistributionSpec,
    Partition,
    TruncatedNormal,
    Uniform,
    cell_conditional_mean,
    cell_probability,
    erf,
    sample,
    uniform_partition,
)
from .odeint import IntegratorConfig, Trajectory, integrate
from .staterelax import (
    RelaxationTrajectory,
    StateBoundTrajectory,
    compute_state_bounds,
    eval_terminal_relaxation,
    relax_terminal,
    solve_relaxation_ode,
)
from .expectation import (
    BoundReport,
    ExpectedValueRelaxation,
    LowerBoundResult,
    SaaResult,
    SurfaceResult,
    compute_bounds,
    grid_points,
    lower_bound,
    relax_expected_value,
    relaxation_surface,
    saa_estimate,
    simulate_terminal,
    upper_bound,
)
from .models import CIRCUIT_MODEL_TEXT, circuit_model, write_circuit_model

__version__ = "0.1.0"

__all__ = [
    "BoundBlowup",
    "BoundReport",
    "CIRCUIT_MODEL_TEXT",
    "CellOutsideSupport",
    "DimensionError",
    "DistributionSpec",
    "DivisionByZeroInterval",
    "EvalDomainError",
    "ExpectedValueRelaxation",
    "ExprGraph",
    "GraphBuilder",
    "IntegratorConfig",
    "Interval",
    "IntervalBox",
    "InvalidRelaxationPair",
    "LowerBoundResult",
    "McCormickValue",
    "Model",
    "NUMBA_ENABLED",
    "NonFiniteState",
    "OutOfRange",
    "ParseError",
    "Partition",
    "RelaxationTrajectory",
    "SaaResult",
    "StateBoundTrajectory",
    "StepFailure",
    "StochRelaxError",
    "SurfaceResult",
    "Trajectory",
    "TruncatedNormal",
    "Uniform",
    "ZeroProbabilityCell",
    "backend_name",
    "cell_conditional_mean",
    "cell_probability",
    "circuit_model",
    "compute_bounds",
    "grid_points",
    "compute_state_bounds",
    "erf",
    "eval_interval",
    "eval_mccormick",
    "eval_real",
    "eval_terminal_relaxation",
    "get_inflation",
    "integrate",
    "iv_add",
    "iv_div",
    "iv_exp",
    "iv_mul",
    "iv_neg",
    "iv_pow_int",
    "iv_sub",
    "load_model",
    "lower_bound",
    "mc_add",
    "mc_div",
    "mc_exp",
    "mc_from_state",
    "mc_from_variable",
    "mc_mul",
    "mc_neg",
    "mc_pow_int",
    "mc_scale",
    "mc_sub",
    "parse_expression",
    "parse_model",
    "relax_expected_value",
    "relax_terminal",
    "relaxation_surface",
    "saa_estimate",
    "sample",
    "set_inflation",
    "simulate_terminal",
    "solve_relaxation_ode",
    "uniform_partition",
    "upper_bound",
    "write_circuit_model",
]
