"""Parser, pretty printer, and the three tape interpreters."""

import math

import numpy as np
import pytest

import stochrelax as sr
from stochrelax import Interval, mc_from_variable
from stochrelax.expr import GraphBuilder, parse_expression


def _graph(text, n_p=2, n_w=2, n_x=2, allow_t=True, allow_x=True):
    gb = GraphBuilder(n_p, n_w, n_x, allow_t=allow_t, allow_x=allow_x)
    root = parse_expression(text, gb, line_no=1)
    return gb.finish([root], ["y"])


CASES = [
    ("2 + 3 * 4", 14.0),
    ("2 * 3 ^ 2", 18.0),
    ("-2 ^ 2", -4.0),
    ("(1 + 2) ^ 2", 9.0),
    ("6 / 3 / 2", 1.0),
    ("2 - 3 - 4", -5.0),
    ("1e-3 + 2.5E+2", 250.001),
    ("exp(0) + exp(1)", 1.0 + math.e),
    ("p1 + 2 * w2 - x1 / 4", 0.15 + 2 * 0.9 - 1.5 / 4),
    ("-p2 * (x1 - x2 + x2 ^ 3 / 3)", -0.25 * (1.5 - 0.5 + 0.125 / 3)),
    ("t * t", 4.0),
]


@pytest.mark.parametrize("text,expected", CASES)
def test_eval_real_matches_hand_values(text, expected):
    out = sr.eval_real(
        _graph(text),
        t=2.0,
        p=np.array([0.15, 0.25]),
        w=np.array([0.8, 0.9]),
        x=np.array([1.5, 0.5]),
    )
    assert out[0] == pytest.approx(expected, rel=1e-14)


def test_parse_error_carries_position():
    gb = GraphBuilder(2, 0, 0, allow_t=True, allow_x=False)
    with pytest.raises(sr.ParseError) as ei:
        parse_expression("p1 + q3", gb, line_no=4)
    assert ei.value.line == 4
    assert ei.value.col == 6
    assert "q3" in str(ei.value)


BAD = [
    "p1 +",
    "(p1 + p2",
    "",
    "p1 ^ -2",
    "p1 ^ p2",
    "p1 ^ 1001",
    "2 ^ 3 ^ 2",
    "p1 p2",
    "exp p1",
]


@pytest.mark.parametrize("text", BAD)
def test_malformed_expressions(text):
    gb = GraphBuilder(2, 2, 2, allow_t=True, allow_x=True)
    with pytest.raises(sr.ParseError):
        parse_expression(text, gb, line_no=1)


@pytest.mark.parametrize("text", ["p7", "x3", "x1 + p3"])
def test_out_of_range_variables(text):
    gb = GraphBuilder(2, 2, 2, allow_t=True, allow_x=True)
    with pytest.raises(sr.DimensionError):
        parse_expression(text, gb, line_no=1)


def test_zero_index_is_not_a_variable():
    # indices are 1-based, so w0 is just an unknown name
    gb = GraphBuilder(2, 2, 2, allow_t=True, allow_x=True)
    with pytest.raises(sr.ParseError, match="w0"):
        parse_expression("w0", gb, line_no=1)


def test_disallowed_variables():
    gb = GraphBuilder(2, 2, 2, allow_t=False, allow_x=False)
    with pytest.raises(sr.DimensionError):
        parse_expression("x1", gb, line_no=1)
    gb = GraphBuilder(2, 2, 2, allow_t=False, allow_x=True)
    with pytest.raises(sr.DimensionError):
        parse_expression("t + x1", gb, line_no=1)


def test_hash_consing_shares_subexpressions():
    g = _graph("p1 * p1 + p1 * p1", n_p=1, n_w=0, n_x=0)
    # p1, p1*p1, and the sum: both products share one node
    assert g.n_nodes == 3


ROUND_TRIP = [
    "p1*p2",
    "-p2*(x1 - x2 + x2^3/3.0)",
    "exp(p1 - w1)*x2^4",
    "-(p1 + p2)",
    "(p1 - p2)/(w1*w2)",
    "t*p1 - 2.0",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_pretty_round_trip(text):
    g = _graph(text)
    printed = g.pretty()
    assert printed.startswith("y = ")
    g2 = _graph(printed[len("y = "):])
    assert g.same_structure(g2)


def test_model_round_trip_through_pretty(circuit):
    rng = np.random.default_rng(3)
    for line in circuit.f.pretty().splitlines():
        name, expr = line.split(" = ", 1)
        k = int(name[1:]) - 1
        g = _graph(expr)
        for _ in range(20):
            p = rng.uniform(0.1, 0.3, 2)
            w = rng.uniform(0.7, 1.3, 2)
            x = rng.uniform(-2.0, 2.0, 2)
            a = sr.eval_real(circuit.f, t=0.0, p=p, w=w, x=x)[k]
            b = sr.eval_real(g, t=0.0, p=p, w=w, x=x)[0]
            assert a == b


def test_three_semantics_agree(circuit):
    # real value inside the interval hull and inside the relaxation pair
    rng = np.random.default_rng(5)
    pbox, wbox = circuit.pbox, circuit.wbox
    xbox = sr.IntervalBox.from_arrays([-2.0, -2.0], [2.0, 2.0])
    for _ in range(200):
        p = np.array([rng.uniform(iv.lo, iv.hi) for iv in pbox])
        w = np.array([rng.uniform(iv.lo, iv.hi) for iv in wbox])
        x = np.array([rng.uniform(iv.lo, iv.hi) for iv in xbox])
        real = sr.eval_real(circuit.f, t=0.0, p=p, w=w, x=x)
        hull = sr.eval_interval(circuit.f, t=0.0, p=pbox, w=wbox, x=xbox)
        pmc = [mc_from_variable(float(v), iv) for v, iv in zip(p, pbox)]
        wmc = [mc_from_variable(float(v), iv) for v, iv in zip(w, wbox)]
        xmc = [mc_from_variable(float(v), iv) for v, iv in zip(x, xbox)]
        mc = sr.eval_mccormick(circuit.f, t=0.0, p=pmc, w=wmc, x=xmc)
        for k in range(circuit.n_x):
            assert hull[k].contains(real[k], tol=1e-10)
            assert mc[k].cv - 1e-10 <= real[k] <= mc[k].cc + 1e-10
            assert hull[k].lo - 1e-10 <= mc[k].cv
            assert mc[k].cc <= hull[k].hi + 1e-10


SECTION_DROPS = ["[dims]", "[horizon]", "[pbox]", "[wbox]", "[dist]", "[f]", "[x0]", "[g]"]


@pytest.mark.parametrize("section", SECTION_DROPS)
def test_missing_section_rejected(section):
    lines = sr.CIRCUIT_MODEL_TEXT.splitlines(keepends=True)
    out, skipping = [], False
    for ln in lines:
        if ln.strip() == section:
            skipping = True
            continue
        if skipping and ln.startswith("["):
            skipping = False
        if not skipping:
            out.append(ln)
    with pytest.raises(sr.ParseError, match="section"):
        sr.parse_model("".join(out))


def test_duplicate_section_rejected():
    text = sr.CIRCUIT_MODEL_TEXT + "\n[g]\ng = x1\n"
    with pytest.raises(sr.ParseError, match="duplicate"):
        sr.parse_model(text)


@pytest.mark.parametrize(
    "old,new",
    [
        ("np = 2", "np = 0"),
        ("tf = 5.0", "tf = 0.0"),
        ("x1 = w1", "x1 = x2"),
        ("g = x1", "h = x1"),
        ("truncnormal 1.0 0.1 0.7 1.3", "truncnormal 1.0 0.1 0.6 1.3"),
    ],
)
def test_invalid_model_text(old, new):
    text = sr.CIRCUIT_MODEL_TEXT.replace(old, new, 1)
    assert text != sr.CIRCUIT_MODEL_TEXT
    with pytest.raises((sr.ParseError, sr.DimensionError)):
        sr.parse_model(text)


def test_pbox_row_count_mismatch():
    text = sr.CIRCUIT_MODEL_TEXT.replace("[pbox]\n0.1, 0.3\n0.1, 0.3", "[pbox]\n0.1, 0.3", 1)
    with pytest.raises(sr.ParseError):
        sr.parse_model(text)


def test_with_tf(circuit):
    short = circuit.with_tf(3.0)
    assert short.tf == 3.0
    assert short.t0 == circuit.t0
    assert short.f is circuit.f
    assert short.cache_token != circuit.cache_token
    with pytest.raises(ValueError):
        circuit.with_tf(circuit.t0)


def test_comments_and_blank_lines_ignored():
    text = sr.CIRCUIT_MODEL_TEXT.replace("[dims]", "# leading comment\n\n[dims]")
    m = sr.parse_model(text)
    assert m.n_x == 2
