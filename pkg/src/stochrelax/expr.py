"""Expression graphs and the model-file format.

Expressions are built over the variables
    t           time
    p1..p<np>   parameters
    w1..w<nw>   random inputs
    x1..x<nx>   states
with +, -, *, /, unary minus, integer powers via ^, exp(), and
parenthesized grouping.  Precedence from loosest to tightest:
+/- , */ , unary - , ^ .  The exponent after ^ must be a nonnegative
integer literal.

A graph is a flat tape in topological order with hash-consed nodes, so
repeated subexpressions are stored once.  Graphs carry one root per
output component and are interpreted under real, interval, or McCormick
semantics by the compiled kernels.

Model files are INI-like:

    [dims]      np/nw/nx assignments
    [horizon]   t0/tf assignments
    [pbox]      one "lo, hi" line per parameter
    [wbox]      one "lo, hi" line per random input
    [dist]      one marginal per random input:
                "uniform a b" or "truncnormal mu sigma a b"
    [f]         "x<k> = expression" lines, the vector field
    [x0]        "x<k> = expression" lines, initial condition in (p, w)
    [g]         "g = expression", terminal cost in (p, w, x)

'#' starts a comment.  The wbox must coincide with the support of the
distribution, and t0 < tf.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels as _k
from .errors import DimensionError, ParseError
from .interval import Interval, IntervalBox, get_inflation
from .mccormick import McCormickValue
from .stochastics import DistributionSpec, TruncatedNormal, Uniform

_NUM_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_MAX_EXPONENT = 1000


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class ExprGraph:
    """A flat expression tape with one root index per output component."""

    ops: np.ndarray
    ia: np.ndarray
    ib: np.ndarray
    cval: np.ndarray
    roots: np.ndarray
    names: tuple
    n_p: int
    n_w: int
    n_x: int
    uses_t: bool
    uses_x: bool

    @property
    def n_nodes(self) -> int:
        return int(self.ops.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.roots.shape[0])

    def same_structure(self, other: "ExprGraph") -> bool:
        return (
            np.array_equal(self.ops, other.ops)
            and np.array_equal(self.ia, other.ia)
            and np.array_equal(self.ib, other.ib)
            and np.array_equal(self.cval, other.cval)
            and np.array_equal(self.roots, other.roots)
        )

    def pretty(self) -> str:
        """Render as 'name = expression' lines that reparse to the same tape."""
        return "\n".join(
            f"{name} = {_format_node(self, int(r))}"
            for name, r in zip(self.names, self.roots)
        )


class GraphBuilder:
    """Incremental hash-consing builder shared by all outputs of a section."""

    def __init__(self, n_p: int, n_w: int, n_x: int, allow_t: bool, allow_x: bool):
        self.n_p = n_p
        self.n_w = n_w
        self.n_x = n_x
        self.allow_t = allow_t
        self.allow_x = allow_x
        self.ops: list[int] = []
        self.ia: list[int] = []
        self.ib: list[int] = []
        self.cval: list[float] = []
        self._memo: dict = {}
        self.uses_t = False
        self.uses_x = False

    def _node(self, op: int, a: int, b: int, c: float) -> int:
        key = (op, a, b, c)
        idx = self._memo.get(key)
        if idx is not None:
            return idx
        idx = len(self.ops)
        self.ops.append(op)
        self.ia.append(a)
        self.ib.append(b)
        self.cval.append(c)
        self._memo[key] = idx
        return idx

    def const(self, v: float) -> int:
        return self._node(_k.OP_CONST, -1, -1, float(v))

    def var_t(self) -> int:
        self.uses_t = True
        return self._node(_k.OP_VAR_T, -1, -1, 0.0)

    def var_p(self, j: int) -> int:
        return self._node(_k.OP_VAR_P, -1, -1, float(j))

    def var_w(self, j: int) -> int:
        return self._node(_k.OP_VAR_W, -1, -1, float(j))

    def var_x(self, j: int) -> int:
        self.uses_x = True
        return self._node(_k.OP_VAR_X, -1, -1, float(j))

    def add(self, a: int, b: int) -> int:
        return self._node(_k.OP_ADD, a, b, 0.0)

    def sub(self, a: int, b: int) -> int:
        return self._node(_k.OP_SUB, a, b, 0.0)

    def mul(self, a: int, b: int) -> int:
        return self._node(_k.OP_MUL, a, b, 0.0)

    def div(self, a: int, b: int) -> int:
        return self._node(_k.OP_DIV, a, b, 0.0)

    def neg(self, a: int) -> int:
        return self._node(_k.OP_NEG, a, -1, 0.0)

    def pow(self, a: int, k: int) -> int:
        return self._node(_k.OP_POW, a, -1, float(k))

    def exp(self, a: int) -> int:
        return self._node(_k.OP_EXP, a, -1, 0.0)

    def finish(self, roots: list[int], names: list[str]) -> ExprGraph:
        return ExprGraph(
            ops=np.array(self.ops, dtype=np.int64),
            ia=np.array(self.ia, dtype=np.int64),
            ib=np.array(self.ib, dtype=np.int64),
            cval=np.array(self.cval, dtype=np.float64),
            roots=np.array(roots, dtype=np.int64),
            names=tuple(names),
            n_p=self.n_p,
            n_w=self.n_w,
            n_x=self.n_x,
            uses_t=self.uses_t,
            uses_x=self.uses_x,
        )


# ---------------------------------------------------------------------------
# tokenizer and parser
# ---------------------------------------------------------------------------

_T_NUM = "num"
_T_IDENT = "ident"
_T_OP = "op"
_T_END = "end"


def _tokenize(text: str, line_no: int):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isdigit() or ch == ".":
            m = _NUM_RE.match(text, i)
            if not m:
                raise ParseError(f"malformed number near {text[i:i+8]!r}", line_no, col)
            toks.append((_T_NUM, m.group(0), col))
            i = m.end()
        elif ch.isalpha() or ch == "_":
            m = _IDENT_RE.match(text, i)
            toks.append((_T_IDENT, m.group(0), col))
            i = m.end()
        elif ch in "+-*/^()":
            toks.append((_T_OP, ch, col))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line_no, col)
    toks.append((_T_END, "", n + 1))
    return toks


class _ExprParser:
    def __init__(self, text: str, builder: GraphBuilder, line_no: int):
        self.toks = _tokenize(text, line_no)
        self.pos = 0
        self.b = builder
        self.line_no = line_no

    def peek(self):
        return self.toks[self.pos]

    def advance(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, msg: str, col: int):
        raise ParseError(msg, self.line_no, col)

    def accept_op(self, *chars) -> str | None:
        kind, txt, _ = self.peek()
        if kind == _T_OP and txt in chars:
            self.advance()
            return txt
        return None

    def parse(self) -> int:
        root = self.expr()
        kind, txt, col = self.peek()
        if kind != _T_END:
            self.fail(f"unexpected trailing input {txt!r}", col)
        return root

    def expr(self) -> int:
        node = self.term()
        while True:
            op = self.accept_op("+", "-")
            if op is None:
                return node
            rhs = self.term()
            node = self.b.add(node, rhs) if op == "+" else self.b.sub(node, rhs)

    def term(self) -> int:
        node = self.unary()
        while True:
            op = self.accept_op("*", "/")
            if op is None:
                return node
            rhs = self.unary()
            node = self.b.mul(node, rhs) if op == "*" else self.b.div(node, rhs)

    def unary(self) -> int:
        if self.accept_op("-"):
            return self.b.neg(self.unary())
        return self.power()

    def power(self) -> int:
        base = self.atom()
        if self.accept_op("^"):
            kind, txt, col = self.advance()
            if kind != _T_NUM or not txt.isdigit():
                self.fail("exponent must be a nonnegative integer literal", col)
            k = int(txt)
            if k > _MAX_EXPONENT:
                self.fail(f"exponent {k} exceeds limit {_MAX_EXPONENT}", col)
            return self.b.pow(base, k)
        return base

    def atom(self) -> int:
        kind, txt, col = self.advance()
        if kind == _T_NUM:
            return self.b.const(float(txt))
        if kind == _T_OP and txt == "(":
            node = self.expr()
            if not self.accept_op(")"):
                _, bad, bcol = self.peek()
                self.fail(f"expected ')', got {bad!r}", bcol)
            return node
        if kind == _T_IDENT:
            if txt == "exp":
                if not self.accept_op("("):
                    self.fail("expected '(' after exp", col)
                node = self.expr()
                if not self.accept_op(")"):
                    _, bad, bcol = self.peek()
                    self.fail(f"expected ')', got {bad!r}", bcol)
                return self.b.exp(node)
            return self._variable(txt, col)
        self.fail(f"expected a value, got {txt!r}" if txt else "unexpected end of expression", col)

    def _variable(self, name: str, col: int) -> int:
        b = self.b
        if name == "t":
            if not b.allow_t:
                raise DimensionError(f"line {self.line_no}: variable t is not available in this section")
            return b.var_t()
        m = re.fullmatch(r"([pwx])([1-9][0-9]*)", name)
        if not m:
            self.fail(f"unknown identifier {name!r}", col)
        kind, idx = m.group(1), int(m.group(2)) - 1
        if kind == "p":
            if idx >= b.n_p:
                raise DimensionError(
                    f"line {self.line_no}: {name} out of range for np = {b.n_p}"
                )
            return b.var_p(idx)
        if kind == "w":
            if idx >= b.n_w:
                raise DimensionError(
                    f"line {self.line_no}: {name} out of range for nw = {b.n_w}"
                )
            return b.var_w(idx)
        if not b.allow_x:
            raise DimensionError(
                f"line {self.line_no}: state variable {name} is not available in this section"
            )
        if idx >= b.n_x:
            raise DimensionError(f"line {self.line_no}: {name} out of range for nx = {b.n_x}")
        return b.var_x(idx)


def parse_expression(text: str, builder: GraphBuilder, line_no: int = 0) -> int:
    """Parse one expression into builder, returning its root node index."""
    return _ExprParser(text, builder, line_no).parse()


# ---------------------------------------------------------------------------
# pretty printer (inverse of the parser up to whitespace)
# ---------------------------------------------------------------------------

_PREC_ATOM = 5
_PREC = {
    _k.OP_ADD: 1,
    _k.OP_SUB: 1,
    _k.OP_MUL: 2,
    _k.OP_DIV: 2,
    _k.OP_NEG: 3,
    _k.OP_POW: 4,
}
_BIN_SYM = {_k.OP_ADD: " + ", _k.OP_SUB: " - ", _k.OP_MUL: "*", _k.OP_DIV: "/"}


def _prec_of(g: ExprGraph, i: int) -> int:
    return _PREC.get(int(g.ops[i]), _PREC_ATOM)


def _format_node(g: ExprGraph, i: int) -> str:
    op = int(g.ops[i])
    if op == _k.OP_CONST:
        return repr(float(g.cval[i]))
    if op == _k.OP_VAR_T:
        return "t"
    if op == _k.OP_VAR_P:
        return f"p{int(g.cval[i]) + 1}"
    if op == _k.OP_VAR_W:
        return f"w{int(g.cval[i]) + 1}"
    if op == _k.OP_VAR_X:
        return f"x{int(g.cval[i]) + 1}"
    if op == _k.OP_EXP:
        return f"exp({_format_node(g, int(g.ia[i]))})"
    if op == _k.OP_NEG:
        a = int(g.ia[i])
        inner = _format_node(g, a)
        if _prec_of(g, a) <= _PREC[_k.OP_NEG]:
            inner = f"({inner})"
        return f"-{inner}"
    if op == _k.OP_POW:
        a = int(g.ia[i])
        base = _format_node(g, a)
        if _prec_of(g, a) < _PREC_ATOM:
            base = f"({base})"
        return f"{base}^{int(g.cval[i])}"
    # binary arithmetic
    a = int(g.ia[i])
    b = int(g.ib[i])
    myprec = _PREC[op]
    left = _format_node(g, a)
    if _prec_of(g, a) < myprec:
        left = f"({left})"
    right = _format_node(g, b)
    if _prec_of(g, b) <= myprec:
        right = f"({right})"
    return f"{left}{_BIN_SYM[op]}{right}"


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

_token_counter = itertools.count(1)


@dataclass(eq=False)
class Model:
    """A parametric ODE with random inputs and a terminal cost."""

    n_p: int
    n_w: int
    n_x: int
    t0: float
    tf: float
    pbox: IntervalBox
    wbox: IntervalBox
    dist: DistributionSpec
    f: ExprGraph
    x0: ExprGraph
    g: ExprGraph
    name: str = "model"
    cache_token: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "cache_token", next(_token_counter))

    def with_tf(self, tf: float) -> "Model":
        """A copy of this model with a different final time."""
        tf = float(tf)
        if not tf > self.t0:
            raise ValueError(f"tf must exceed t0 = {self.t0}, got {tf}")
        return Model(
            n_p=self.n_p, n_w=self.n_w, n_x=self.n_x,
            t0=self.t0, tf=tf,
            pbox=self.pbox, wbox=self.wbox, dist=self.dist,
            f=self.f, x0=self.x0, g=self.g, name=self.name,
        )


def _strip_comment(line: str) -> str:
    j = line.find("#")
    if j >= 0:
        line = line[:j]
    return line.strip()


def _parse_pair(text: str, line_no: int):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise ParseError(f"expected 'lo, hi', got {text!r}", line_no)
    try:
        lo = float(parts[0])
        hi = float(parts[1])
    except ValueError:
        raise ParseError(f"expected two numbers, got {text!r}", line_no) from None
    return lo, hi


def _parse_marginal(text: str, line_no: int):
    parts = text.split()
    try:
        if parts[0] == "uniform" and len(parts) == 3:
            return Uniform(float(parts[1]), float(parts[2]))
        if parts[0] == "truncnormal" and len(parts) == 5:
            return TruncatedNormal(
                float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4])
            )
    except (ValueError, IndexError):
        pass
    raise ParseError(
        f"expected 'uniform a b' or 'truncnormal mu sigma a b', got {text!r}", line_no
    )


_SECTIONS = ("dims", "horizon", "pbox", "wbox", "dist", "f", "x0", "g")


def parse_model(text: str, name: str = "model") -> Model:
    """Parse model text into a validated Model."""
    sections: dict[str, list[tuple[int, str]]] = {s: [] for s in _SECTIONS}
    seen: set[str] = set()
    current: str | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", line_no)
            sec = line[1:-1].strip()
            if sec not in _SECTIONS:
                raise ParseError(f"unknown section [{sec}]", line_no)
            if sec in seen:
                raise ParseError(f"duplicate section [{sec}]", line_no)
            seen.add(sec)
            current = sec
            continue
        if current is None:
            raise ParseError(f"content before any section header: {line!r}", line_no)
        sections[current].append((line_no, line))

    for sec in _SECTIONS:
        if sec not in seen:
            raise ParseError(f"missing required section [{sec}]")

    # dims and horizon are "key = value" assignments
    def read_assignments(sec: str, keys: tuple):
        vals: dict[str, str] = {}
        for line_no, line in sections[sec]:
            if "=" not in line:
                raise ParseError(f"expected 'key = value' in [{sec}], got {line!r}", line_no)
            key, _, rhs = line.partition("=")
            key = key.strip()
            if key not in keys:
                raise ParseError(f"unknown key {key!r} in [{sec}]", line_no)
            if key in vals:
                raise ParseError(f"duplicate key {key!r} in [{sec}]", line_no)
            vals[key] = (rhs.strip(), line_no)
        for key in keys:
            if key not in vals:
                raise ParseError(f"missing key {key!r} in [{sec}]")
        return vals

    dims = read_assignments("dims", ("np", "nw", "nx"))
    horizon = read_assignments("horizon", ("t0", "tf"))

    def to_int(sec_key: str, vals) -> int:
        txt, line_no = vals[sec_key]
        try:
            v = int(txt)
        except ValueError:
            raise ParseError(f"{sec_key} must be an integer, got {txt!r}", line_no) from None
        if v < 1:
            raise ParseError(f"{sec_key} must be at least 1, got {v}", line_no)
        return v

    n_p = to_int("np", dims)
    n_w = to_int("nw", dims)
    n_x = to_int("nx", dims)

    def to_float(sec_key: str, vals) -> float:
        txt, line_no = vals[sec_key]
        try:
            return float(txt)
        except ValueError:
            raise ParseError(f"{sec_key} must be a number, got {txt!r}", line_no) from None

    t0 = to_float("t0", horizon)
    tf = to_float("tf", horizon)
    if not t0 < tf:
        raise ParseError(f"horizon must satisfy t0 < tf, got [{t0}, {tf}]")

    def read_box(sec: str, expect_n: int, dim_name: str) -> IntervalBox:
        lines = sections[sec]
        if len(lines) != expect_n:
            raise ParseError(
                f"[{sec}] has {len(lines)} rows but {dim_name} = {expect_n}",
                lines[0][0] if lines else None,
            )
        ivs = []
        for line_no, line in lines:
            lo, hi = _parse_pair(line, line_no)
            try:
                ivs.append(Interval(lo, hi))
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from None
        return IntervalBox(ivs)

    pbox = read_box("pbox", n_p, "np")
    wbox = read_box("wbox", n_w, "nw")

    dist_lines = sections["dist"]
    if len(dist_lines) != n_w:
        raise ParseError(
            f"[dist] has {len(dist_lines)} rows but nw = {n_w}",
            dist_lines[0][0] if dist_lines else None,
        )
    marginals = []
    for line_no, line in dist_lines:
        marg = _parse_marginal(line, line_no)
        try:
            marg.validate()
        except ValueError as exc:
            raise ParseError(str(exc), line_no) from None
        marginals.append(marg)
    dist = DistributionSpec(tuple(marginals))
    for j, (marg, iv) in enumerate(zip(marginals, wbox)):
        s = marg.support()
        if s != (iv.lo, iv.hi):
            raise ParseError(
                f"wbox row {j + 1} is [{iv.lo}, {iv.hi}] but the marginal's support is "
                f"[{s[0]}, {s[1]}]; they must coincide"
            )

    def read_exprs(sec: str, names: list[str], allow_t: bool, allow_x: bool) -> ExprGraph:
        builder = GraphBuilder(n_p, n_w, n_x, allow_t=allow_t, allow_x=allow_x)
        found: dict[str, int] = {}
        for line_no, line in sections[sec]:
            if "=" not in line:
                raise ParseError(f"expected 'name = expression' in [{sec}], got {line!r}", line_no)
            lhs, _, rhs = line.partition("=")
            lhs = lhs.strip()
            if lhs not in names:
                raise ParseError(
                    f"unexpected name {lhs!r} in [{sec}] (expected one of {', '.join(names)})",
                    line_no,
                )
            if lhs in found:
                raise ParseError(f"duplicate definition of {lhs!r} in [{sec}]", line_no)
            found[lhs] = parse_expression(rhs.strip(), builder, line_no)
        missing = [nm for nm in names if nm not in found]
        if missing:
            raise ParseError(f"[{sec}] is missing definitions for {', '.join(missing)}")
        return builder.finish([found[nm] for nm in names], names)

    state_names = [f"x{k + 1}" for k in range(n_x)]
    f = read_exprs("f", state_names, allow_t=True, allow_x=True)
    x0 = read_exprs("x0", state_names, allow_t=False, allow_x=False)
    g = read_exprs("g", ["g"], allow_t=False, allow_x=True)

    return Model(
        n_p=n_p, n_w=n_w, n_x=n_x, t0=t0, tf=tf,
        pbox=pbox, wbox=wbox, dist=dist, f=f, x0=x0, g=g, name=name,
    )


def load_model(path) -> Model:
    """Read and parse a model file; the file stem becomes the model name."""
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), name=path.stem)


# ---------------------------------------------------------------------------
# evaluation wrappers
# ---------------------------------------------------------------------------


def _as_vec(arg, n: int, what: str) -> np.ndarray:
    if arg is None:
        if n == 0:
            return np.empty(0)
        raise DimensionError(f"{what} values are required but missing")
    a = np.asarray(arg, dtype=float)
    if a.shape != (n,):
        raise DimensionError(f"{what} must have shape ({n},), got {a.shape}")
    return a


def eval_real(graph: ExprGraph, t: float = 0.0, p=None, w=None, x=None) -> np.ndarray:
    """Evaluate the graph at real-valued inputs; returns one value per root."""
    pv = _as_vec(p, graph.n_p, "p")
    wv = _as_vec(w, graph.n_w, "w")
    if graph.uses_x:
        xv = _as_vec(x, graph.n_x, "x")
    else:
        xv = np.empty(0)
    return _k.eval_real_roots(
        graph.ops, graph.ia, graph.ib, graph.cval, graph.roots, float(t), pv, wv, xv
    )


def _box_arrays(box, n: int, what: str):
    if box is None:
        if n == 0:
            return np.empty(0), np.empty(0)
        raise DimensionError(f"{what} box is required but missing")
    if not isinstance(box, IntervalBox):
        box = IntervalBox(box)
    if len(box) != n:
        raise DimensionError(f"{what} box must have {n} components, got {len(box)}")
    return box.lo, box.hi


def eval_interval(graph: ExprGraph, t=0.0, p=None, w=None, x=None) -> IntervalBox:
    """Evaluate the graph over interval inputs; returns a box of root enclosures."""
    if isinstance(t, Interval):
        tlo, thi = t.lo, t.hi
    else:
        tlo = thi = float(t)
    plo, phi = _box_arrays(p, graph.n_p, "p")
    wlo, whi = _box_arrays(w, graph.n_w, "w")
    if graph.uses_x:
        xlo, xhi = _box_arrays(x, graph.n_x, "x")
    else:
        xlo = np.empty(0)
        xhi = np.empty(0)
    olo, ohi = _k.eval_interval_roots(
        graph.ops, graph.ia, graph.ib, graph.cval, graph.roots,
        tlo, thi, plo, phi, wlo, whi, xlo, xhi, get_inflation(),
    )
    return IntervalBox.from_arrays(olo, ohi)


def _mc_arrays(vals, n: int, what: str):
    if vals is None:
        if n == 0:
            e = np.empty(0)
            return e, e, e, e
        raise DimensionError(f"{what} relaxations are required but missing")
    vals = list(vals)
    if len(vals) != n:
        raise DimensionError(f"{what} must have {n} components, got {len(vals)}")
    cv = np.array([v.cv for v in vals])
    cc = np.array([v.cc for v in vals])
    lo = np.array([v.box.lo for v in vals])
    hi = np.array([v.box.hi for v in vals])
    return cv, cc, lo, hi


def eval_mccormick(graph: ExprGraph, t: float = 0.0, p=None, w=None, x=None):
    """Evaluate the graph in McCormick semantics.

    p, w, x are sequences of McCormickValue; returns a list of
    McCormickValue, one per root.
    """
    pcv, pcc, plo, phi = _mc_arrays(p, graph.n_p, "p")
    wcv, wcc, wlo, whi = _mc_arrays(w, graph.n_w, "w")
    if graph.uses_x:
        xcv, xcc, xlo, xhi = _mc_arrays(x, graph.n_x, "x")
    else:
        e = np.empty(0)
        xcv = xcc = xlo = xhi = e
    ocv, occ, olo, ohi = _k.eval_mc_roots(
        graph.ops, graph.ia, graph.ib, graph.cval, graph.roots,
        float(t), pcv, pcc, plo, phi, wcv, wcc, wlo, whi, xcv, xcc, xlo, xhi,
    )
    return [
        McCormickValue(ocv[i], occ[i], Interval(olo[i], ohi[i]))
        for i in range(len(ocv))
    ]
