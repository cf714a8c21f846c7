"""Scalar kernels, expression-tape interpreters, and ODE drivers.

Every function here is compiled with numba when the backend enables it
(see _backend).  The same source runs as plain Python on the fallback
path, so the two backends share one implementation.

Conventions:
  * intervals are (lo, hi) float pairs, relaxations are (cv, cc, lo, hi);
  * expression tapes are flat arrays in topological order: ops[i] is an
    opcode, ia[i]/ib[i] child indices, cval[i] a constant payload
    (the literal value for CONST, the integer exponent for POW, the
    variable index for VAR_*);
  * drivers return integer status codes instead of raising, so callers
    can attach context: 0 ok, 1 step/width failure, 2 non-finite state,
    3 crossed relaxation pair.

Integer powers go through _ipow (left-to-right products) rather than
libm pow so the jit and fallback paths agree bit-for-bit.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import jit_kernel
from .errors import DivisionByZeroInterval, EvalDomainError

# ---------------------------------------------------------------------------
# opcodes
# ---------------------------------------------------------------------------

OP_CONST = 0
OP_VAR_T = 1
OP_VAR_P = 2
OP_VAR_W = 3
OP_VAR_X = 4
OP_ADD = 5
OP_SUB = 6
OP_MUL = 7
OP_DIV = 8
OP_NEG = 9
OP_POW = 10
OP_EXP = 11

INV_SQRT_PI = 0.5641895835477563
TWO_INV_SQRT_PI = 1.1283791670955126
INV_SQRT_2PI = 0.3989422804014327
SQRT2 = 1.4142135623730951


@jit_kernel
def _ipow(x, k):
    # plain repeated product: deterministic and identical on both backends
    r = 1.0
    for _ in range(k):
        r *= x
    return r


# ---------------------------------------------------------------------------
# interval arithmetic on scalar endpoints
# ---------------------------------------------------------------------------


@jit_kernel
def iv_add(al, ah, bl, bh):
    return al + bl, ah + bh


@jit_kernel
def iv_sub(al, ah, bl, bh):
    return al - bh, ah - bl


@jit_kernel
def iv_neg(al, ah):
    return -ah, -al


@jit_kernel
def iv_mul(al, ah, bl, bh):
    p1 = al * bl
    p2 = al * bh
    p3 = ah * bl
    p4 = ah * bh
    lo = min(min(p1, p2), min(p3, p4))
    hi = max(max(p1, p2), max(p3, p4))
    return lo, hi


@jit_kernel
def iv_recip(al, ah):
    if al <= 0.0 <= ah:
        raise DivisionByZeroInterval("denominator interval contains zero")
    return 1.0 / ah, 1.0 / al


@jit_kernel
def iv_div(al, ah, bl, bh):
    rl, rh = iv_recip(bl, bh)
    return iv_mul(al, ah, rl, rh)


@jit_kernel
def iv_pow(al, ah, k):
    if k == 0:
        return 1.0, 1.0
    if k % 2 == 1:
        return _ipow(al, k), _ipow(ah, k)
    pl = _ipow(al, k)
    ph = _ipow(ah, k)
    if al >= 0.0:
        return pl, ph
    if ah <= 0.0:
        return ph, pl
    return 0.0, max(pl, ph)


@jit_kernel
def iv_exp(al, ah):
    return math.exp(al), math.exp(ah)


# ---------------------------------------------------------------------------
# McCormick relaxation arithmetic
# ---------------------------------------------------------------------------


@jit_kernel
def mc_cut(cv, cc, lo, hi):
    # clip both estimates into the interval bounds, snap rounding crossings
    if cv < lo:
        cv = lo
    if cv > hi:
        cv = hi
    if cc > hi:
        cc = hi
    if cc < lo:
        cc = lo
    if cv > cc:
        cv = cc
    return cv, cc


@jit_kernel
def _mid3(cv, cc, x):
    # median of {cv, cc, x} assuming cv <= cc
    if x < cv:
        return cv
    if x > cc:
        return cc
    return x


@jit_kernel
def mc_add(acv, acc, alo, ahi, bcv, bcc, blo, bhi):
    lo = alo + blo
    hi = ahi + bhi
    cv, cc = mc_cut(acv + bcv, acc + bcc, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_neg(acv, acc, alo, ahi):
    lo = -ahi
    hi = -alo
    cv, cc = mc_cut(-acc, -acv, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_sub(acv, acc, alo, ahi, bcv, bcc, blo, bhi):
    ncv, ncc, nlo, nhi = mc_neg(bcv, bcc, blo, bhi)
    return mc_add(acv, acc, alo, ahi, ncv, ncc, nlo, nhi)


@jit_kernel
def mc_scale(acv, acc, alo, ahi, c):
    if c >= 0.0:
        lo = c * alo
        hi = c * ahi
        cv, cc = mc_cut(c * acv, c * acc, lo, hi)
    else:
        lo = c * ahi
        hi = c * alo
        cv, cc = mc_cut(c * acc, c * acv, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_mul(acv, acc, alo, ahi, bcv, bcc, blo, bhi):
    lo, hi = iv_mul(alo, ahi, blo, bhi)
    # convex side: two supporting planes of the product over the box
    t1 = blo * (acv if blo >= 0.0 else acc)
    t2 = alo * (bcv if alo >= 0.0 else bcc)
    cv1 = t1 + t2 - alo * blo
    t3 = bhi * (acv if bhi >= 0.0 else acc)
    t4 = ahi * (bcv if ahi >= 0.0 else bcc)
    cv2 = t3 + t4 - ahi * bhi
    cv = cv1 if cv1 > cv2 else cv2
    # concave side
    u1 = blo * (acc if blo >= 0.0 else acv)
    u2 = ahi * (bcc if ahi >= 0.0 else bcv)
    cc1 = u1 + u2 - ahi * blo
    u3 = bhi * (acc if bhi >= 0.0 else acv)
    u4 = alo * (bcc if alo >= 0.0 else bcv)
    cc2 = u3 + u4 - alo * bhi
    cc = cc1 if cc1 < cc2 else cc2
    cv, cc = mc_cut(cv, cc, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def _secant(x, xl, xh, fl, fh):
    if xh > xl:
        return fl + (fh - fl) / (xh - xl) * (x - xl)
    return 0.5 * (fl + fh)


@jit_kernel
def _odd_pow_cv_env(x, lo, hi, k):
    # convex envelope of x^k (odd k >= 3) on [lo, hi] with lo < 0 < hi:
    # line from (lo, lo^k) tangent at c in (0, hi], then the power itself.
    fl = _ipow(lo, k)
    fh = _ipow(hi, k)
    phi_hi = k * _ipow(hi, k - 1) * (hi - lo) - (fh - fl)
    if phi_hi <= 0.0:
        # tangency would land beyond hi: secant over the whole box
        return fl + (fh - fl) / (hi - lo) * (x - lo)
    ca = 0.0
    cb = hi
    c = 0.5 * hi
    for _ in range(80):
        fc = k * _ipow(c, k - 1) * (c - lo) - (_ipow(c, k) - fl)
        if fc > 0.0:
            cb = c
        else:
            ca = c
        dfc = k * (k - 1) * _ipow(c, k - 2) * (c - lo)
        if dfc > 0.0:
            cn = c - fc / dfc
        else:
            cn = 0.5 * (ca + cb)
        if not (ca < cn < cb):
            cn = 0.5 * (ca + cb)
        if abs(cn - c) <= 1e-14 * max(1.0, abs(c)):
            c = cn
            break
        c = cn
    if x <= c:
        return fl + k * _ipow(c, k - 1) * (x - lo)
    return _ipow(x, k)


@jit_kernel
def mc_pow(acv, acc, alo, ahi, k):
    if k == 0:
        return 1.0, 1.0, 1.0, 1.0
    if k == 1:
        return acv, acc, alo, ahi
    lo, hi = iv_pow(alo, ahi, k)
    if k % 2 == 0:
        if alo >= 0.0:
            xmin = alo
        elif ahi <= 0.0:
            xmin = ahi
        else:
            xmin = 0.0
        cv = _ipow(_mid3(acv, acc, xmin), k)
        if ahi > alo:
            fl = _ipow(alo, k)
            fh = _ipow(ahi, k)
            slope = (fh - fl) / (ahi - alo)
            xa = acc if slope >= 0.0 else acv
            cc = fl + slope * (xa - alo)
        else:
            cc = _ipow(acc, k)
    else:
        if alo >= 0.0:
            cv = _ipow(acv, k)
            cc = _secant(acc, alo, ahi, _ipow(alo, k), _ipow(ahi, k))
        elif ahi <= 0.0:
            cv = _secant(acv, alo, ahi, _ipow(alo, k), _ipow(ahi, k))
            cc = _ipow(acc, k)
        else:
            cv = _odd_pow_cv_env(acv, alo, ahi, k)
            cc = -_odd_pow_cv_env(-acc, -ahi, -alo, k)
    cv, cc = mc_cut(cv, cc, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_exp(acv, acc, alo, ahi):
    lo = math.exp(alo)
    hi = math.exp(ahi)
    cv = math.exp(acv)
    if ahi > alo:
        cc = lo + (hi - lo) / (ahi - alo) * (acc - alo)
    else:
        cc = math.exp(acc)
    cv, cc = mc_cut(cv, cc, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_recip(acv, acc, alo, ahi):
    if alo <= 0.0 <= ahi:
        raise DivisionByZeroInterval("reciprocal of an interval containing zero")
    lo = 1.0 / ahi
    hi = 1.0 / alo
    if alo > 0.0:
        cv = 1.0 / acc
        cc = _secant(acv, alo, ahi, 1.0 / alo, 1.0 / ahi)
    else:
        cv = _secant(acc, alo, ahi, 1.0 / alo, 1.0 / ahi)
        cc = 1.0 / acv
    cv, cc = mc_cut(cv, cc, lo, hi)
    return cv, cc, lo, hi


@jit_kernel
def mc_div(acv, acc, alo, ahi, bcv, bcc, blo, bhi):
    rcv, rcc, rlo, rhi = mc_recip(bcv, bcc, blo, bhi)
    return mc_mul(acv, acc, alo, ahi, rcv, rcc, rlo, rhi)


# ---------------------------------------------------------------------------
# error function and normal-distribution helpers
# ---------------------------------------------------------------------------


@jit_kernel
def _erfc_cf(x):
    # continued fraction for sqrt(pi)*exp(x^2)*erfc(x), evaluated by
    # modified Lentz; accurate for x >= 3
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    for n in range(1, 300):
        a = 1.0 if n == 1 else 0.5 * (n - 1)
        d = x + a * d
        if abs(d) < tiny:
            d = tiny
        c = x + a / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return INV_SQRT_PI * math.exp(-x * x) * f


@jit_kernel
def erf_scalar(x):
    if x != x:
        return x
    ax = abs(x)
    if ax <= 3.0:
        # positive-term series: erf(x) = 2/sqrt(pi) x e^{-x^2} sum (2x^2)^n/(2n+1)!!
        x2 = ax * ax
        term = 1.0
        s = 1.0
        for n in range(1, 300):
            term *= 2.0 * x2 / (2.0 * n + 1.0)
            s += term
            if term < 1e-17 * s:
                break
        r = TWO_INV_SQRT_PI * ax * math.exp(-x2) * s
    else:
        r = 1.0 - _erfc_cf(ax)
    return r if x >= 0.0 else -r


@jit_kernel
def norm_pdf_scalar(x):
    return INV_SQRT_2PI * math.exp(-0.5 * x * x)


@jit_kernel
def norm_cdf_scalar(x):
    if x < -3.0:
        return 0.5 * _erfc_cf(-x / SQRT2)
    if x > 3.0:
        return 1.0 - 0.5 * _erfc_cf(x / SQRT2)
    return 0.5 * (1.0 + erf_scalar(x / SQRT2))


@jit_kernel
def norm_ppf_bracket(u, zlo, zhi):
    # solve norm_cdf(z) = u for z in [zlo, zhi] by safeguarded Newton
    a = zlo
    b = zhi
    z = 0.5 * (a + b)
    for _ in range(200):
        f = norm_cdf_scalar(z) - u
        if f > 0.0:
            b = z
        else:
            a = z
        d = norm_pdf_scalar(z)
        if d > 1e-300:
            zn = z - f / d
        else:
            zn = 0.5 * (a + b)
        if not (a < zn < b):
            zn = 0.5 * (a + b)
        if abs(zn - z) <= 1e-13 * (1.0 + abs(zn)):
            return zn
        z = zn
    return z


@jit_kernel
def sample_truncnorm(u, mu, sigma, lo, hi, out):
    # inverse-CDF transform of uniforms u into N(mu, sigma) truncated to [lo, hi]
    alpha = (lo - mu) / sigma
    beta = (hi - mu) / sigma
    fa = norm_cdf_scalar(alpha)
    fb = norm_cdf_scalar(beta)
    n = u.shape[0]
    for i in range(n):
        ui = fa + u[i] * (fb - fa)
        z = norm_ppf_bracket(ui, alpha, beta)
        v = mu + sigma * z
        if v < lo:
            v = lo
        if v > hi:
            v = hi
        out[i] = v


# ---------------------------------------------------------------------------
# expression-tape interpreters
# ---------------------------------------------------------------------------


@jit_kernel
def tape_eval_real(ops, ia, ib, cval, t, p, w, x, buf):
    n = ops.shape[0]
    for i in range(n):
        op = ops[i]
        if op == OP_CONST:
            buf[i] = cval[i]
        elif op == OP_VAR_T:
            buf[i] = t
        elif op == OP_VAR_P:
            buf[i] = p[int(cval[i])]
        elif op == OP_VAR_W:
            buf[i] = w[int(cval[i])]
        elif op == OP_VAR_X:
            buf[i] = x[int(cval[i])]
        elif op == OP_ADD:
            buf[i] = buf[ia[i]] + buf[ib[i]]
        elif op == OP_SUB:
            buf[i] = buf[ia[i]] - buf[ib[i]]
        elif op == OP_MUL:
            buf[i] = buf[ia[i]] * buf[ib[i]]
        elif op == OP_DIV:
            den = buf[ib[i]]
            if den == 0.0:
                raise EvalDomainError("division by zero in real evaluation")
            buf[i] = buf[ia[i]] / den
        elif op == OP_NEG:
            buf[i] = -buf[ia[i]]
        elif op == OP_POW:
            buf[i] = _ipow(buf[ia[i]], int(cval[i]))
        else:
            buf[i] = math.exp(buf[ia[i]])


@jit_kernel
def tape_eval_interval(
    ops, ia, ib, cval, tlo, thi, plo, phi, wlo, whi, xlo, xhi, blo, bhi, infl
):
    n = ops.shape[0]
    for i in range(n):
        op = ops[i]
        arith = True
        if op == OP_CONST:
            blo[i] = cval[i]
            bhi[i] = cval[i]
            arith = False
        elif op == OP_VAR_T:
            blo[i] = tlo
            bhi[i] = thi
            arith = False
        elif op == OP_VAR_P:
            j = int(cval[i])
            blo[i] = plo[j]
            bhi[i] = phi[j]
            arith = False
        elif op == OP_VAR_W:
            j = int(cval[i])
            blo[i] = wlo[j]
            bhi[i] = whi[j]
            arith = False
        elif op == OP_VAR_X:
            j = int(cval[i])
            blo[i] = xlo[j]
            bhi[i] = xhi[j]
            arith = False
        elif op == OP_ADD:
            blo[i], bhi[i] = iv_add(blo[ia[i]], bhi[ia[i]], blo[ib[i]], bhi[ib[i]])
        elif op == OP_SUB:
            blo[i], bhi[i] = iv_sub(blo[ia[i]], bhi[ia[i]], blo[ib[i]], bhi[ib[i]])
        elif op == OP_MUL:
            blo[i], bhi[i] = iv_mul(blo[ia[i]], bhi[ia[i]], blo[ib[i]], bhi[ib[i]])
        elif op == OP_DIV:
            blo[i], bhi[i] = iv_div(blo[ia[i]], bhi[ia[i]], blo[ib[i]], bhi[ib[i]])
        elif op == OP_NEG:
            blo[i], bhi[i] = iv_neg(blo[ia[i]], bhi[ia[i]])
        elif op == OP_POW:
            blo[i], bhi[i] = iv_pow(blo[ia[i]], bhi[ia[i]], int(cval[i]))
        else:
            blo[i], bhi[i] = iv_exp(blo[ia[i]], bhi[ia[i]])
        if arith and infl > 0.0:
            pad = 0.5 * infl * (bhi[i] - blo[i])
            blo[i] -= pad
            bhi[i] += pad


@jit_kernel
def tape_eval_mc(
    ops,
    ia,
    ib,
    cval,
    t,
    pcv,
    pcc,
    plo,
    phi,
    wcv,
    wcc,
    wlo,
    whi,
    xcv,
    xcc,
    xlo,
    xhi,
    bcv,
    bcc,
    blo,
    bhi,
):
    n = ops.shape[0]
    for i in range(n):
        op = ops[i]
        if op == OP_CONST:
            c = cval[i]
            bcv[i] = c
            bcc[i] = c
            blo[i] = c
            bhi[i] = c
        elif op == OP_VAR_T:
            bcv[i] = t
            bcc[i] = t
            blo[i] = t
            bhi[i] = t
        elif op == OP_VAR_P:
            j = int(cval[i])
            bcv[i] = pcv[j]
            bcc[i] = pcc[j]
            blo[i] = plo[j]
            bhi[i] = phi[j]
        elif op == OP_VAR_W:
            j = int(cval[i])
            bcv[i] = wcv[j]
            bcc[i] = wcc[j]
            blo[i] = wlo[j]
            bhi[i] = whi[j]
        elif op == OP_VAR_X:
            j = int(cval[i])
            bcv[i] = xcv[j]
            bcc[i] = xcc[j]
            blo[i] = xlo[j]
            bhi[i] = xhi[j]
        elif op == OP_ADD:
            a = ia[i]
            b = ib[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_add(
                bcv[a], bcc[a], blo[a], bhi[a], bcv[b], bcc[b], blo[b], bhi[b]
            )
        elif op == OP_SUB:
            a = ia[i]
            b = ib[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_sub(
                bcv[a], bcc[a], blo[a], bhi[a], bcv[b], bcc[b], blo[b], bhi[b]
            )
        elif op == OP_MUL:
            a = ia[i]
            b = ib[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_mul(
                bcv[a], bcc[a], blo[a], bhi[a], bcv[b], bcc[b], blo[b], bhi[b]
            )
        elif op == OP_DIV:
            a = ia[i]
            b = ib[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_div(
                bcv[a], bcc[a], blo[a], bhi[a], bcv[b], bcc[b], blo[b], bhi[b]
            )
        elif op == OP_NEG:
            a = ia[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_neg(bcv[a], bcc[a], blo[a], bhi[a])
        elif op == OP_POW:
            a = ia[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_pow(
                bcv[a], bcc[a], blo[a], bhi[a], int(cval[i])
            )
        else:
            a = ia[i]
            bcv[i], bcc[i], blo[i], bhi[i] = mc_exp(bcv[a], bcc[a], blo[a], bhi[a])


# ---------------------------------------------------------------------------
# root-extraction conveniences (not hot; allocate their own buffers)
# ---------------------------------------------------------------------------


@jit_kernel
def eval_real_roots(ops, ia, ib, cval, roots, t, p, w, x):
    buf = np.empty(ops.shape[0])
    tape_eval_real(ops, ia, ib, cval, t, p, w, x, buf)
    m = roots.shape[0]
    out = np.empty(m)
    for i in range(m):
        out[i] = buf[roots[i]]
    return out


@jit_kernel
def eval_interval_roots(ops, ia, ib, cval, roots, tlo, thi, plo, phi, wlo, whi, xlo, xhi, infl):
    n = ops.shape[0]
    blo = np.empty(n)
    bhi = np.empty(n)
    tape_eval_interval(ops, ia, ib, cval, tlo, thi, plo, phi, wlo, whi, xlo, xhi, blo, bhi, infl)
    m = roots.shape[0]
    olo = np.empty(m)
    ohi = np.empty(m)
    for i in range(m):
        olo[i] = blo[roots[i]]
        ohi[i] = bhi[roots[i]]
    return olo, ohi


@jit_kernel
def eval_mc_roots(
    ops, ia, ib, cval, roots, t, pcv, pcc, plo, phi, wcv, wcc, wlo, whi, xcv, xcc, xlo, xhi
):
    n = ops.shape[0]
    bcv = np.empty(n)
    bcc = np.empty(n)
    blo = np.empty(n)
    bhi = np.empty(n)
    tape_eval_mc(
        ops, ia, ib, cval, t, pcv, pcc, plo, phi, wcv, wcc, wlo, whi,
        xcv, xcc, xlo, xhi, bcv, bcc, blo, bhi,
    )
    m = roots.shape[0]
    ocv = np.empty(m)
    occ = np.empty(m)
    olo = np.empty(m)
    ohi = np.empty(m)
    for i in range(m):
        ocv[i] = bcv[roots[i]]
        occ[i] = bcc[roots[i]]
        olo[i] = blo[roots[i]]
        ohi[i] = bhi[roots[i]]
    return ocv, occ, olo, ohi


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) pieces shared by the adaptive drivers
# ---------------------------------------------------------------------------

# stage abscissae
_C2 = 0.2
_C3 = 0.3
_C4 = 0.8
_C5 = 8.0 / 9.0


@jit_kernel
def _dopri_stage(y, kk, h, s, out):
    # out = y + h * sum_j a[s][j] kk[j]; s = 6 produces the 5th-order value
    n = y.shape[0]
    if s == 1:
        for i in range(n):
            out[i] = y[i] + h * (0.2 * kk[0, i])
    elif s == 2:
        for i in range(n):
            out[i] = y[i] + h * (3.0 / 40.0 * kk[0, i] + 9.0 / 40.0 * kk[1, i])
    elif s == 3:
        for i in range(n):
            out[i] = y[i] + h * (
                44.0 / 45.0 * kk[0, i] - 56.0 / 15.0 * kk[1, i] + 32.0 / 9.0 * kk[2, i]
            )
    elif s == 4:
        for i in range(n):
            out[i] = y[i] + h * (
                19372.0 / 6561.0 * kk[0, i]
                - 25360.0 / 2187.0 * kk[1, i]
                + 64448.0 / 6561.0 * kk[2, i]
                - 212.0 / 729.0 * kk[3, i]
            )
    elif s == 5:
        for i in range(n):
            out[i] = y[i] + h * (
                9017.0 / 3168.0 * kk[0, i]
                - 355.0 / 33.0 * kk[1, i]
                + 46732.0 / 5247.0 * kk[2, i]
                + 49.0 / 176.0 * kk[3, i]
                - 5103.0 / 18656.0 * kk[4, i]
            )
    else:
        for i in range(n):
            out[i] = y[i] + h * (
                35.0 / 384.0 * kk[0, i]
                + 500.0 / 1113.0 * kk[2, i]
                + 125.0 / 192.0 * kk[3, i]
                - 2187.0 / 6784.0 * kk[4, i]
                + 11.0 / 84.0 * kk[5, i]
            )


@jit_kernel
def _dopri_err(y, y5, kk, h, rtol, atol):
    n = y.shape[0]
    acc = 0.0
    for i in range(n):
        e = h * (
            71.0 / 57600.0 * kk[0, i]
            - 71.0 / 16695.0 * kk[2, i]
            + 71.0 / 1920.0 * kk[3, i]
            - 17253.0 / 339200.0 * kk[4, i]
            + 22.0 / 525.0 * kk[5, i]
            - 1.0 / 40.0 * kk[6, i]
        )
        ay = abs(y[i])
        ay5 = abs(y5[i])
        sc = atol + rtol * (ay if ay > ay5 else ay5)
        q = e / sc
        acc += q * q
    return math.sqrt(acc / n)


@jit_kernel
def _initial_step(y0, f0, t0, tf, rtol, atol):
    n = y0.shape[0]
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        sc = atol + rtol * abs(y0[i])
        a = y0[i] / sc
        d0 += a * a
        b = f0[i] / sc
        d1 += b * b
    d0 = math.sqrt(d0 / n)
    d1 = math.sqrt(d1 / n)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6 * (tf - t0)
    else:
        h0 = 0.01 * d0 / d1
    hmax = 0.1 * (tf - t0)
    return h0 if h0 < hmax else hmax


@jit_kernel
def _step_factor(err):
    if err <= 0.0:
        return 10.0
    fac = 0.9 * err ** (-0.2)
    if fac < 0.2:
        fac = 0.2
    if fac > 10.0:
        fac = 10.0
    return fac


# ---------------------------------------------------------------------------
# real-trajectory driver (terminal value only)
# ---------------------------------------------------------------------------


@jit_kernel
def _real_rhs(ops, ia, ib, cval, roots, t, y, p, w, buf, out):
    tape_eval_real(ops, ia, ib, cval, t, p, w, y, buf)
    for i in range(roots.shape[0]):
        out[i] = buf[roots[i]]


@jit_kernel
def drive_real_rk45(ops, ia, ib, cval, roots, t0, tf, y0, p, w, rtol, atol, max_steps):
    nx = y0.shape[0]
    nn = ops.shape[0]
    buf = np.empty(nn)
    y = y0.copy()
    kk = np.empty((7, nx))
    ys = np.empty(nx)
    y5 = np.empty(nx)
    f0 = np.empty(nx)
    _real_rhs(ops, ia, ib, cval, roots, t0, y, p, w, buf, f0)
    h = _initial_step(y, f0, t0, tf, rtol, atol)
    t = t0
    span = tf - t0
    nsteps = 0
    while t < tf:
        if nsteps >= max_steps or h < 1e-14 * span:
            return 1, y
        if h > tf - t:
            h = tf - t
        _real_rhs(ops, ia, ib, cval, roots, t, y, p, w, buf, kk[0])
        for s in range(1, 6):
            _dopri_stage(y, kk, h, s, ys)
            if s == 1:
                ts = t + _C2 * h
            elif s == 2:
                ts = t + _C3 * h
            elif s == 3:
                ts = t + _C4 * h
            elif s == 4:
                ts = t + _C5 * h
            else:
                ts = t + h
            _real_rhs(ops, ia, ib, cval, roots, ts, ys, p, w, buf, kk[s])
        _dopri_stage(y, kk, h, 6, y5)
        _real_rhs(ops, ia, ib, cval, roots, t + h, y5, p, w, buf, kk[6])
        err = _dopri_err(y, y5, kk, h, rtol, atol)
        if err <= 1.0:
            t = t + h
            if tf - t < 1e-12 * span:
                t = tf
            for i in range(nx):
                y[i] = y5[i]
                if not math.isfinite(y[i]):
                    return 2, y
            nsteps += 1
        h = h * _step_factor(err)
    return 0, y


@jit_kernel
def drive_real_rk4(ops, ia, ib, cval, roots, t0, tf, y0, p, w, nsteps):
    nx = y0.shape[0]
    nn = ops.shape[0]
    buf = np.empty(nn)
    y = y0.copy()
    k1 = np.empty(nx)
    k2 = np.empty(nx)
    k3 = np.empty(nx)
    k4 = np.empty(nx)
    ys = np.empty(nx)
    h = (tf - t0) / nsteps
    for step in range(nsteps):
        t = t0 + step * h
        _real_rhs(ops, ia, ib, cval, roots, t, y, p, w, buf, k1)
        for i in range(nx):
            ys[i] = y[i] + 0.5 * h * k1[i]
        _real_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, ys, p, w, buf, k2)
        for i in range(nx):
            ys[i] = y[i] + 0.5 * h * k2[i]
        _real_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, ys, p, w, buf, k3)
        for i in range(nx):
            ys[i] = y[i] + h * k3[i]
        _real_rhs(ops, ia, ib, cval, roots, t + h, ys, p, w, buf, k4)
        for i in range(nx):
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not math.isfinite(y[i]):
                return 2, y
    return 0, y


@jit_kernel
def drive_real_batch(
    f_ops, f_ia, f_ib, f_cval, f_roots,
    x0_ops, x0_ia, x0_ib, x0_cval, x0_roots,
    g_ops, g_ia, g_ib, g_cval, g_roots,
    t0, tf, P, W, rtol, atol, max_steps, use_rk4, nsteps,
):
    n = W.shape[0]
    nx = f_roots.shape[0]
    gbuf = np.empty(g_ops.shape[0])
    x0buf = np.empty(x0_ops.shape[0])
    status = np.zeros(n, dtype=np.int64)
    gvals = np.empty(n)
    xend = np.empty((n, nx))
    y0 = np.empty(nx)
    xdummy = np.empty(0)
    for s in range(n):
        p = P[s]
        w = W[s]
        tape_eval_real(x0_ops, x0_ia, x0_ib, x0_cval, t0, p, w, xdummy, x0buf)
        for i in range(nx):
            y0[i] = x0buf[x0_roots[i]]
        if use_rk4 != 0:
            st, yend = drive_real_rk4(
                f_ops, f_ia, f_ib, f_cval, f_roots, t0, tf, y0, p, w, nsteps
            )
        else:
            st, yend = drive_real_rk45(
                f_ops, f_ia, f_ib, f_cval, f_roots, t0, tf, y0, p, w, rtol, atol, max_steps
            )
        status[s] = st
        for i in range(nx):
            xend[s, i] = yend[i]
        if st == 0:
            tape_eval_real(g_ops, g_ia, g_ib, g_cval, tf, p, w, yend, gbuf)
            gvals[s] = gbuf[g_roots[0]]
        else:
            gvals[s] = math.nan
    return status, gvals, xend


# ---------------------------------------------------------------------------
# state-bound driver: fixed-step RK4 on flattened interval dynamics
# ---------------------------------------------------------------------------


@jit_kernel
def _bounds_rhs(
    ops, ia, ib, cval, roots, t, lo, hi, plo, phi, wlo, whi, xlo_f, xhi_f, blo, bhi, infl, dlo, dhi
):
    nx = lo.shape[0]
    for k in range(nx):
        for i in range(nx):
            xlo_f[i] = lo[i]
            xhi_f[i] = hi[i]
        # lower face: pin component k at its lower bound
        xlo_f[k] = lo[k]
        xhi_f[k] = lo[k]
        tape_eval_interval(
            ops, ia, ib, cval, t, t, plo, phi, wlo, whi, xlo_f, xhi_f, blo, bhi, infl
        )
        dlo[k] = blo[roots[k]]
        # upper face
        xlo_f[k] = hi[k]
        xhi_f[k] = hi[k]
        tape_eval_interval(
            ops, ia, ib, cval, t, t, plo, phi, wlo, whi, xlo_f, xhi_f, blo, bhi, infl
        )
        dhi[k] = bhi[roots[k]]


@jit_kernel
def drive_bounds_rk4(
    ops, ia, ib, cval, roots, t0, tf, lo0, hi0, plo, phi, wlo, whi, nsteps, cap, infl
):
    nx = lo0.shape[0]
    nn = ops.shape[0]
    Mlo = np.empty((nsteps + 1, nx))
    Mhi = np.empty((nsteps + 1, nx))
    lo = lo0.copy()
    hi = hi0.copy()
    for i in range(nx):
        Mlo[0, i] = lo[i]
        Mhi[0, i] = hi[i]
    xlo_f = np.empty(nx)
    xhi_f = np.empty(nx)
    blo = np.empty(nn)
    bhi = np.empty(nn)
    k1l = np.empty(nx)
    k1h = np.empty(nx)
    k2l = np.empty(nx)
    k2h = np.empty(nx)
    k3l = np.empty(nx)
    k3h = np.empty(nx)
    k4l = np.empty(nx)
    k4h = np.empty(nx)
    tl = np.empty(nx)
    th = np.empty(nx)
    h = (tf - t0) / nsteps
    for step in range(nsteps):
        t = t0 + step * h
        _bounds_rhs(ops, ia, ib, cval, roots, t, lo, hi, plo, phi, wlo, whi,
                    xlo_f, xhi_f, blo, bhi, infl, k1l, k1h)
        for i in range(nx):
            tl[i] = lo[i] + 0.5 * h * k1l[i]
            th[i] = hi[i] + 0.5 * h * k1h[i]
        _bounds_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, tl, th, plo, phi, wlo, whi,
                    xlo_f, xhi_f, blo, bhi, infl, k2l, k2h)
        for i in range(nx):
            tl[i] = lo[i] + 0.5 * h * k2l[i]
            th[i] = hi[i] + 0.5 * h * k2h[i]
        _bounds_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, tl, th, plo, phi, wlo, whi,
                    xlo_f, xhi_f, blo, bhi, infl, k3l, k3h)
        for i in range(nx):
            tl[i] = lo[i] + h * k3l[i]
            th[i] = hi[i] + h * k3h[i]
        _bounds_rhs(ops, ia, ib, cval, roots, t + h, tl, th, plo, phi, wlo, whi,
                    xlo_f, xhi_f, blo, bhi, infl, k4l, k4h)
        for i in range(nx):
            lo[i] += h / 6.0 * (k1l[i] + 2.0 * k2l[i] + 2.0 * k3l[i] + k4l[i])
            hi[i] += h / 6.0 * (k1h[i] + 2.0 * k2h[i] + 2.0 * k3h[i] + k4h[i])
            if not (math.isfinite(lo[i]) and math.isfinite(hi[i])):
                return 2, Mlo, Mhi
            if hi[i] < lo[i]:
                mid = 0.5 * (lo[i] + hi[i])
                lo[i] = mid
                hi[i] = mid
            if hi[i] - lo[i] > cap:
                return 1, Mlo, Mhi
            Mlo[step + 1, i] = lo[i]
            Mhi[step + 1, i] = hi[i]
    return 0, Mlo, Mhi


# ---------------------------------------------------------------------------
# relaxation-trajectory driver: adaptive RK45 on the 2*nx auxiliary system
# ---------------------------------------------------------------------------


@jit_kernel
def _interp_bounds(t, t0, dtm, m, Mlo, Mhi, XL, XU):
    s = (t - t0) / dtm
    j = int(math.floor(s))
    if j < 0:
        j = 0
    if j > m - 1:
        j = m - 1
    th = s - j
    if th < 0.0:
        th = 0.0
    if th > 1.0:
        th = 1.0
    for i in range(XL.shape[0]):
        XL[i] = Mlo[j, i] * (1.0 - th) + Mlo[j + 1, i] * th
        XU[i] = Mhi[j, i] * (1.0 - th) + Mhi[j + 1, i] * th


@jit_kernel
def _relax_rhs(
    ops, ia, ib, cval, roots, t, y,
    t0, dtm, m, Mlo, Mhi,
    p, plo, phi, w, wlo, whi,
    XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
    bcv, bcc, blo, bhi, out,
):
    nx = XL.shape[0]
    _interp_bounds(t, t0, dtm, m, Mlo, Mhi, XL, XU)
    for i in range(nx):
        cv = y[i]
        cc = y[nx + i]
        if cv < XL[i]:
            cv = XL[i]
        if cv > XU[i]:
            cv = XU[i]
        if cc > XU[i]:
            cc = XU[i]
        if cc < XL[i]:
            cc = XL[i]
        if cv > cc:
            cv = cc
        xcv_c[i] = cv
        xcc_c[i] = cc
    for k in range(nx):
        for i in range(nx):
            xcv_f[i] = xcv_c[i]
            xcc_f[i] = xcc_c[i]
        # convex side of equation k sees component k pinned at its own convex value
        xcv_f[k] = xcv_c[k]
        xcc_f[k] = xcv_c[k]
        tape_eval_mc(
            ops, ia, ib, cval, t, p, p, plo, phi, w, w, wlo, whi,
            xcv_f, xcc_f, XL, XU, bcv, bcc, blo, bhi,
        )
        out[k] = bcv[roots[k]]
        for i in range(nx):
            xcv_f[i] = xcv_c[i]
            xcc_f[i] = xcc_c[i]
        xcv_f[k] = xcc_c[k]
        xcc_f[k] = xcc_c[k]
        tape_eval_mc(
            ops, ia, ib, cval, t, p, p, plo, phi, w, w, wlo, whi,
            xcv_f, xcc_f, XL, XU, bcv, bcc, blo, bhi,
        )
        out[nx + k] = bcc[roots[k]]


@jit_kernel
def drive_relax_rk45(
    ops, ia, ib, cval, roots,
    t0, tf, ycv0, ycc0,
    p, plo, phi, w, wlo, whi,
    Mlo, Mhi,
    rtol, atol, max_steps, snap_tol,
):
    nx = ycv0.shape[0]
    ny = 2 * nx
    nn = ops.shape[0]
    m = Mlo.shape[0] - 1
    dtm = (tf - t0) / m
    XL = np.empty(nx)
    XU = np.empty(nx)
    xcv_c = np.empty(nx)
    xcc_c = np.empty(nx)
    xcv_f = np.empty(nx)
    xcc_f = np.empty(nx)
    bcv = np.empty(nn)
    bcc = np.empty(nn)
    blo = np.empty(nn)
    bhi = np.empty(nn)
    y = np.empty(ny)
    for i in range(nx):
        y[i] = ycv0[i]
        y[nx + i] = ycc0[i]
    # clip the initial pair into the initial bounds
    _interp_bounds(t0, t0, dtm, m, Mlo, Mhi, XL, XU)
    for i in range(nx):
        if y[i] < XL[i]:
            y[i] = XL[i]
        if y[i] > XU[i]:
            y[i] = XU[i]
        if y[nx + i] > XU[i]:
            y[nx + i] = XU[i]
        if y[nx + i] < XL[i]:
            y[nx + i] = XL[i]
        if y[i] > y[nx + i]:
            if y[i] - y[nx + i] > snap_tol:
                return 3, np.empty(0), np.empty((0, nx)), np.empty((0, nx))
            y[i] = y[nx + i]
    kk = np.empty((7, ny))
    ys = np.empty(ny)
    y5 = np.empty(ny)
    f0 = np.empty(ny)
    cap = 1024
    ts = np.empty(cap)
    Rcv = np.empty((cap, nx))
    Rcc = np.empty((cap, nx))
    nrec = 0
    ts[nrec] = t0
    for i in range(nx):
        Rcv[nrec, i] = y[i]
        Rcc[nrec, i] = y[nx + i]
    nrec += 1
    _relax_rhs(ops, ia, ib, cval, roots, t0, y, t0, dtm, m, Mlo, Mhi,
               p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
               bcv, bcc, blo, bhi, f0)
    h = _initial_step(y, f0, t0, tf, rtol, atol)
    t = t0
    span = tf - t0
    nsteps = 0
    status = 0
    while t < tf:
        if nsteps >= max_steps or h < 1e-14 * span:
            status = 1
            break
        if h > tf - t:
            h = tf - t
        _relax_rhs(ops, ia, ib, cval, roots, t, y, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, kk[0])
        for s in range(1, 6):
            _dopri_stage(y, kk, h, s, ys)
            if s == 1:
                tstage = t + _C2 * h
            elif s == 2:
                tstage = t + _C3 * h
            elif s == 3:
                tstage = t + _C4 * h
            elif s == 4:
                tstage = t + _C5 * h
            else:
                tstage = t + h
            _relax_rhs(ops, ia, ib, cval, roots, tstage, ys, t0, dtm, m, Mlo, Mhi,
                       p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                       bcv, bcc, blo, bhi, kk[s])
        _dopri_stage(y, kk, h, 6, y5)
        _relax_rhs(ops, ia, ib, cval, roots, t + h, y5, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, kk[6])
        err = _dopri_err(y, y5, kk, h, rtol, atol)
        if err <= 1.0:
            tn = t + h
            if tf - tn < 1e-12 * span:
                tn = tf
            # project the accepted state into the bound tube, then snap
            _interp_bounds(tn, t0, dtm, m, Mlo, Mhi, XL, XU)
            ok = True
            for i in range(nx):
                if not (math.isfinite(y5[i]) and math.isfinite(y5[nx + i])):
                    status = 2
                    ok = False
                    break
                if y5[i] < XL[i]:
                    y5[i] = XL[i]
                if y5[i] > XU[i]:
                    y5[i] = XU[i]
                if y5[nx + i] > XU[i]:
                    y5[nx + i] = XU[i]
                if y5[nx + i] < XL[i]:
                    y5[nx + i] = XL[i]
                if y5[i] > y5[nx + i]:
                    if y5[i] - y5[nx + i] > snap_tol:
                        status = 3
                        ok = False
                        break
                    y5[i] = y5[nx + i]
            if not ok:
                break
            t = tn
            for i in range(ny):
                y[i] = y5[i]
            if nrec == cap:
                newcap = cap * 2
                nts = np.empty(newcap)
                nRcv = np.empty((newcap, nx))
                nRcc = np.empty((newcap, nx))
                for r in range(cap):
                    nts[r] = ts[r]
                    for i in range(nx):
                        nRcv[r, i] = Rcv[r, i]
                        nRcc[r, i] = Rcc[r, i]
                ts = nts
                Rcv = nRcv
                Rcc = nRcc
                cap = newcap
            ts[nrec] = t
            for i in range(nx):
                Rcv[nrec, i] = y[i]
                Rcc[nrec, i] = y[nx + i]
            nrec += 1
            nsteps += 1
        h = h * _step_factor(err)
    return status, ts[:nrec].copy(), Rcv[:nrec].copy(), Rcc[:nrec].copy()


@jit_kernel
def drive_relax_rk4(
    ops, ia, ib, cval, roots,
    t0, tf, ycv0, ycc0,
    p, plo, phi, w, wlo, whi,
    Mlo, Mhi,
    nsteps, snap_tol,
):
    nx = ycv0.shape[0]
    ny = 2 * nx
    nn = ops.shape[0]
    m = Mlo.shape[0] - 1
    dtm = (tf - t0) / m
    XL = np.empty(nx)
    XU = np.empty(nx)
    xcv_c = np.empty(nx)
    xcc_c = np.empty(nx)
    xcv_f = np.empty(nx)
    xcc_f = np.empty(nx)
    bcv = np.empty(nn)
    bcc = np.empty(nn)
    blo = np.empty(nn)
    bhi = np.empty(nn)
    y = np.empty(ny)
    for i in range(nx):
        y[i] = ycv0[i]
        y[nx + i] = ycc0[i]
    _interp_bounds(t0, t0, dtm, m, Mlo, Mhi, XL, XU)
    ts = np.empty(nsteps + 1)
    Rcv = np.empty((nsteps + 1, nx))
    Rcc = np.empty((nsteps + 1, nx))
    for i in range(nx):
        if y[i] < XL[i]:
            y[i] = XL[i]
        if y[i] > XU[i]:
            y[i] = XU[i]
        if y[nx + i] > XU[i]:
            y[nx + i] = XU[i]
        if y[nx + i] < XL[i]:
            y[nx + i] = XL[i]
        if y[i] > y[nx + i]:
            if y[i] - y[nx + i] > snap_tol:
                return 3, ts, Rcv, Rcc
            y[i] = y[nx + i]
    ts[0] = t0
    for i in range(nx):
        Rcv[0, i] = y[i]
        Rcc[0, i] = y[nx + i]
    k1 = np.empty(ny)
    k2 = np.empty(ny)
    k3 = np.empty(ny)
    k4 = np.empty(ny)
    ys = np.empty(ny)
    h = (tf - t0) / nsteps
    for step in range(nsteps):
        t = t0 + step * h
        _relax_rhs(ops, ia, ib, cval, roots, t, y, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, k1)
        for i in range(ny):
            ys[i] = y[i] + 0.5 * h * k1[i]
        _relax_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, ys, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, k2)
        for i in range(ny):
            ys[i] = y[i] + 0.5 * h * k2[i]
        _relax_rhs(ops, ia, ib, cval, roots, t + 0.5 * h, ys, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, k3)
        for i in range(ny):
            ys[i] = y[i] + h * k3[i]
        _relax_rhs(ops, ia, ib, cval, roots, t + h, ys, t0, dtm, m, Mlo, Mhi,
                   p, plo, phi, w, wlo, whi, XL, XU, xcv_c, xcc_c, xcv_f, xcc_f,
                   bcv, bcc, blo, bhi, k4)
        tn = t0 + (step + 1) * h
        if step == nsteps - 1:
            tn = tf
        _interp_bounds(tn, t0, dtm, m, Mlo, Mhi, XL, XU)
        for i in range(ny):
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(nx):
            if not (math.isfinite(y[i]) and math.isfinite(y[nx + i])):
                return 2, ts, Rcv, Rcc
            if y[i] < XL[i]:
                y[i] = XL[i]
            if y[i] > XU[i]:
                y[i] = XU[i]
            if y[nx + i] > XU[i]:
                y[nx + i] = XU[i]
            if y[nx + i] < XL[i]:
                y[nx + i] = XL[i]
            if y[i] > y[nx + i]:
                if y[i] - y[nx + i] > snap_tol:
                    return 3, ts, Rcv, Rcc
                y[i] = y[nx + i]
        ts[step + 1] = tn
        for i in range(nx):
            Rcv[step + 1, i] = y[i]
            Rcc[step + 1, i] = y[nx + i]
    return 0, ts, Rcv, Rcc
