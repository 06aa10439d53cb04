"""Hot numeric kernels: tridiagonal solves, reflection extension, and the
implicit time-marching loops of the forward and adjoint solvers.

Two implementations are kept side by side: numba ``@njit`` loops and a
vectorized numpy/scipy path.  The active one is chosen at import time by the
``STEFAN_NUMBA`` environment variable ("0"/"false"/"off" selects the numpy
path; anything else, or unset, selects numba when it is importable).
``benchmarks/bench_kernels.py`` times both.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but stay importable
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("STEFAN_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "off",
)


# ---------------------------------------------------------------------------
# tridiagonal solve
#
# Row i reads  sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i];
# sub[0] and sup[-1] are ignored.


def _thomas_loop(sub, diag, sup, rhs):
    n = diag.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    x = np.empty(n)
    if diag[0] == 0.0:
        return x, 0
    cp[0] = sup[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        w = diag[i] - sub[i] * cp[i - 1]
        if w == 0.0:
            return x, i
        cp[i] = sup[i] / w
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / w
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x, -1


def _thomas_numpy(sub, diag, sup, rhs):
    from scipy.linalg import solve_banded

    n = diag.shape[0]
    if np.any(diag == 0.0):
        return np.empty(n), int(np.argmax(diag == 0.0))
    ab = np.zeros((3, n))
    ab[0, 1:] = sup[:-1]
    ab[1, :] = diag
    ab[2, :-1] = sub[1:]
    try:
        x = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError:
        return np.empty(n), 0
    return x, -1


# ---------------------------------------------------------------------------
# even-reflection extension about the free boundary
#
# A profile known on [0, s] is continued to x > s by iterated even reflection:
# a query in (2^(p-1) s, 2^p s] maps to 2^p s - x, repeated until it lands in
# [0, s].


def _reflect_into_loop(queries, s):
    out = np.empty_like(queries)
    for j in range(queries.shape[0]):
        x = queries[j]
        it = 0
        while x > s and it < 64:
            p = 2.0 * s
            while p < x:
                p *= 2.0
            x = p - x
            it += 1
        if x < 0.0:
            x = 0.0
        out[j] = x
    return out


def _reflect_into_numpy(queries, s):
    x = np.array(queries, dtype=float, copy=True)
    for _ in range(64):
        mask = x > s
        if not mask.any():
            break
        xm = x[mask]
        p = np.full_like(xm, 2.0 * s)
        grow = p < xm
        while grow.any():
            p[grow] *= 2.0
            grow = p < xm
        x[mask] = p - xm
    return np.maximum(x, 0.0)


def _extend_reflect_loop(nodes, values, m, s):
    """Fill values[m+1:] by reflecting node coordinates about s and
    piecewise-linearly interpolating the active values[0..m]."""
    n = nodes.shape[0]
    for j in range(m + 1, n):
        x = nodes[j]
        it = 0
        while x > s and it < 64:
            p = 2.0 * s
            while p < x:
                p *= 2.0
            x = p - x
            it += 1
        if x < 0.0:
            x = 0.0
        # binary search for the active cell containing x
        lo = 0
        hi = m
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if nodes[mid] <= x:
                lo = mid
            else:
                hi = mid
        h = nodes[hi] - nodes[lo]
        if h > 0.0:
            w = (x - nodes[lo]) / h
        else:
            w = 0.0
        values[j] = (1.0 - w) * values[lo] + w * values[hi]


def _extend_reflect_numpy(nodes, values, m, s):
    if m + 1 >= nodes.shape[0]:
        return
    mapped = _reflect_into_numpy(nodes[m + 1 :], s)
    values[m + 1 :] = np.interp(mapped, nodes[: m + 1], values[: m + 1])


# ---------------------------------------------------------------------------
# forward march
#
# Implicit step k solves a tridiagonal system on the active nodes 0..m[k]:
# the first row carries the Neumann flux g, interior rows the nonuniform
# conduction stencil with cell-averaged coefficients, and the last row the
# discrete Stefan flux balance.  Nodes beyond the boundary are filled by the
# reflection extension so the next step can read them.


def _march_forward_loop(x, h, m, a_c, b_c, c_c, f_c, g_avg, stefan_avg, u_init, tau):
    nlev = m.shape[0]
    nn = x.shape[0]
    U = np.zeros((nlev, nn))
    U[0] = u_init
    sub = np.empty(nn)
    diag = np.empty(nn)
    sup = np.empty(nn)
    rhs = np.empty(nn)
    cp = np.empty(nn)
    dp = np.empty(nn)
    for k in range(1, nlev):
        mk = m[k]
        r = k - 1
        h0 = h[0]
        diag[0] = a_c[r, 0] + h0 * b_c[r, 0] - h0 * h0 * c_c[r, 0] + h0 * h0 / tau
        sup[0] = -(a_c[r, 0] + h0 * b_c[r, 0])
        rhs[0] = (h0 * h0 / tau) * U[k - 1, 0] - h0 * h0 * f_c[r, 0] - h0 * g_avg[r]
        for i in range(1, mk):
            hi = h[i]
            hm = h[i - 1]
            sub[i] = -a_c[r, i - 1] * hi
            diag[i] = (
                a_c[r, i - 1] * hi
                + a_c[r, i] * hm
                + b_c[r, i] * hi * hm
                - c_c[r, i] * hi * hi * hm
                + hi * hi * hm / tau
            )
            sup[i] = -(a_c[r, i] * hm + b_c[r, i] * hi * hm)
            rhs[i] = -hi * hi * hm * f_c[r, i] + (hi * hi * hm / tau) * U[k - 1, i]
        sub[mk] = -a_c[r, mk - 1]
        diag[mk] = a_c[r, mk - 1]
        rhs[mk] = -h[mk - 1] * stefan_avg[r]

        # Thomas forward sweep on rows 0..mk
        if diag[0] == 0.0:
            return U, k
        cp[0] = sup[0] / diag[0]
        dp[0] = rhs[0] / diag[0]
        for i in range(1, mk + 1):
            w = diag[i] - sub[i] * cp[i - 1]
            if w == 0.0:
                return U, k
            cp[i] = sup[i] / w
            dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / w
        U[k, mk] = dp[mk]
        for i in range(mk - 1, -1, -1):
            U[k, i] = dp[i] - cp[i] * U[k, i + 1]

        _extend_reflect_loop(x, U[k], mk, x[mk])
    return U, -1


def _march_forward_numpy(x, h, m, a_c, b_c, c_c, f_c, g_avg, stefan_avg, u_init, tau):
    nlev = m.shape[0]
    nn = x.shape[0]
    U = np.zeros((nlev, nn))
    U[0] = u_init
    for k in range(1, nlev):
        mk = int(m[k])
        r = k - 1
        sub = np.zeros(mk + 1)
        diag = np.empty(mk + 1)
        sup = np.zeros(mk + 1)
        rhs = np.empty(mk + 1)
        h0 = h[0]
        diag[0] = a_c[r, 0] + h0 * b_c[r, 0] - h0 * h0 * c_c[r, 0] + h0 * h0 / tau
        sup[0] = -(a_c[r, 0] + h0 * b_c[r, 0])
        rhs[0] = (h0 * h0 / tau) * U[k - 1, 0] - h0 * h0 * f_c[r, 0] - h0 * g_avg[r]
        if mk > 1:
            hi = h[1:mk]
            hm = h[: mk - 1]
            ai = a_c[r, 1:mk]
            am = a_c[r, : mk - 1]
            bi = b_c[r, 1:mk]
            ci = c_c[r, 1:mk]
            fi = f_c[r, 1:mk]
            sub[1:mk] = -am * hi
            diag[1:mk] = am * hi + ai * hm + bi * hi * hm - ci * hi * hi * hm + hi * hi * hm / tau
            sup[1:mk] = -(ai * hm + bi * hi * hm)
            rhs[1:mk] = -hi * hi * hm * fi + (hi * hi * hm / tau) * U[k - 1, 1:mk]
        sub[mk] = -a_c[r, mk - 1]
        diag[mk] = a_c[r, mk - 1]
        rhs[mk] = -h[mk - 1] * stefan_avg[r]

        sol, bad = _thomas_numpy(sub, diag, sup, rhs)
        if bad >= 0:
            return U, k
        U[k, : mk + 1] = sol
        _extend_reflect_numpy(x, U[k], mk, x[mk])
    return U, -1


# ---------------------------------------------------------------------------
# adjoint march (backward in time)
#
# Step k -> k-1 solves for psi on the active nodes 0..m[k-1]; the stencil is
# the formal adjoint of the forward interior stencil (conservative flux
# a*psi_x - b*psi, backward-differenced transport), with a homogeneous Robin
# row at x = 0 and the moving-boundary Robin row carrying the temperature
# mismatch data.


def _march_adjoint_loop(x, h, m, a_c, b_c, c_c, sprime, robin_data, psi_term, tau):
    nlev = m.shape[0]
    nn = x.shape[0]
    PSI = np.zeros((nlev, nn))
    PSI[nlev - 1] = psi_term
    sub = np.empty(nn)
    diag = np.empty(nn)
    sup = np.empty(nn)
    rhs = np.empty(nn)
    cp = np.empty(nn)
    dp = np.empty(nn)
    for k in range(nlev - 1, 0, -1):
        mk = m[k - 1]
        r = k - 1
        h0 = h[0]
        diag[0] = a_c[r, 0] + h0 * b_c[r, 0] - h0 * h0 * c_c[r, 0] + h0 * h0 / tau
        sup[0] = -a_c[r, 0]
        rhs[0] = (h0 * h0 / tau) * PSI[k, 0]
        for i in range(1, mk):
            hi = h[i]
            hm = h[i - 1]
            sub[i] = -a_c[r, i - 1] * hi - b_c[r, i - 1] * hi * hm
            diag[i] = (
                a_c[r, i - 1] * hi
                + a_c[r, i] * hm
                + b_c[r, i] * hi * hm
                - c_c[r, i] * hi * hi * hm
                + hi * hi * hm / tau
            )
            sup[i] = -a_c[r, i] * hm
            rhs[i] = (hi * hi * hm / tau) * PSI[k, i]
        hm = h[mk - 1]
        sub[mk] = -a_c[r, mk - 1] - hm * b_c[r, mk - 1]
        diag[mk] = a_c[r, mk - 1] - hm * sprime[r]
        rhs[mk] = hm * robin_data[r]

        if diag[0] == 0.0:
            return PSI, k - 1
        cp[0] = sup[0] / diag[0]
        dp[0] = rhs[0] / diag[0]
        for i in range(1, mk + 1):
            w = diag[i] - sub[i] * cp[i - 1]
            if w == 0.0:
                return PSI, k - 1
            cp[i] = sup[i] / w
            dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / w
        PSI[k - 1, mk] = dp[mk]
        for i in range(mk - 1, -1, -1):
            PSI[k - 1, i] = dp[i] - cp[i] * PSI[k - 1, i + 1]

        _extend_reflect_loop(x, PSI[k - 1], mk, x[mk])
    return PSI, -1


def _march_adjoint_numpy(x, h, m, a_c, b_c, c_c, sprime, robin_data, psi_term, tau):
    nlev = m.shape[0]
    nn = x.shape[0]
    PSI = np.zeros((nlev, nn))
    PSI[nlev - 1] = psi_term
    for k in range(nlev - 1, 0, -1):
        mk = int(m[k - 1])
        r = k - 1
        sub = np.zeros(mk + 1)
        diag = np.empty(mk + 1)
        sup = np.zeros(mk + 1)
        rhs = np.empty(mk + 1)
        h0 = h[0]
        diag[0] = a_c[r, 0] + h0 * b_c[r, 0] - h0 * h0 * c_c[r, 0] + h0 * h0 / tau
        sup[0] = -a_c[r, 0]
        rhs[0] = (h0 * h0 / tau) * PSI[k, 0]
        if mk > 1:
            hi = h[1:mk]
            hm = h[: mk - 1]
            ai = a_c[r, 1:mk]
            am = a_c[r, : mk - 1]
            bi = b_c[r, 1:mk]
            bm = b_c[r, : mk - 1]
            ci = c_c[r, 1:mk]
            sub[1:mk] = -am * hi - bm * hi * hm
            diag[1:mk] = am * hi + ai * hm + bi * hi * hm - ci * hi * hi * hm + hi * hi * hm / tau
            sup[1:mk] = -ai * hm
            rhs[1:mk] = (hi * hi * hm / tau) * PSI[k, 1:mk]
        hmm = h[mk - 1]
        sub[mk] = -a_c[r, mk - 1] - hmm * b_c[r, mk - 1]
        diag[mk] = a_c[r, mk - 1] - hmm * sprime[r]
        rhs[mk] = hmm * robin_data[r]

        sol, bad = _thomas_numpy(sub, diag, sup, rhs)
        if bad >= 0:
            return PSI, k - 1
        PSI[k - 1, : mk + 1] = sol
        _extend_reflect_numpy(x, PSI[k - 1], mk, x[mk])
    return PSI, -1


# ---------------------------------------------------------------------------
# path selection

if _HAVE_NUMBA:
    _thomas_numba = njit(cache=True)(_thomas_loop)
    _reflect_into_numba = njit(cache=True)(_reflect_into_loop)
    _extend_reflect_numba = njit(cache=True)(_extend_reflect_loop)
    _march_forward_numba = njit(cache=True)(_march_forward_loop)
    _march_adjoint_numba = njit(cache=True)(_march_adjoint_loop)
else:  # pragma: no cover
    _thomas_numba = None
    _reflect_into_numba = None
    _extend_reflect_numba = None
    _march_forward_numba = None
    _march_adjoint_numba = None

if USE_NUMBA:
    thomas = _thomas_numba
    reflect_into = _reflect_into_numba
    extend_reflect_fill = _extend_reflect_numba
    march_forward = _march_forward_numba
    march_adjoint = _march_adjoint_numba
else:
    thomas = _thomas_numpy
    reflect_into = _reflect_into_numpy
    extend_reflect_fill = _extend_reflect_numpy
    march_forward = _march_forward_numpy
    march_adjoint = _march_adjoint_numpy

ACTIVE_PATH = "numba" if USE_NUMBA else "numpy"
