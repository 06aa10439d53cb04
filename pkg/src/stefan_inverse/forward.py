"""Implicit finite-difference solver for the parabolic Neumann problem on the
moving domain 0 < x < s(t).

Each backward-Euler step solves a tridiagonal system on the nodes active at
that level: row 0 carries the prescribed flux g, interior rows the nonuniform
conduction stencil with coefficients frozen as Steklov cell averages, and the
last row the discrete Stefan flux balance a*u_x + gamma*s' = chi.  Values on
nodes beyond the current boundary come from iterated even reflection, so a
later level that activates them can read its previous-level data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import kernels
from .exceptions import ConstraintViolationError, SingularSystemError
from .grid import GridConfig, SpaceGrid, TimeGrid, build_space_grid

if TYPE_CHECKING:  # pragma: no cover
    from .functional import Control
    from .models import BenchmarkModel

logger = logging.getLogger(__name__)

_G2 = 0.5 / np.sqrt(3.0)  # 2-point Gauss offset on a unit cell
_G4_NODES = np.array(
    [
        0.5 - 0.8611363115940526 / 2.0,
        0.5 - 0.3399810435848563 / 2.0,
        0.5 + 0.3399810435848563 / 2.0,
        0.5 + 0.8611363115940526 / 2.0,
    ]
)
_G4_WEIGHTS = np.array(
    [
        0.3478548451374538 / 2.0,
        0.6521451548625461 / 2.0,
        0.6521451548625461 / 2.0,
        0.3478548451374538 / 2.0,
    ]
)


@dataclass(frozen=True)
class StateField:
    """Temperature values u_i(k) for every time level over the full node set;
    entries beyond the level's boundary hold the reflection extension."""

    tg: TimeGrid
    sg: SpaceGrid
    values: np.ndarray  # (n+1, N+1)

    def boundary_values(self) -> np.ndarray:
        """u at the moving boundary node of each level."""
        k = np.arange(self.tg.n + 1)
        return self.values[k, self.sg.boundary_index]

    def active_values(self, k: int) -> np.ndarray:
        return self.values[k, : self.sg.boundary_index[k] + 1]

    def to_csv(self, path: str) -> None:
        from .csvio import write_csv

        rows = []
        for k in range(self.tg.n + 1):
            m = int(self.sg.boundary_index[k])
            t = self.tg.nodes[k]
            for i in range(m + 1):
                rows.append((t, self.sg.nodes[i], self.values[k, i]))
        write_csv(path, ["t", "x", "u"], rows)


@dataclass(frozen=True)
class CoefficientTables:
    """Steklov cell averages of a, b, c, f over every (space cell, time step)."""

    a: np.ndarray  # (n, N)
    b: np.ndarray
    c: np.ndarray
    f: np.ndarray


def steklov_average(fun, cell) -> float:
    """Cell mean of ``fun`` by 2-point Gauss quadrature per axis.

    ``cell`` is (t0, t1) for a function of t, or (x0, x1, t0, t1) for a
    function of (x, t).
    """
    if len(cell) == 2:
        t0, t1 = cell
        mid, half = 0.5 * (t0 + t1), (t1 - t0)
        pts = (mid - half * _G2, mid + half * _G2)
        return 0.5 * float(fun(pts[0]) + fun(pts[1]))
    if len(cell) == 4:
        x0, x1, t0, t1 = cell
        xm, xh = 0.5 * (x0 + x1), (x1 - x0)
        tm, th = 0.5 * (t0 + t1), (t1 - t0)
        xs = (xm - xh * _G2, xm + xh * _G2)
        ts = (tm - th * _G2, tm + th * _G2)
        return 0.25 * float(sum(fun(x, t) for x in xs for t in ts))
    raise ValueError("cell must be (t0, t1) or (x0, x1, t0, t1)")


def coefficient_tables(model: BenchmarkModel, tg: TimeGrid, sg: SpaceGrid) -> CoefficientTables:
    """Steklov averages of the PDE coefficients on every cell of the grid."""
    x = sg.nodes
    h = sg.steps
    xm = 0.5 * (x[:-1] + x[1:])
    tmid = 0.5 * (tg.nodes[:-1] + tg.nodes[1:])
    xs = (xm - h * _G2, xm + h * _G2)
    ts = (tmid - tg.tau * _G2, tmid + tg.tau * _G2)

    def avg(fun):
        acc = np.zeros((tg.n, x.size - 1))
        for tq in ts:
            tcol = tq[:, None]
            for xq in xs:
                acc += fun(xq[None, :], tcol)
        return 0.25 * acc

    return CoefficientTables(a=avg(model.a), b=avg(model.b), c=avg(model.c), f=avg(model.f))


def boundary_interpolant(s: np.ndarray, tau: float):
    """Piecewise-quadratic interpolant of the boundary samples and its
    derivative, evaluated at local coordinate xi in [0,1] of each time cell.

    Returns a callable (xi) -> (values, derivs), each of shape (n,), built so
    the derivative is continuous with s'(0) = 0 and equals the backward
    difference at every node.
    """
    n = s.size - 1
    st = np.diff(s) / tau
    stt = np.zeros(n)
    if n >= 2:
        stt[1:] = np.diff(st) / tau  # stt[k-1] = s_ttbar at node k, for cells k >= 2

    def at(xi: float):
        val = np.empty(n)
        der = np.empty(n)
        dt = xi * tau
        val[0] = s[0] + 0.5 * xi * xi * tau * st[0]
        der[0] = xi * st[0]
        if n >= 2:
            val[1:] = s[1:n] + (dt - 0.5 * tau) * st[: n - 1] + 0.5 * dt * dt * stt[1:]
            der[1:] = st[: n - 1] + dt * stt[1:]
        return val, der

    return at


def stefan_flux_averages(s: np.ndarray, model: BenchmarkModel, tg: TimeGrid) -> np.ndarray:
    """Per-step averages of gamma(s(t),t)*s'(t) - chi(s(t),t) by 4-point Gauss
    quadrature over each time cell, using the quadratic boundary interpolant."""
    interp = boundary_interpolant(s, tg.tau)
    t_left = tg.nodes[:-1]
    out = np.zeros(tg.n)
    for xi, w in zip(_G4_NODES, _G4_WEIGHTS):
        val, der = interp(float(xi))
        tq = t_left + xi * tg.tau
        out += w * (model.gamma(val, tq) * der - model.chi(val, tq))
    return out


def extend_reflect(nodes, values, s: float, query):
    """Evaluate the reflective continuation of a profile given on [0, s].

    ``nodes``/``values`` describe the piecewise-linear profile on [0, s];
    queries beyond s are folded back by iterated even reflection about s,
    2s, 4s, ...
    """
    q = np.atleast_1d(np.asarray(query, dtype=float))
    mapped = kernels.reflect_into(q, float(s))
    out = np.interp(mapped, np.asarray(nodes, dtype=float), np.asarray(values, dtype=float))
    return float(out[0]) if np.ndim(query) == 0 else out


def _initial_values(model: BenchmarkModel, sg: SpaceGrid) -> np.ndarray:
    m0 = int(sg.boundary_index[0])
    u0 = np.zeros(sg.n_nodes)
    u0[: m0 + 1] = model.phi(sg.nodes[: m0 + 1])
    kernels.extend_reflect_fill(sg.nodes, u0, m0, float(sg.nodes[m0]))
    return u0


def solve_forward_on_grid(
    v: Control,
    model: BenchmarkModel,
    tg: TimeGrid,
    sg: SpaceGrid,
    tables: CoefficientTables | None = None,
) -> StateField:
    """March the implicit scheme over prebuilt grids."""
    s = np.asarray(v.s, dtype=float)
    g = np.asarray(v.g, dtype=float)
    if np.min(s) <= 0.0:
        raise ConstraintViolationError("boundary control must stay strictly positive")
    if tables is None:
        tables = coefficient_tables(model, tg, sg)
    if float(np.max(tables.c)) * tg.tau >= 1.0:
        logger.warning("reaction coefficient c exceeds 1/tau; tridiagonal dominance lost")

    g_avg = 0.5 * (g[:-1] + g[1:])
    stefan_avg = stefan_flux_averages(s, model, tg)
    u0 = _initial_values(model, sg)

    U, bad = kernels.march_forward(
        sg.nodes,
        sg.steps,
        sg.boundary_index,
        tables.a,
        tables.b,
        tables.c,
        tables.f,
        g_avg,
        stefan_avg,
        u0,
        tg.tau,
    )
    if bad >= 0:
        raise SingularSystemError(bad)
    if not np.all(np.isfinite(U)):
        level = int(np.argmax(~np.all(np.isfinite(U), axis=1)))
        raise SingularSystemError(level, f"non-finite state at time level {level}")
    return StateField(tg=tg, sg=sg, values=U)


def solve_forward(v: Control, model: BenchmarkModel, tg: TimeGrid, cfg: GridConfig) -> StateField:
    """Build the spatial grid from the control's boundary samples and solve."""
    sg = build_space_grid(v.s, cfg)
    return solve_forward_on_grid(v, model, tg, sg)
