"""Backward-in-time adjoint solver.

The adjoint equation (a*psi_x)_x - (b*psi)_x + c*psi + psi_t = 0 is marched
from the terminal condition psi(x,T) = 2*beta0*(u(x,T) - w(x)) down to t = 0
with implicit steps on the same moving grid as the forward solve.  The
homogeneous Robin condition a*psi_x - b*psi = 0 holds at x = 0 and the
moving-boundary Robin condition a*psi_x - (b + s')*psi = 2*beta1*(u - mu)
injects the boundary-temperature mismatch.  The interior stencil is the
formal adjoint of the forward one (transport backward-differenced), so the
two operators are mutually adjoint in the cell-weighted inner product.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import kernels
from .exceptions import GridMismatchError, SingularSystemError
from .forward import CoefficientTables, StateField, coefficient_tables
from .grid import SpaceGrid, TimeGrid

if TYPE_CHECKING:  # pragma: no cover
    from .functional import Control
    from .models import BenchmarkModel, Measurements

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjointField:
    """Adjoint values psi_i(k) on the same grids as the forward state."""

    tg: TimeGrid
    sg: SpaceGrid
    values: np.ndarray  # (n+1, N+1)

    def boundary_values(self) -> np.ndarray:
        k = np.arange(self.tg.n + 1)
        return self.values[k, self.sg.boundary_index]

    def to_csv(self, path: str) -> None:
        from .csvio import write_csv

        rows = []
        for k in range(self.tg.n + 1):
            m = int(self.sg.boundary_index[k])
            t = self.tg.nodes[k]
            for i in range(m + 1):
                rows.append((t, self.sg.nodes[i], self.values[k, i]))
        write_csv(path, ["t", "x", "psi"], rows)


def interp_final_profile(meas, sg: SpaceGrid) -> np.ndarray:
    """Measured final-time profile sampled on the current final-level nodes;
    queries beyond the data support are clamped to the last value."""
    m_final = int(sg.boundary_index[-1])
    x_active = sg.nodes[: m_final + 1]
    if x_active[-1] > meas.x_w[-1] + 1e-12:
        logger.debug(
            "final boundary %.6g exceeds measurement support %.6g; clamping",
            x_active[-1],
            meas.x_w[-1],
        )
    return np.interp(x_active, meas.x_w, meas.w)


def solve_adjoint(
    u: StateField,
    v: Control,
    meas: Measurements,
    weights,
    model: BenchmarkModel,
    tables: CoefficientTables | None = None,
) -> AdjointField:
    """March the adjoint problem backward over the forward state's grids."""
    tg, sg = u.tg, u.sg
    s = np.asarray(v.s, dtype=float)
    if s.size != tg.n + 1:
        raise GridMismatchError("control and state were built on different time grids")
    if meas.mu.size != tg.n + 1:
        raise GridMismatchError("measurement set does not match the time grid")
    beta0, beta1, _ = weights
    if tables is None:
        tables = coefficient_tables(model, tg, sg)

    # terminal condition, reflected beyond the final boundary
    m_final = int(sg.boundary_index[-1])
    psi_term = np.zeros(sg.n_nodes)
    w_nodes = interp_final_profile(meas, sg)
    psi_term[: m_final + 1] = 2.0 * beta0 * (u.values[-1, : m_final + 1] - w_nodes)
    kernels.extend_reflect_fill(sg.nodes, psi_term, m_final, float(sg.nodes[m_final]))

    # step k -> k-1 carries the boundary mismatch at the later level k,
    # matching the cost sum over k = 1..n
    u_bnd = u.boundary_values()
    robin_data = 2.0 * beta1 * (u_bnd[1:] - meas.mu[1:])
    sprime = np.diff(s) / tg.tau

    PSI, bad = kernels.march_adjoint(
        sg.nodes,
        sg.steps,
        sg.boundary_index,
        tables.a,
        tables.b,
        tables.c,
        sprime,
        robin_data,
        psi_term,
        tg.tau,
    )
    if bad >= 0:
        raise SingularSystemError(bad)
    if not np.all(np.isfinite(PSI)):
        level = int(np.argmax(~np.all(np.isfinite(PSI), axis=1)))
        raise SingularSystemError(level, f"non-finite adjoint at time level {level}")
    return AdjointField(tg=tg, sg=sg, values=PSI)
