"""Cost functional (plain and Tikhonov-regularized) and the raw L2 gradient
assembled from the forward and adjoint fields.

The gradient with respect to the boundary has an L2 density

    2*beta1*(u - mu)*u_x + psi*(chi_x + gamma_t) + gamma*psi_x*s'
    + psi_t*gamma - psi*(a*u_x)_x        evaluated at x = s(t),

plus a point mass at t = T with coefficient

    beta0*(u(s(T),T) - w(s(T)))^2 + 2*beta2*(s(T) - s_*) - gamma*psi|_(s(T),T);

the gradient with respect to the flux is -psi(0, t).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Optional

import numpy as np

from .adjoint import AdjointField, interp_final_profile
from .exceptions import ConstraintViolationError, GridMismatchError, MissingMeasurementsError
from .forward import StateField
from .grid import TimeGrid

if TYPE_CHECKING:  # pragma: no cover
    from .models import BenchmarkModel, Measurements


@dataclass(frozen=True)
class Control:
    """The control pair: boundary position samples s and flux samples g on
    the time grid.  s0 is the fixed initial position s(0)."""

    s: np.ndarray
    g: np.ndarray
    s0: float

    def __post_init__(self):
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float))
        object.__setattr__(self, "g", np.asarray(self.g, dtype=float))
        if self.s.shape != self.g.shape:
            raise ConstraintViolationError("s and g must share the time grid")

    def validate(self, delta: float) -> None:
        if abs(self.s[0] - self.s0) > 1e-12 * max(1.0, abs(self.s0)):
            raise ConstraintViolationError(f"s(0)={self.s[0]} differs from fixed s0={self.s0}")
        if np.min(self.s) < delta:
            raise ConstraintViolationError(f"boundary dips below delta={delta}")

    def with_arrays(self, s=None, g=None) -> "Control":
        return replace(self, s=self.s if s is None else s, g=self.g if g is None else g)


@dataclass(frozen=True)
class CostBreakdown:
    """Additive pieces of the cost: final-profile, boundary-temperature,
    final-position, and Tikhonov terms."""

    j_final: float
    j_boundary: float
    j_position: float
    j_reg: float
    total: float

    @property
    def data_mismatch(self) -> float:
        return self.j_final + self.j_boundary + self.j_position


@dataclass(frozen=True)
class RawGradient:
    """L2 gradient samples plus the scalar coefficient of the point mass at
    t = T carried separately (the preconditioner consumes it as a tau^-1
    spike at the last node)."""

    grad_s: np.ndarray
    dirac_weight: float
    grad_g: np.ndarray

    def to_csv(self, path: str, tg: TimeGrid) -> None:
        from .csvio import write_csv

        write_csv(
            path,
            ["t", "grad_s", "grad_g"],
            zip(tg.nodes, self.grad_s, self.grad_g),
            comment=f"dirac_weight={self.dirac_weight!r}",
        )


def time_weights(tg: TimeGrid) -> np.ndarray:
    """Trapezoid quadrature weights on the time grid."""
    w = np.full(tg.n + 1, tg.tau)
    w[0] = w[-1] = 0.5 * tg.tau
    return w


def trapz_nonuniform(values: np.ndarray, nodes: np.ndarray) -> float:
    return float(np.trapz(values, nodes))


def evaluate_cost(
    u: StateField,
    v: Control,
    meas: Measurements,
    weights=(1.0, 1.0, 1.0),
    beta: float = 0.0,
    centroid: Optional[np.ndarray] = None,
) -> CostBreakdown:
    """Evaluate the (optionally regularized) cost at a solved state.

    The final-profile term integrates (u(x,T) - w(x))^2 over [0, s(T)] with
    the trapezoid rule; the boundary term is the rectangle sum
    tau * sum_{k=1..n} (u(s_k,t_k) - mu_k)^2; the Tikhonov term uses
    trapezoid weights so its discrete gradient is exactly 2*beta*(s - sbar).
    """
    if meas is None:
        raise MissingMeasurementsError("cost evaluation requires a measurement set")
    tg, sg = u.tg, u.sg
    beta0, beta1, beta2 = weights

    m_final = int(sg.boundary_index[-1])
    w_nodes = interp_final_profile(meas, sg)
    resid_final = u.values[-1, : m_final + 1] - w_nodes
    j_final = beta0 * trapz_nonuniform(resid_final**2, sg.nodes[: m_final + 1])

    u_bnd = u.boundary_values()
    j_boundary = beta1 * tg.tau * float(np.sum((u_bnd[1:] - meas.mu[1:]) ** 2))

    j_position = beta2 * float(v.s[-1] - meas.s_star) ** 2

    j_reg = 0.0
    if centroid is not None and beta != 0.0:
        j_reg = beta * float(np.sum(time_weights(tg) * (v.s - centroid) ** 2))

    total = j_final + j_boundary + j_position + j_reg
    return CostBreakdown(j_final, j_boundary, j_position, j_reg, total)


def _onesided_dx_weights(d1: np.ndarray, d2: np.ndarray):
    """Weights of the 3-point one-sided first derivative at the last node of
    a stencil with spacings d1 (far pair) and d2 (near pair); exact for
    quadratics."""
    w0 = d2 / (d1 * (d1 + d2))
    w1 = -(d1 + d2) / (d1 * d2)
    w2 = (d1 + 2.0 * d2) / (d2 * (d1 + d2))
    return w0, w1, w2


def boundary_trace(values, nodes, m: int, quantity: str, *, a_fn=None, t=None, values_prev=None, tau=None):
    """Evaluate a field quantity at the boundary node x_m of one level.

    ``quantity``: "value", "dx" (one-sided first derivative), "flux_div"
    ((a*u_x)_x via the difference of cell-midpoint fluxes; needs a_fn and t),
    or "dt" (backward time difference; needs values_prev and tau).
    """
    values = np.asarray(values, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    if quantity == "value":
        return float(values[m])
    if quantity == "dt":
        return float((values[m] - values_prev[m]) / tau)
    if m < 2:
        raise GridMismatchError("boundary trace needs at least 3 active nodes")
    d1 = nodes[m - 1] - nodes[m - 2]
    d2 = nodes[m] - nodes[m - 1]
    if quantity == "dx":
        w0, w1, w2 = _onesided_dx_weights(d1, d2)
        return float(w0 * values[m - 2] + w1 * values[m - 1] + w2 * values[m])
    if quantity == "flux_div":
        a1 = float(a_fn(0.5 * (nodes[m - 1] + nodes[m]), t))
        a2 = float(a_fn(0.5 * (nodes[m - 2] + nodes[m - 1]), t))
        flux1 = a1 * (values[m] - values[m - 1]) / d2
        flux2 = a2 * (values[m - 1] - values[m - 2]) / d1
        return float((flux1 - flux2) / (0.5 * (d1 + d2)))
    raise ValueError(f"unknown trace quantity {quantity!r}")


def gradient_L2(
    u: StateField,
    psi: AdjointField,
    v: Control,
    model: BenchmarkModel,
    meas: Measurements,
    weights=(1.0, 1.0, 1.0),
    beta: float = 0.0,
    centroid: Optional[np.ndarray] = None,
) -> RawGradient:
    """Assemble the raw L2 gradient from the state and adjoint fields."""
    tg, sg = u.tg, u.sg
    if psi.values.shape != u.values.shape:
        raise GridMismatchError("state and adjoint fields live on different grids")
    beta0, beta1, beta2 = weights
    n = tg.n
    tau = tg.tau
    x = sg.nodes
    mk = sg.boundary_index
    if int(np.min(mk)) < 2:
        raise GridMismatchError("boundary traces need at least 3 active nodes per level")
    lev = np.arange(n + 1)

    # one-sided spatial stencil at the boundary node of each level
    d1 = x[mk - 1] - x[mk - 2]
    d2 = x[mk] - x[mk - 1]
    w0, w1, w2 = _onesided_dx_weights(d1, d2)
    U2, U1, U0b = u.values[lev, mk - 2], u.values[lev, mk - 1], u.values[lev, mk]
    P2, P1, P0b = psi.values[lev, mk - 2], psi.values[lev, mk - 1], psi.values[lev, mk]
    u_x = w0 * U2 + w1 * U1 + w2 * U0b
    psi_x = w0 * P2 + w1 * P1 + w2 * P0b

    t_nodes = tg.nodes
    a_mid1 = model.a(0.5 * (x[mk - 1] + x[mk]), t_nodes)
    a_mid2 = model.a(0.5 * (x[mk - 2] + x[mk - 1]), t_nodes)
    flux_div = (a_mid1 * (U0b - U1) / d2 - a_mid2 * (U1 - U2) / d1) / (0.5 * (d1 + d2))

    # time derivative of psi at the boundary node index, backward in time
    # (forward at t = 0, where no earlier level exists)
    psi_t = np.empty(n + 1)
    psi_t[1:] = (psi.values[lev[1:], mk[1:]] - psi.values[lev[1:] - 1, mk[1:]]) / tau
    psi_t[0] = (psi.values[1, mk[0]] - psi.values[0, mk[0]]) / tau

    sprime = np.zeros(n + 1)
    sprime[1:] = np.diff(v.s) / tau

    s_pos = v.s
    gam = model.gamma(s_pos, t_nodes)
    cross = model.chi_x(s_pos, t_nodes) + model.gamma_t(s_pos, t_nodes)

    grad_s = (
        2.0 * beta1 * (U0b - meas.mu) * u_x
        + P0b * cross
        + gam * psi_x * sprime
        + psi_t * gam
        - P0b * flux_div
    )
    if centroid is not None and beta != 0.0:
        grad_s = grad_s + 2.0 * beta * (v.s - centroid)
    grad_s[0] = 0.0  # s(0) is fixed

    w_nodes = interp_final_profile(meas, sg)
    r_final = float(u.values[-1, mk[-1]] - w_nodes[-1])
    dirac_weight = (
        beta0 * r_final**2
        + 2.0 * beta2 * float(v.s[-1] - meas.s_star)
        - float(gam[-1]) * float(psi.values[-1, mk[-1]])
    )

    grad_g = -psi.values[lev, 0]
    return RawGradient(grad_s=grad_s, dirac_weight=dirac_weight, grad_g=np.array(grad_g))
