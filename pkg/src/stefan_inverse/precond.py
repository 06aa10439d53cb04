"""Sobolev-gradient preconditioning.

The raw L2 gradient is lifted to the H1 representative by solving, per
component, the two-point boundary value problem

    G - ell^2 * G'' = RHS on (0, T),   G' = 0 at t = 0 and t = T,

discretized with second-order differences (ghost nodes at the Neumann ends)
and solved by the tridiagonal kernel.  Acting on the right-hand side this is
a low-pass filter with cutoff scale ell.  The point mass of the s-gradient
enters the right-hand side as a tau^-1 spike at the last node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import SingularSystemError
from .functional import RawGradient
from .grid import TimeGrid


@dataclass(frozen=True)
class H1Gradient:
    """Smoothed gradient samples and the length scales that produced them."""

    grad_s: np.ndarray
    grad_g: np.ndarray
    ell_s: float
    ell_g: float


def helmholtz_solve(rhs: np.ndarray, ell: float, tau: float) -> np.ndarray:
    """Solve G - ell^2 G'' = rhs with homogeneous Neumann ends."""
    if ell == 0.0:
        return np.array(rhs, dtype=float)
    n = rhs.size
    r = (ell / tau) ** 2
    diag = np.full(n, 1.0 + 2.0 * r)
    sub = np.full(n, -r)
    sup = np.full(n, -r)
    sub[-1] = -2.0 * r
    sup[0] = -2.0 * r
    x, bad = kernels.thomas(sub, diag, sup, np.asarray(rhs, dtype=float))
    if bad >= 0:
        raise SingularSystemError(bad, "Helmholtz solve hit a zero pivot")
    return x


def smooth_gradient(raw: RawGradient, ell_s: float, ell_g: float, tg: TimeGrid) -> H1Gradient:
    """Lift the raw gradient to H1 with independent length scales per
    component; ell = 0 leaves a component unchanged (the point-mass spike is
    applied to the s right-hand side either way), and the fixed s(0)
    constraint re-zeroes the first s entry after smoothing."""
    rhs_s = np.array(raw.grad_s, dtype=float)
    rhs_s[-1] += raw.dirac_weight / tg.tau
    out_s = helmholtz_solve(rhs_s, ell_s, tg.tau)
    out_g = helmholtz_solve(np.array(raw.grad_g, dtype=float), ell_g, tg.tau)
    out_s[0] = 0.0
    return H1Gradient(grad_s=out_s, grad_g=out_g, ell_s=ell_s, ell_g=ell_g)


def smoothing_comparison_csv(raw: RawGradient, smoothed: H1Gradient, tg: TimeGrid, path: str) -> None:
    """Raw vs smoothed gradients, for plotting."""
    from .csvio import write_csv

    rhs_s = np.array(raw.grad_s)
    rhs_s[-1] += raw.dirac_weight / tg.tau
    write_csv(
        path,
        ["t", "raw_s", "smoothed_s", "raw_g", "smoothed_g"],
        zip(tg.nodes, rhs_s, smoothed.grad_s, raw.grad_g, smoothed.grad_g),
    )
