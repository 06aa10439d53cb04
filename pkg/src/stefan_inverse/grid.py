"""Time and space grids.

The time grid is uniform on [0, T].  The spatial grid is rebuilt from the
current free-boundary samples on every descent iterate: uniform with step at
most ``h_x`` below the smallest sample, then the sorted samples themselves,
with near-duplicates (gap < ``eps_x``) merged to the earlier node and
oversized gaps (> ``h_x``) subdivided uniformly.  Every retained boundary
sample is a grid node, so the moving boundary never falls between nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateBoundaryError, InvalidConfigError, OutOfRangeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridConfig:
    """Discretization parameters: n time intervals on [0, T], spatial step
    bounds eps_x <= h_i <= h_x."""

    h_x: float
    eps_x: float
    n: int
    T: float = 1.0

    def validate(self) -> None:
        if not (0.0 < self.eps_x < self.h_x):
            raise InvalidConfigError(f"need 0 < eps_x < h_x, got eps_x={self.eps_x}, h_x={self.h_x}")
        if self.n < 2:
            raise InvalidConfigError(f"need n >= 2 time intervals, got {self.n}")
        if self.T <= 0.0:
            raise InvalidConfigError(f"need T > 0, got {self.T}")
        tau = self.T / self.n
        if self.h_x > math.sqrt(tau):
            logger.warning(
                "h_x=%.3g exceeds sqrt(tau)=%.3g; spatial step should scale like sqrt(tau)",
                self.h_x,
                math.sqrt(tau),
            )


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_j = j*tau on [0, T] with tau = T/n."""

    T: float
    n: int
    tau: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tau", self.T / self.n)
        nodes = np.linspace(0.0, self.T, self.n + 1)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)


def build_time_grid(T: float, n: int) -> TimeGrid:
    """Uniform time grid with n intervals; requires T > 0 and n >= 2."""
    if T <= 0.0:
        raise InvalidConfigError(f"need T > 0, got {T}")
    if n < 2:
        raise InvalidConfigError(f"need n >= 2, got {n}")
    return TimeGrid(T=float(T), n=int(n))


@dataclass(frozen=True)
class SpaceGrid:
    """Nonuniform spatial grid adapted to the free-boundary samples.

    ``boundary_index[k]`` is the index of the node identified with the
    boundary position at time level k; merged near-duplicate samples share a
    node.
    """

    nodes: np.ndarray
    boundary_index: np.ndarray
    steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        bidx = np.asarray(self.boundary_index, dtype=np.int64)
        bidx.setflags(write=False)
        object.__setattr__(self, "boundary_index", bidx)
        steps = np.diff(nodes)
        steps.setflags(write=False)
        object.__setattr__(self, "steps", steps)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    def boundary_position(self, k: int) -> float:
        return float(self.nodes[self.boundary_index[k]])


def build_space_grid(s_samples, cfg: GridConfig) -> SpaceGrid:
    """Build the spatial grid from free-boundary samples at the time nodes.

    Uniform nodes with step <= h_x cover [0, s_min]; above s_min the sorted
    samples are kept as nodes, merging any pair closer than eps_x to the
    earlier (smaller) node and subdividing any gap wider than h_x into
    ceil(gap/h_x) equal pieces.
    """
    cfg.validate()
    s = np.asarray(s_samples, dtype=float)
    if s.ndim != 1 or s.size != cfg.n + 1:
        raise InvalidConfigError(f"expected {cfg.n + 1} boundary samples, got shape {s.shape}")
    if s.max() <= 0.0:
        raise DegenerateBoundaryError("all boundary samples are non-positive")
    if s.min() <= 0.0:
        raise DegenerateBoundaryError("boundary samples must stay strictly positive")

    s_min = float(s.min())
    m0 = max(1, math.ceil(s_min / cfg.h_x - 1e-12))
    if s_min / m0 < cfg.eps_x:
        raise InvalidConfigError("uniform step below eps_x; decrease eps_x or increase h_x")
    uniform = np.linspace(0.0, s_min, m0 + 1)

    # sorted samples above s_min, with eps_x merging; record which kept value
    # represents each time level
    order = np.argsort(s, kind="stable")
    kept_vals = [s_min]
    level_val = np.empty(cfg.n + 1)
    for idx in order:
        v = float(s[idx])
        if v - kept_vals[-1] < cfg.eps_x:
            level_val[idx] = kept_vals[-1]
        else:
            kept_vals.append(v)
            level_val[idx] = v

    # assemble nodes, subdividing oversized gaps
    nodes = list(uniform)
    kept_pos = {s_min: m0}
    for v in kept_vals[1:]:
        gap = v - nodes[-1]
        if gap > cfg.h_x * (1.0 + 1e-12):
            pieces = math.ceil(gap / cfg.h_x)
            left = nodes[-1]
            for j in range(1, pieces):
                nodes.append(left + gap * j / pieces)
        nodes.append(v)
        kept_pos[v] = len(nodes) - 1

    boundary_index = np.array([kept_pos[level_val[k]] for k in range(cfg.n + 1)], dtype=np.int64)
    return SpaceGrid(nodes=np.asarray(nodes), boundary_index=boundary_index)


def interp_linear(nodes, values, query):
    """Piecewise-linear interpolation; exact at nodes, errors outside the hull."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    q = np.asarray(query, dtype=float)
    lo, hi = nodes[0], nodes[-1]
    span = hi - lo
    tol = 1e-12 * max(span, 1.0)
    if np.any(q < lo - tol) or np.any(q > hi + tol):
        raise OutOfRangeError(f"query outside grid hull [{lo}, {hi}]")
    out = np.interp(np.clip(q, lo, hi), nodes, values)
    return float(out) if np.isscalar(query) or np.ndim(query) == 0 else out
