"""Analytic benchmark problems, measurement synthesis, and noise generation.

Each benchmark fixes a(x,t)=1, b(x,t)=0, gamma=1, chi=0, c(x,t)=x+t and
provides a closed-form temperature u(x,t), free boundary s(t) and flux g(t).
The source term f is derived by hand from f = u_xx + c*u - u_t so that the
given u is the exact solution; a finite-difference residual test in the suite
guards the derivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import InvalidConfigError, StefanInverseError
from .grid import SpaceGrid, TimeGrid

Fn2 = Callable[[np.ndarray, np.ndarray], np.ndarray]
Fn1 = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BenchmarkModel:
    """Coefficients, boundary data, and analytic truth of one benchmark."""

    name: str
    T: float
    s0: float
    a: Fn2
    b: Fn2
    c: Fn2
    f: Fn2
    gamma: Fn2
    chi: Fn2
    gamma_t: Fn2
    chi_x: Fn2
    phi: Fn1
    s_true: Fn1
    g_true: Fn1
    u_true: Fn2


@dataclass(frozen=True)
class Measurements:
    """Final-time profile w on the grid x_w, boundary temperature mu on the
    time nodes, final boundary position s_star, and optional extra boundary
    samples (t_i, s_i)."""

    x_w: np.ndarray
    w: np.ndarray
    t_nodes: np.ndarray
    mu: np.ndarray
    s_star: float
    aux_boundary: Optional[Sequence[tuple[float, float]]] = None

    def __post_init__(self):
        if self.x_w.shape != self.w.shape or self.t_nodes.shape != self.mu.shape:
            raise InvalidConfigError("measurement arrays do not match their grids")
        if self.s_star <= 0.0:
            raise InvalidConfigError("final boundary position must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise level (percent), number of auxiliary samples, RNG seed."""

    eta_percent: float
    M: int
    seed: int = 0

    def __post_init__(self):
        if self.eta_percent < 0.0:
            raise InvalidConfigError("noise level must be >= 0")
        if self.M < 1:
            raise InvalidConfigError("need at least one auxiliary sample")


def _ones(x, t):
    return 1.0 + 0.0 * (x + t)


def _zeros(x, t):
    return 0.0 * (x + t)


def model1() -> BenchmarkModel:
    """s(t) = t + e^t, monotone boundary; u quadratic in x."""

    def u(x, t):
        return -(1.0 + np.exp(t)) * (x * (t + np.exp(t) + 1.0) - 0.5 * x * x)

    def u_t(x, t):
        et = np.exp(t)
        return -et * (x * (t + et + 1.0) - 0.5 * x * x) - (1.0 + et) * x * (1.0 + et)

    def f(x, t):
        return (1.0 + np.exp(t)) + (x + t) * u(x, t) - u_t(x, t)

    return BenchmarkModel(
        name="model1",
        T=1.0,
        s0=1.0,
        a=_ones,
        b=_zeros,
        c=lambda x, t: x + t,
        f=f,
        gamma=_ones,
        chi=_zeros,
        gamma_t=_zeros,
        chi_x=_zeros,
        phi=lambda x: x * x - 4.0 * x,
        s_true=lambda t: t + np.exp(t),
        g_true=lambda t: -(1.0 + np.exp(t)) * (t + np.exp(t) + 1.0),
        u_true=u,
    )


def model2() -> BenchmarkModel:
    """s(t) = cos(2t) + t, non-monotone boundary."""

    def gt(t):
        return -np.cos(2.0 * t) - t + 2.0 * np.sin(2.0 * t) - 1.0

    def u(x, t):
        return 0.5 * x * x + x * gt(t) + t

    def u_t(x, t):
        return x * (2.0 * np.sin(2.0 * t) - 1.0 + 4.0 * np.cos(2.0 * t)) + 1.0

    def f(x, t):
        return 1.0 + (x + t) * u(x, t) - u_t(x, t)

    return BenchmarkModel(
        name="model2",
        T=1.0,
        s0=1.0,
        a=_ones,
        b=_zeros,
        c=lambda x, t: x + t,
        f=f,
        gamma=_ones,
        chi=_zeros,
        gamma_t=_zeros,
        chi_x=_zeros,
        phi=lambda x: 0.5 * x * x - 2.0 * x,
        s_true=lambda t: np.cos(2.0 * t) + t,
        g_true=gt,
        u_true=u,
    )


def model3() -> BenchmarkModel:
    """s(t) = cos(5*pi*t/2)/2 + t + 1/2, oscillatory boundary."""

    w1 = 2.5 * np.pi  # 5*pi/2

    def u(x, t):
        return (
            (5.0 * np.pi / 8.0) * x * x * np.sin(w1 * t)
            - (5.0 * np.pi / 16.0) * x * np.sin(5.0 * np.pi * t)
            - (5.0 * np.pi / 4.0) * (t - 0.5) * x * np.sin(w1 * t)
            - 0.5 * x * x
            + 0.5 * x * np.cos(w1 * t)
            + t * x
            - 0.5 * x
        )

    def u_t(x, t):
        return (
            (5.0 * np.pi / 8.0) * x * x * w1 * np.cos(w1 * t)
            - (5.0 * np.pi / 16.0) * x * 5.0 * np.pi * np.cos(5.0 * np.pi * t)
            - (5.0 * np.pi / 4.0) * x * (np.sin(w1 * t) + (t - 0.5) * w1 * np.cos(w1 * t))
            - 0.5 * x * w1 * np.sin(w1 * t)
            + x
        )

    def u_xx(x, t):
        return (5.0 * np.pi / 4.0) * np.sin(w1 * t) - 1.0 + 0.0 * x

    def f(x, t):
        return u_xx(x, t) + (x + t) * u(x, t) - u_t(x, t)

    def gt(t):
        return (
            -(5.0 * np.pi / 16.0) * np.sin(5.0 * np.pi * t)
            - (5.0 * np.pi / 4.0) * (t - 0.5) * np.sin(w1 * t)
            + 0.5 * np.cos(w1 * t)
            + t
            - 0.5
        )

    return BenchmarkModel(
        name="model3",
        T=1.0,
        s0=1.0,
        a=_ones,
        b=_zeros,
        c=lambda x, t: x + t,
        f=f,
        gamma=_ones,
        chi=_zeros,
        gamma_t=_zeros,
        chi_x=_zeros,
        phi=lambda x: -0.5 * x * x,
        s_true=lambda t: 0.5 * np.cos(w1 * t) + t + 0.5,
        g_true=gt,
        u_true=u,
    )


_MODELS = {1: model1, 2: model2, 3: model3}


def get_model(number: int) -> BenchmarkModel:
    try:
        return _MODELS[int(number)]()
    except KeyError:
        raise InvalidConfigError(f"unknown model number {number}; choose 1, 2 or 3") from None


def synthesize_measurements(
    model: BenchmarkModel, tg: TimeGrid, sg: SpaceGrid, mode: str = "solver"
) -> Measurements:
    """Generate the measurement set (w, mu, s_star) on the supplied grids.

    "solver" mode runs the forward solver at the true controls so the data
    carry the same discretization as the inversion; "analytic" mode samples
    the closed-form temperature directly.
    """
    t = tg.nodes
    m_final = int(sg.boundary_index[-1])
    x_final = sg.nodes[: m_final + 1]
    s_star = float(model.s_true(tg.T))
    if mode == "analytic":
        w = model.u_true(x_final, tg.T * np.ones_like(x_final))
        mu = model.u_true(model.s_true(t), t)
    elif mode == "solver":
        from .forward import solve_forward_on_grid
        from .functional import Control

        v = Control(s=model.s_true(t), g=model.g_true(t), s0=model.s0)
        state = solve_forward_on_grid(v, model, tg, sg)
        w = state.values[-1, : m_final + 1].copy()
        mu = state.boundary_values()
    else:
        raise InvalidConfigError(f"unknown synthesis mode {mode!r}")
    return Measurements(
        x_w=np.array(x_final, dtype=float),
        w=np.asarray(w, dtype=float),
        t_nodes=np.array(t, dtype=float),
        mu=np.asarray(mu, dtype=float),
        s_star=s_star,
    )


def add_noise(s_values, spec: NoiseSpec) -> np.ndarray:
    """Contaminate boundary samples with i.i.d. Gaussian noise of standard
    deviation mean(s) * eta/100; the same seed reuses the same standard-normal
    draws, so changing eta only rescales the realization."""
    s = np.asarray(s_values, dtype=float)
    if s.size != spec.M:
        raise InvalidConfigError(f"expected {spec.M} samples, got {s.size}")
    delta = float(np.mean(s)) * spec.eta_percent / 100.0
    z = np.random.default_rng(spec.seed).standard_normal(spec.M)
    return s + delta * z


def aux_measurement_times(T: float, M: int) -> np.ndarray:
    """Auxiliary measurement instants t_i = i*T/M, i = 1..M (t_M = T)."""
    return np.arange(1, M + 1) * (T / M)


def make_aux_measurements(model: BenchmarkModel, spec: NoiseSpec) -> list[tuple[float, float]]:
    """Sample the true boundary at M uniform instants and add noise."""
    t_i = aux_measurement_times(model.T, spec.M)
    noisy = add_noise(model.s_true(t_i), spec)
    return list(zip(t_i.tolist(), noisy.tolist()))


def piecewise_guess(samples, tg: TimeGrid, s0: float | None = None) -> np.ndarray:
    """Piecewise-linear interpolant of boundary samples, on the time grid.

    The t=0 anchor is the known initial position: if no sample sits at t=0
    one is prepended from ``s0`` (noise-free, since s(0) is a hard
    constraint).
    """
    pts = sorted((float(t), float(v)) for t, v in samples)
    if not pts:
        raise InvalidConfigError("empty sample list")
    if pts[0][0] > 0.0:
        if s0 is None:
            raise InvalidConfigError("samples lack a t=0 value and no s0 was given")
        pts.insert(0, (0.0, float(s0)))
    t_s = np.array([p[0] for p in pts])
    v_s = np.array([p[1] for p in pts])
    if np.any(np.diff(t_s) <= 0.0):
        raise InvalidConfigError("sample times must be distinct")
    if t_s[0] < 0.0 or t_s[-1] > tg.T + 1e-12:
        raise InvalidConfigError("sample times must lie within [0, T]")
    return np.interp(tg.nodes, t_s, v_s)


def regular_guess(model: BenchmarkModel, tg: TimeGrid, s_star: float | None = None):
    """Regular initial control: a line segment from (0, s0) to (T, s(T)) for
    the boundary and the nodal mean of the true flux as a constant for g."""
    from .functional import Control

    if s_star is None:
        s_star = float(model.s_true(tg.T))
    s = model.s0 + (s_star - model.s0) * tg.nodes / tg.T
    g_mean = float(np.mean(model.g_true(tg.nodes)))
    g = np.full(tg.n + 1, g_mean)
    return Control(s=s, g=g, s0=model.s0)


def measurements_to_csv(meas: Measurements, prefix: str) -> None:
    """Write w, mu, and scalar measurements as CSV files <prefix>_{w,mu,scalars}.csv."""
    from .csvio import write_csv

    write_csv(f"{prefix}_w.csv", ["x", "value"], zip(meas.x_w, meas.w))
    write_csv(f"{prefix}_mu.csv", ["t", "value"], zip(meas.t_nodes, meas.mu))
    rows = [("s_star", meas.s_star)]
    if meas.aux_boundary:
        rows += [(f"aux_{i}_t", t) for i, (t, _) in enumerate(meas.aux_boundary)]
        rows += [(f"aux_{i}_s", v) for i, (_, v) in enumerate(meas.aux_boundary)]
    write_csv(f"{prefix}_scalars.csv", ["name", "value"], rows)


def measurements_from_csv(prefix: str) -> Measurements:
    """Read a measurement set written by :func:`measurements_to_csv`."""
    import csv

    def read_pairs(path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            return [(row[0], row[1]) for row in reader]

    w_rows = read_pairs(f"{prefix}_w.csv")
    mu_rows = read_pairs(f"{prefix}_mu.csv")
    scal = dict(read_pairs(f"{prefix}_scalars.csv"))
    aux_t = sorted(k for k in scal if k.startswith("aux_") and k.endswith("_t"))
    aux = None
    if aux_t:
        aux = [
            (float(scal[k]), float(scal[k.replace("_t", "_s")])) for k in aux_t
        ]
    return Measurements(
        x_w=np.array([float(a) for a, _ in w_rows]),
        w=np.array([float(b) for _, b in w_rows]),
        t_nodes=np.array([float(a) for a, _ in mu_rows]),
        mu=np.array([float(b) for _, b in mu_rows]),
        s_star=float(scal["s_star"]),
        aux_boundary=aux,
    )
