"""Strang split-step integration of ``i u_t - Lap u + c |u|^(p-1) u = 0``.

``c = +1`` is the defocusing equation studied throughout the package; ``c = -1``
is the focusing negative control and ``c = 0`` switches the nonlinearity off.
Solving for ``u_t`` gives the two exactly solvable sub-flows

    nonlinear:  u_t = i c |u|^(p-1) u   ->  u <- exp(i c |u|^(p-1) tau) u
    linear:     u_hat_t = i |k|^2 u_hat ->  u_hat <- exp(i |k|^2 tau) u_hat

The linear group is ``exp(-i t Lap)``; do not flip these phases to the
``i u_t + Lap u`` convention, the monotonicity signs downstream depend on it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from morawetz.grid import ComplexField, SpectralGrid, fftn, ifftn

log = logging.getLogger(__name__)

Observer = Callable[[ComplexField, float], "float | Mapping[str, float]"]


class NonFiniteStateError(FloatingPointError):
    """A step produced NaN or Inf; the run cannot continue."""


@dataclass(frozen=True)
class SolverConfig:
    p: float = 3.0
    dt: float = 1e-3
    t_final: float = 1.0
    observer_stride: int = 1
    coupling: float = 1.0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_final > 0 or self.dt > self.t_final * (1 + 1e-12):
            raise ValueError(f"need 0 < dt <= t_final, got dt={self.dt}, t_final={self.t_final}")
        if self.observer_stride < 1:
            raise ValueError("observer_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        steps = self.t_final / self.dt
        n = int(round(steps))
        if abs(steps - n) > 1e-8 * max(1.0, steps):
            raise ValueError(f"t_final={self.t_final} is not a multiple of dt={self.dt}")
        return n


@dataclass
class DiagnosticTrace:
    times: list[float] = field(default_factory=list)
    channels: dict[str, list[float]] = field(default_factory=dict)
    snapshots: dict[float, ComplexField] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    final_state: ComplexField | None = None
    aborted: bool = False
    abort_reason: str = ""

    def record(self, t: float, values: Mapping[str, float]) -> None:
        if self.times and t <= self.times[-1]:
            raise ValueError("trace times must be strictly increasing")
        if self.times and set(values) != set(self.channels):
            raise ValueError(
                f"channel set changed mid-run: {sorted(values)} vs {sorted(self.channels)}"
            )
        self.times.append(float(t))
        for name, v in values.items():
            self.channels.setdefault(name, []).append(float(v))

    def channel(self, name: str) -> np.ndarray:
        if name not in self.channels:
            raise KeyError(f"trace has no channel {name!r} (has {sorted(self.channels)})")
        return np.asarray(self.channels[name])

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.times)

    def __len__(self) -> int:
        return len(self.times)


class Stepper:
    """Strang stepper with the linear propagator cached for one ``(grid, dt)``."""

    def __init__(self, grid: SpectralGrid, dt: float, p: float, coupling: float = 1.0):
        self.grid = grid
        self.dt = dt
        self.p = p
        self.coupling = coupling
        self._propagator = np.exp(1j * grid.k_squared * dt)

    def _nonlinear(self, u: np.ndarray, tau: float) -> np.ndarray:
        if self.coupling == 0:
            return u
        return u * np.exp(1j * self.coupling * tau * np.abs(u) ** (self.p - 1))

    def step_values(self, u: np.ndarray) -> np.ndarray:
        half = 0.5 * self.dt
        u = self._nonlinear(u, half)
        u = ifftn(self._propagator * fftn(u))
        u = self._nonlinear(u, half)
        if not np.all(np.isfinite(u)):
            raise NonFiniteStateError("non-finite values after Strang step (blow-up or instability)")
        return u

    def step(self, state: ComplexField) -> ComplexField:
        return ComplexField(self.grid, self.step_values(state.values))


def strang_step(state: ComplexField, dt: float, p: float, coupling: float = 1.0) -> ComplexField:
    """One Strang step: half nonlinear phase, full linear flow, half nonlinear phase.

    ``dt`` may be negative; each sub-flow is exactly invertible.
    """
    if dt == 0:
        raise ValueError("dt must be non-zero")
    return Stepper(state.grid, dt, p, coupling).step(state)


def _observe(observers: Mapping[str, Observer], state: ComplexField, t: float) -> dict[str, float]:
    out: dict[str, float] = {}
    for name, fn in observers.items():
        value = fn(state, t)
        if isinstance(value, Mapping):
            out.update({k: float(v) for k, v in value.items()})
        else:
            out[name] = float(value)
    return out


def evolve(
    initial: ComplexField,
    config: SolverConfig,
    observers: Mapping[str, Observer] | None = None,
    store_snapshots: bool = False,
) -> DiagnosticTrace:
    """Integrate from t=0 to ``config.t_final``.

    Observers run at t=0, every ``observer_stride`` steps, and at the final step.
    A non-finite step stops the run; the partial trace comes back with
    ``aborted=True``.
    """
    observers = dict(observers or {})
    stepper = Stepper(initial.grid, config.dt, config.p, config.coupling)
    n_steps = config.n_steps
    trace = DiagnosticTrace(metadata={"dt": config.dt, "p": config.p, "coupling": config.coupling})

    state = initial
    trace.record(0.0, _observe(observers, state, 0.0))
    if store_snapshots:
        trace.snapshots[0.0] = state
    u = state.values
    for k in range(1, n_steps + 1):
        try:
            u = stepper.step_values(u)
        except NonFiniteStateError as exc:
            trace.aborted = True
            trace.abort_reason = f"step {k} (t={k * config.dt:.6g}): {exc}"
            log.warning("run aborted: %s", trace.abort_reason)
            break
        if k % config.observer_stride == 0 or k == n_steps:
            t = k * config.dt
            state = ComplexField(initial.grid, u)
            trace.record(t, _observe(observers, state, t))
            if store_snapshots:
                trace.snapshots[t] = state
    trace.final_state = ComplexField(initial.grid, u)
    return trace


def free_gaussian_reference(
    grid: SpectralGrid, t: float, width: float, center=None
) -> ComplexField:
    """Closed-form free evolution of ``exp(-|x-c|^2 / (2 width^2))`` under ``exp(-i t Lap)``."""
    if not width > 0:
        raise ValueError("width must be positive")
    sig2 = width**2 - 2j * t
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
    # Re(sig2) > 0, so the principal root is the continuous branch from t=0.
    amp = np.sqrt(width**2 / sig2) ** grid.dim
    return ComplexField(grid, amp * np.exp(-r2 / (2 * sig2)))


def gaussian(
    grid: SpectralGrid,
    amplitude: float = 1.0,
    width: float = 1.0,
    center=None,
    wavevector=None,
) -> ComplexField:
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    kv = np.zeros(grid.dim) if wavevector is None else np.asarray(wavevector, dtype=float)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
    phase = sum(ki * x for ki, x in zip(kv, grid.coords))
    return ComplexField(grid, amplitude * np.exp(-r2 / (2 * width**2)) * np.exp(1j * phase))


def random_band_limited(grid: SpectralGrid, seed: int, band: int, amplitude: float = 1.0) -> ComplexField:
    """Random trigonometric polynomial with integer modes ``|k_i| <= band``."""
    if band < 0 or band >= grid.n_points // 2:
        raise ValueError(f"band must be in [0, {grid.n_points // 2 - 1}]")
    rng = np.random.default_rng(seed)
    idx = np.fft.fftfreq(grid.n_points, d=1.0 / grid.n_points)
    mask = np.ones(grid.shape, dtype=bool)
    for m in np.meshgrid(*([idx] * grid.dim), indexing="ij"):
        mask &= np.abs(m) <= band
    spec = np.zeros(grid.shape, dtype=complex)
    n = int(mask.sum())
    spec[mask] = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    vals = ifftn(spec)
    peak = np.max(np.abs(vals))
    if peak > 0:
        vals = vals * (amplitude / peak)
    return ComplexField(grid, vals)
