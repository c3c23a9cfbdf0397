"""Interaction Morawetz actions for tensor products of one solution with itself.

For ``U = u(x_1) ... u(x_m)`` the tensor momentum in slot ``s`` is
``p(x_s) prod_{r != s} |u(x_r)|^2`` and ``M = -int P . X``. The three weights:

* pair (3-d): ``X`` depends on ``y - z`` only, so ``M = -4 int p . (rho * K)``
  with ``K(w) = w / sqrt(|w|^2 + eps^2)``; evaluated by zero-padded FFT
  convolution (linear, not periodic, differences).
* line diagonal (2-d): ``X`` also depends on the transverse coordinates, so
  the double sum over grid pairs is done directly.
* 1-d diagonal: direct four-fold sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft
from scipy import special

from morawetz import _kernels
from morawetz._config import fft_workers
from morawetz.evolve import DiagnosticTrace
from morawetz.fields import (
    Line2D,
    diag_1d_weight,
    line_diagonal_weight_2d,
    pair_weight_3d,
)
from morawetz.grid import ComplexField, SpectralGrid, interpolate, spectral_norm_sq, fftn, ifftn
from morawetz.laws import densities
from morawetz.reports import (
    EstimateReport,
    centered_rates,
    inequality,
    informational,
    monotonicity,
    trapezoid,
)

PAIR_BUDGET_N = 64
QUAD_BUDGET_N = 64

# Lower-bound constants for dM/dt >= c * I(t).
PAIR_CONSTANT = 16 * np.pi
LINE_CONSTANT = 2 * np.pi
# Exact constant from integrating 8 pi delta(z) along the lifted diagonal in R^4.
LINE_CONSTANT_SHARP = 4 * np.sqrt(2) * np.pi
DIAG_CONSTANT = 8 * np.pi


class BudgetError(ValueError):
    """Grid too large for a direct pairwise or four-fold sum."""


# ---------------------------------------------------------------------------
# 3-d pair weight


@lru_cache(maxsize=8)
def _pair_kernel_hat(grid: SpectralGrid, epsilon: float) -> np.ndarray:
    n, h = grid.n_points, grid.spacing
    m = np.arange(2 * n)
    off = np.where(m < n, m, m - 2 * n) * h
    off[n] = 0.0  # never reached by in-box differences
    w = np.meshgrid(off, off, off, indexing="ij")
    a = np.sqrt(w[0] ** 2 + w[1] ** 2 + w[2] ** 2 + epsilon**2)
    a[a == 0] = np.inf  # K(0) := 0 when eps == 0
    return np.stack([sfft.rfftn(wk / a, workers=fft_workers()) for wk in w])


def pair_convolutions(grid: SpectralGrid, rho: np.ndarray, epsilon: float) -> np.ndarray:
    """``(rho * K_k)(y) = int rho(z) K_k(y - z) dz`` for k = 0, 1, 2 on the grid."""
    n = grid.n_points
    khat = _pair_kernel_hat(grid, float(epsilon))
    rhat = sfft.rfftn(rho, s=(2 * n,) * 3, workers=fft_workers())
    out = sfft.irfftn(khat * rhat[None], s=(2 * n,) * 3, axes=(1, 2, 3), workers=fft_workers())
    return out[:, :n, :n, :n] * grid.cell_volume


def interaction_action_3d(field: ComplexField, epsilon: float) -> float:
    grid = field.grid
    if grid.dim != 3:
        raise ValueError("interaction_action_3d needs a 3-d field")
    dens = densities(field)
    conv = pair_convolutions(grid, dens.rho, epsilon)
    return float(-4 * np.sum(dens.momentum * conv) * grid.cell_volume)


def interaction_action_3d_bruteforce(field: ComplexField, epsilon: float) -> float:
    """Direct sum over all grid pairs of the 6-d tensor momentum against the pair weight."""
    grid = field.grid
    dens = densities(field)
    pts = grid.points.reshape(-1, 3)
    rho = dens.rho.reshape(-1)
    mom = dens.momentum.reshape(3, -1).T
    spec = pair_weight_3d(epsilon)
    total = 0.0
    for i in range(len(pts)):
        y = np.broadcast_to(pts[i], pts.shape)
        x6 = np.concatenate([y, pts], axis=1)
        same = np.all(pts == pts[i], axis=1)
        X = np.zeros((len(pts), 6))
        X[~same] = spec.vector(x6[~same]) if epsilon == 0 else spec.vector(x6)[~same]
        if epsilon > 0:
            X[same] = spec.vector(x6[same])
        # tensor momentum: (|u(z)|^2 p(y), |u(y)|^2 p(z))
        p6 = np.concatenate([2 * rho[:, None] * mom[i][None], 2 * rho[i] * mom], axis=1)
        total += np.sum(p6 * X)
    return float(-total * grid.cell_volume**2)


def pair_delta_term(field: ComplexField, epsilon: float) -> float:
    """``int int (-Lap div X)(y - z) rho_6`` for the regularized pair weight, in Fourier space.

    Uses the transform of ``60 eps^4 / a^7``:
    ``32 pi t K_1(t) + 16 pi t^2 K_0(t)`` with ``t = eps |k|``; tends to
    ``16 pi int |u|^4`` as eps -> 0.
    """
    grid = field.grid
    rho = 0.5 * np.abs(field.values) ** 2
    kk = np.sqrt(grid.k_squared) * epsilon
    with np.errstate(invalid="ignore", divide="ignore"):
        sym = 32 * np.pi * kk * special.k1(kk) + 16 * np.pi * kk**2 * special.k0(kk)
    sym = np.where(kk == 0, 32 * np.pi, np.nan_to_num(sym))
    return 2 * spectral_norm_sq(grid, fftn(rho), sym)


# ---------------------------------------------------------------------------
# 2-d line diagonal


def _line_frame(grid: SpectralGrid, line: Line2D):
    rel = grid.points - np.asarray(line.point, dtype=float)
    return rel @ line.direction, rel @ line.normal


def _check_pair_budget(grid: SpectralGrid, max_n: int) -> None:
    if grid.n_points > max_n:
        raise BudgetError(
            f"direct pairwise sum over {grid.n_points}^2 points exceeds the budget; "
            f"maximum supported n_points is {max_n}"
        )


def interaction_action_2d(field: ComplexField, line: Line2D, epsilon: float,
                          max_n: int = PAIR_BUDGET_N) -> float:
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("interaction_action_2d needs a 2-d field")
    _check_pair_budget(grid, max_n)
    _kernels.configure_threads()
    dens = densities(field)
    lam, tau = _line_frame(grid, line)
    alpha = np.tensordot(line.direction, dens.momentum, axes=(0, 0))
    beta = np.tensordot(line.normal, dens.momentum, axes=(0, 0))
    total = _kernels.line_pair_sum(
        lam.ravel(), tau.ravel(), dens.rho.ravel(), alpha.ravel(), beta.ravel(), float(epsilon) ** 2
    )
    return float(-4 * total * grid.cell_volume**2)


def interaction_action_2d_bruteforce(field: ComplexField, line: Line2D, epsilon: float) -> float:
    """Sum over every (x1, x2) grid quadruple of the 4-d tensor momentum against ``X``."""
    grid = field.grid
    dens = densities(field)
    spec = line_diagonal_weight_2d(line, epsilon)
    pts = grid.points.reshape(-1, 2)
    rho = dens.rho.reshape(-1)
    mom = dens.momentum.reshape(2, -1).T
    n = len(pts)
    x4 = np.concatenate([np.repeat(pts, n, axis=0), np.tile(pts, (n, 1))], axis=1)
    X = spec.vector(x4)
    i1 = np.repeat(np.arange(n), n)
    i2 = np.tile(np.arange(n), n)
    p4 = np.concatenate([(2 * rho[i2])[:, None] * mom[i1], (2 * rho[i1])[:, None] * mom[i2]], axis=1)
    return float(-np.sum(p4 * X) * grid.cell_volume**2)


# ---------------------------------------------------------------------------
# 1-d four-fold diagonal


def quadrilinear_action(fields, epsilon: float, max_n: int = QUAD_BUDGET_N) -> float:
    """Action of the tensor product of four 1-d fields against the diagonal weight."""
    fields = list(fields)
    if len(fields) != 4:
        raise ValueError("need exactly four fields")
    grid = fields[0].grid
    if grid.dim != 1 or any(f.grid != grid for f in fields):
        raise ValueError("fields must share one 1-d grid")
    if grid.n_points > max_n:
        raise BudgetError(
            f"four-fold sum over {grid.n_points}^4 points exceeds the budget; "
            f"maximum supported n_points is {max_n}"
        )
    _kernels.configure_threads()
    ds = [densities(f) for f in fields]
    mom = np.stack([d.momentum[0] for d in ds])
    dens = np.stack([2 * d.rho for d in ds])
    total = _kernels.quad_diag_sum(grid.x1d.copy(), mom, dens, float(epsilon) ** 2)
    return float(-total * grid.cell_volume**4)


def interaction_action_1d(field: ComplexField, epsilon: float, max_n: int = QUAD_BUDGET_N) -> float:
    return quadrilinear_action([field] * 4, epsilon, max_n)


def interaction_action_1d_bruteforce(field: ComplexField, epsilon: float) -> float:
    grid = field.grid
    dens = densities(field)
    x = grid.x1d
    n = len(x)
    idx = np.indices((n,) * 4).reshape(4, -1)
    pts = x[idx].T
    X = diag_1d_weight(epsilon).vector(pts)
    rho2 = (2 * dens.rho)[idx]
    mom = dens.momentum[0][idx]
    total = 0.0
    for s in range(4):
        others = np.prod(np.delete(rho2, s, axis=0), axis=0)
        total += np.sum(X[:, s] * mom[s] * others)
    return float(-total * grid.cell_volume**4)


# ---------------------------------------------------------------------------
# curve-restricted norms


@dataclass(frozen=True)
class Curve2D:
    samples: np.ndarray
    arclength_weights: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        w = np.asarray(self.arclength_weights, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or len(w) != len(s):
            raise ValueError("samples must be (n, 2) with one weight per sample")
        if np.any(w <= 0):
            raise ValueError("arclength weights must be positive")
        if len(s) > 1 and np.any(np.all(np.diff(s, axis=0) == 0, axis=1)):
            raise ValueError("consecutive samples must be distinct")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "arclength_weights", w)

    @classmethod
    def parametric(cls, position, speed, t0: float, t1: float, panels: int = 64, order: int = 8):
        """Composite Gauss-Legendre rule for ``int_C f dl`` with ``dl = speed(t) dt``."""
        nodes, weights = np.polynomial.legendre.leggauss(order)
        edges = np.linspace(t0, t1, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * np.diff(edges)
        t = (mid[:, None] + half[:, None] * nodes[None]).ravel()
        wt = (half[:, None] * weights[None]).ravel()
        pts = np.asarray(position(t), dtype=float)
        return cls(pts, wt * np.asarray(speed(t), dtype=float))

    @classmethod
    def segment(cls, start, end, panels: int = 64, order: int = 8):
        a = np.asarray(start, dtype=float)
        b = np.asarray(end, dtype=float)
        length = float(np.linalg.norm(b - a))
        return cls.parametric(
            lambda t: a[None] + t[:, None] * (b - a)[None],
            lambda t: np.full_like(t, length), 0.0, 1.0, panels, order,
        )

    @classmethod
    def along_line(cls, line: Line2D, half_length: float, panels: int = 64, order: int = 8):
        p = np.asarray(line.point, dtype=float)
        w = line.direction
        return cls.segment(p - half_length * w, p + half_length * w, panels, order)


def line_restricted_l4(field: ComplexField, curve: Curve2D) -> float:
    """``int_C |u(x(l))|^4 dl`` with exact trigonometric interpolation of ``u``."""
    if field.grid.dim != 2:
        raise ValueError("curve norms need a 2-d field")
    vals = interpolate(field, curve.samples)
    return float(np.sum(np.abs(vals) ** 4 * curve.arclength_weights))


def default_line_curve(grid: SpectralGrid, line: Line2D) -> Curve2D:
    """The line clipped to half-length L/2 about its base point, ~2 nodes per grid cell."""
    panels = max(8, grid.n_points // 4)
    return Curve2D.along_line(line, grid.box_length / 2, panels=panels, order=8)


def angular_average_weighted_l4(field: ComplexField, center, n_theta: int, epsilon: float,
                                radius: float | None = None, panels: int | None = None) -> float:
    """Average of full-line integrals ``(pi / n) sum_i int_{L_i} |u|^4 r / sqrt(r^2 + eps^2) dl``.

    ``L_i`` are ``n_theta`` full lines through ``c`` at angles ``pi i / n_theta``
    (clipped to ``|l| <= radius``). As ``n_theta -> inf`` this converges to
    ``int |u|^4 / sqrt(|x - c|^2 + eps^2) dx``; ``eps = 0`` gives the plain
    line integrals.
    """
    if n_theta < 2:
        raise ValueError("n_theta must be >= 2")
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("angular averages need a 2-d field")
    c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    R = grid.box_length / 2 if radius is None else radius
    nseg = panels or max(8, grid.n_points // 2)
    nodes, weights = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, R, nseg + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    r = (mid[:, None] + half[:, None] * nodes[None]).ravel()
    wr = (half[:, None] * weights[None]).ravel() * r / np.sqrt(r**2 + epsilon**2)
    # Each full line is two opposite rays.
    theta = np.pi * np.arange(2 * n_theta) / n_theta
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    pts = c[None, None] + r[None, :, None] * dirs[:, None, :]
    vals = np.abs(interpolate(field, pts)) ** 4
    return float(np.sum(vals * wr[None]) * np.pi / n_theta)


# Analytic continuation of sum_{m in Z^2, m != 0} 1/|m|, equal to 4 zeta(1/2) beta(1/2).
LATTICE_ZETA_2D = -3.9002649200019558


def direct_weighted_l4(field: ComplexField, center=None, refine: int = 2) -> float:
    """``int |u|^4 / |x - c| dx`` by a lattice sum centred on ``c`` with a zeta correction.

    The lattice ``c + (h / refine) Z^2`` skips the singular node; the missing
    part is restored to ``O(h^3)`` by ``- h' |u(c)|^4 zeta_Z2(1)``.
    """
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("direct_weighted_l4 needs a 2-d field")
    if refine < 1:
        raise ValueError("refine must be >= 1")
    c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    hr = grid.spacing / refine
    m = np.arange(grid.n_points * refine) - grid.n_points * refine // 2
    mi, mj = np.meshgrid(m, m, indexing="ij")
    pts = c + hr * np.stack([mi, mj], axis=-1)
    f = np.abs(interpolate(field, pts)) ** 4
    r = np.hypot(mi, mj)
    origin = r == 0
    r[origin] = 1.0
    lattice = hr * np.sum(np.where(origin, 0.0, f / r))
    return float(lattice - hr * f[origin].sum() * LATTICE_ZETA_2D)


# ---------------------------------------------------------------------------
# trace checks


_KINDS = {
    "pair3d": ("M_pair", "l4", PAIR_CONSTANT, "pointwise-16pi"),
    "line2d": ("M_line", "line_l4", LINE_CONSTANT, "pointwise-2pi"),
    "diag1d": ("M_diag", "l8", DIAG_CONSTANT, "pointwise-8pi"),
}


def monotonicity_and_ftc_check(trace: DiagnosticTrace, kind: str, tol_rel: float = 0.02,
                               constant: float | None = None, pointwise_name: str | None = None,
                               include_ratio: bool = True) -> list[EstimateReport]:
    """Monotonicity, per-stride lower bound ``dM/dt >= c I`` and its time-integrated form.

    With ``include_ratio`` an informational :func:`estimate_ratio` report is appended.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}")
    m_name, i_name, c_default, pw_name = _KINDS[kind]
    c = c_default if constant is None else constant
    pw_name = pointwise_name or pw_name
    t = trace.t
    M = trace.channel(m_name)
    I = trace.channel(i_name)
    ctx = {"kind": kind, **trace.metadata}
    m_max = float(np.max(np.abs(M))) if len(M) else 0.0

    reports = [monotonicity("monotonicity", t, M, 1e-6 * m_max, ctx)]

    if len(t) >= 3:
        rate = centered_rates(t, M)
        bound = c * I[1:-1]
        slack = bound - rate - tol_rel * np.abs(rate)
        k = int(np.argmax(slack))
        reports.append(inequality(pw_name, bound[k], rate[k], tol_rel, c,
                                  {**ctx, "t": float(t[k + 1]), "strides": len(rate)}))
    else:
        reports.append(inequality(pw_name, 0.0, 0.0, tol_rel, c, ctx))

    lhs = c * trapezoid(t, I)
    rhs = float(M[-1] - M[0]) if len(M) else 0.0
    reports.append(inequality("ftc", lhs, rhs, 0.0, c, {**ctx, "gap": rhs - lhs}, atol=tol_rel * m_max))
    if include_ratio:
        reports.append(estimate_ratio(trace, kind))

    return reports


def estimate_ratio(trace: DiagnosticTrace, kind: str) -> EstimateReport:
    """Measured ratio of the space-time bound to its a priori right-hand side.

    ``sup|M| / sup(||u||_2^2 ||u||_{H^1/2}^2)`` for the pair and line weights,
    ``int int |u|^8 / sup(||u||_2^7 ||u||_{H^1})`` for the 1-d diagonal.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}")
    t = trace.t
    ctx = {"kind": kind, **trace.metadata}
    if not len(t):
        return informational("momentum-ratio", 0.0, 0.0, 1.0, ctx)
    if kind == "diag1d":
        scale = float(np.max(trace.channel("mass") ** 3.5 * trace.channel("h1")))
        return informational("l8-ratio", trapezoid(t, trace.channel("l8")), scale, 1.0, ctx)
    m_max = float(np.max(np.abs(trace.channel(_KINDS[kind][0]))))
    scale = float(np.max(trace.channel("mass") * trace.channel("hhalf_sq")))
    return informational("momentum-ratio", m_max, scale, 1.0, ctx)


def theorem1_ratio(trace: DiagnosticTrace) -> EstimateReport:
    """``int int |u|^4 / |x - x0|`` over ``sup_t ||u||_2^2 ||u||_{H^1/2}^2``."""
    t = trace.t
    lhs = trapezoid(t, trace.channel("weighted_l4"))
    scale = float(np.max(trace.channel("mass") * trace.channel("hhalf_sq"))) if len(t) else 0.0
    return informational("theorem1-ratio", lhs, scale, 1.0, dict(trace.metadata))


# ---------------------------------------------------------------------------
# explicit 4-d tensor law


def tensor_pressure(rho1, rho2):
    """``Phi = 4 rho1 rho2 (rho1 + rho2)``: the sum of the two block pressures below."""
    return 4 * rho1 * rho2 * (rho1 + rho2)


def block_pressures(rho1, rho2):
    """Pressures of the cubic tensor law in the ``x1`` and ``x2`` blocks.

    ``d_t p_k`` picks up ``d_k(4 rho1^2 rho2)`` for ``k`` in the first factor and
    ``d_k(4 rho1 rho2^2)`` in the second; their sum is :func:`tensor_pressure`.
    """
    return 4 * rho1**2 * rho2, 4 * rho1 * rho2**2


def tensor_residual_check_4d(fields1, fields2, dt: float, line: Line2D | None = None,
                             epsilon: float = 1.0, coupling: float = 1.0,
                             pressure: str = "block", max_n: int = 24) -> float:
    """L2 residual of the contracted momentum law for ``U = u1(x1) u2(x2)`` on ``R^4``.

    ``fields1``/``fields2`` are three consecutive snapshots (spacing ``dt``) of
    two cubic solutions. The residual compares the central difference of
    ``X . P`` with ``d_j{X^k T_jk} - (d_j X^k) T_jk`` where ``T`` is the full
    flux tensor. ``pressure="printed"`` swaps the block pressures for the
    isotropic ``Phi`` (kept to show that form does not close).
    """
    f1, f2 = list(fields1), list(fields2)
    grid = f1[0].grid
    if grid.dim != 2 or len(f1) != 3 or len(f2) != 3:
        raise ValueError("need three 2-d snapshots of each factor")
    if grid.n_points > max_n:
        raise BudgetError(f"explicit 4-d tensor needs n_points <= {max_n}, got {grid.n_points}")
    if pressure not in ("block", "printed"):
        raise ValueError("pressure must be 'block' or 'printed'")
    line = line or Line2D()
    n = grid.n_points
    spec = line_diagonal_weight_2d(line, epsilon)
    k1 = grid.derivative_wavenumbers
    kf = grid.wavenumbers
    axes = range(4)

    def kvec(ax, k):
        shape = [1, 1, 1, 1]
        shape[ax] = n
        return k.reshape(shape)

    def d(arr, ax):
        return np.fft.ifftn(np.fft.fftn(arr) * (1j * kvec(ax, k1)))

    def dreal(arr, ax):
        return d(arr, ax).real

    def lap(arr):
        spec_ = np.fft.fftn(arr)
        return np.fft.ifftn(spec_ * -sum(kvec(ax, kf) ** 2 for ax in axes)).real

    def tensor(a, b):
        return a.values[:, :, None, None] * b.values[None, None, :, :]

    def mom(U):
        return np.stack([np.imag(np.conj(U) * d(U, ax)) for ax in axes])

    pts = np.stack(np.meshgrid(*([grid.x1d] * 4), indexing="ij"), axis=-1)
    X = np.moveaxis(spec.vector(pts), -1, 0)
    jac = np.moveaxis(spec.jacobian(pts), (-2, -1), (0, 1))

    U = [tensor(a, b) for a, b in zip(f1, f2)]
    lhs = (np.sum(X * mom(U[2]), axis=0) - np.sum(X * mom(U[0]), axis=0)) / (2 * dt)

    Um = U[1]
    dU = np.stack([d(Um, ax) for ax in axes])
    rho = 0.5 * np.abs(Um) ** 2
    sigma = 2 * np.real(dU[:, None] * np.conj(dU)[None, :])
    rho1 = 0.5 * np.abs(f1[1].values)[:, :, None, None] ** 2
    rho2 = 0.5 * np.abs(f2[1].values)[None, None, :, :] ** 2
    rho1 = np.broadcast_to(rho1, rho.shape)
    rho2 = np.broadcast_to(rho2, rho.shape)
    if pressure == "block":
        pa, pb = block_pressures(rho1, rho2)
        press = [pa, pa, pb, pb]
    else:
        phi = tensor_pressure(rho1, rho2)
        press = [phi] * 4

    flux = sigma.copy()
    lr = lap(rho)
    for k in axes:
        flux[k, k] += coupling * press[k] - lr
    # X is not periodic, so d_j(X^k T_jk) uses the analytic grad X and the
    # spectral divergence of the (decaying, periodic) flux.
    div_flux = np.stack([sum(dreal(flux[j, k], j) for j in axes) for k in axes])
    transport = np.einsum("jk...,jk...->...", jac, flux) + np.sum(X * div_flux, axis=0)
    rhs = transport - np.einsum("jk...,jk...->...", jac, flux)
    res = lhs - rhs
    return float(np.sqrt(np.sum(res**2) * grid.cell_volume**2))
