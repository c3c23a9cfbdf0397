"""Mass/momentum/stress densities, conserved integrals and local-law residuals.

Densities follow ``rho = |u|^2 / 2``, ``p_k = Im(conj(u) d_k u)`` and
``sigma_jk = 2 Re(d_j u conj(d_k u))``. For the equation in :mod:`morawetz.evolve`
the local laws are

    d_t rho = div p
    d_t p_k = d_j ( delta_jk (c G(rho) - Lap rho) + sigma_jk )

with ``G`` the nonlinear pressure (``2 rho^2`` for the cubic case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from morawetz.grid import (
    ComplexField,
    SpectralGrid,
    gradient,
    integrate,
    real_gradient,
    real_laplacian,
    spectral_norm_sq,
)


@dataclass(frozen=True)
class FieldDensities:
    grid: SpectralGrid
    rho: np.ndarray
    momentum: np.ndarray  # (dim, *shape)
    sigma: np.ndarray  # (dim, dim, *shape)
    grad_u: np.ndarray  # (dim, *shape), complex


def densities(field: ComplexField) -> FieldDensities:
    u = field.values
    du = np.stack(gradient(field))
    rho = 0.5 * np.abs(u) ** 2
    mom = np.imag(np.conj(u)[None] * du)
    sigma = 2 * np.real(du[:, None] * np.conj(du)[None, :])
    return FieldDensities(field.grid, rho, mom, sigma, du)


def madelung_residual(dens: FieldDensities, floor: float = 1e-6) -> float:
    """Max pointwise relative Frobenius residual of ``sigma = (p p + grad rho grad rho) / rho``.

    Only points with ``rho > floor * max(rho)`` are checked; ``grad rho`` is the
    spectral derivative of ``rho`` itself, not ``Re(conj(u) grad u)``.
    """
    rho = dens.rho
    if rho.max() == 0:
        return 0.0
    mask = rho > floor * rho.max()
    grho = np.stack(real_gradient(dens.grid, rho))
    p = dens.momentum
    mad = (p[:, None] * p[None, :] + grho[:, None] * grho[None, :])[:, :, mask] / rho[mask]
    sig = dens.sigma[:, :, mask]
    num = np.sqrt(np.sum((sig - mad) ** 2, axis=(0, 1)))
    den = np.sqrt(np.sum(sig**2, axis=(0, 1))) + np.sqrt(np.sum(mad**2, axis=(0, 1)))
    scale = np.where(den > 0, den, 1.0)
    return float(np.max(num / scale))


def nonlinear_pressure(rho, p: float):
    """``2^((p+1)/2) (p-1)/(p+1) rho^((p+1)/2)``; reduces to ``2 rho^2`` for p=3."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    return 2 ** ((p + 1) / 2) * (p - 1) / (p + 1) * rho ** ((p + 1) / 2)


@dataclass(frozen=True)
class ConservedIntegrals:
    mass: float
    energy: float
    momentum: np.ndarray


def conserved_integrals(field: ComplexField, p: float, coupling: float = 1.0) -> ConservedIntegrals:
    grid = field.grid
    u = field.values
    spec = field.spectrum
    mass = integrate(grid, np.abs(u) ** 2)
    kinetic = 0.5 * spectral_norm_sq(grid, spec, grid.k_squared_gradient)
    potential = coupling / (p + 1) * integrate(grid, np.abs(u) ** (p + 1)) if coupling else 0.0
    mom = np.array([
        spectral_norm_sq(grid, spec, grid.broadcast_axis(grid.derivative_wavenumbers, ax))
        for ax in range(grid.dim)
    ])
    return ConservedIntegrals(mass, kinetic + potential, mom)


def momentum_flux(dens: FieldDensities, p: float, coupling: float = 1.0) -> np.ndarray:
    """Flux tensor ``T_jk = delta_jk (c G(rho) - Lap rho) + sigma_jk`` of the momentum law."""
    grid = dens.grid
    iso = -real_laplacian(grid, dens.rho)
    if coupling:
        iso = iso + coupling * nonlinear_pressure(dens.rho, p)
    flux = dens.sigma.copy()
    for j in range(grid.dim):
        flux[j, j] += iso
    return flux


def divergence(grid: SpectralGrid, vec: np.ndarray) -> np.ndarray:
    return sum(real_gradient(grid, vec[j])[j] for j in range(grid.dim))


@dataclass(frozen=True)
class LawResiduals:
    mass_residual: float
    momentum_residual: float


def conservation_residuals(
    snapshots, dt: float, p: float, coupling: float = 1.0
) -> LawResiduals:
    """L2 norms of the local-law residuals at the middle of three snapshots spaced by ``dt``.

    Time derivatives are central differences of the stored states; the spatial
    side is evaluated on the middle snapshot with spectral derivatives.
    """
    prev, mid, nxt = snapshots
    grid = mid.grid
    d_prev, d_mid, d_next = densities(prev), densities(mid), densities(nxt)

    drho = (d_next.rho - d_prev.rho) / (2 * dt)
    mass_res = drho - divergence(grid, d_mid.momentum)

    dp = (d_next.momentum - d_prev.momentum) / (2 * dt)
    flux = momentum_flux(d_mid, p, coupling)
    mom_res = np.stack([
        dp[k] - divergence(grid, flux[:, k]) for k in range(grid.dim)
    ])
    return LawResiduals(
        float(np.sqrt(integrate(grid, mass_res**2))),
        float(np.sqrt(integrate(grid, np.sum(mom_res**2, axis=0)))),
    )
