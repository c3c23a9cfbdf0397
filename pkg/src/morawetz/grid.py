"""Periodic spectral grids and Fourier calculus.

The box is ``[-L/2, L/2)^dim`` sampled at ``n_points`` per axis. Transforms use
numpy's convention everywhere in the package: the forward DFT is unnormalized
and the inverse carries ``1/N^dim``. With that convention

    sum |u_j|^2 = N^-dim * sum |u_hat_k|^2        (Parseval)

and a continuum integral is ``h^dim * sum_j f_j``. Every norm in the package
goes through :func:`integrate` or :func:`spectral_norm_sq` so the volume factor
lives in exactly one place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.fft as sfft

from morawetz._config import fft_workers

MAX_GRID_POINTS = 2**24


class GridError(ValueError):
    """Raised for invalid grid parameters or mismatched grids."""


@dataclass(frozen=True)
class SpectralGrid:
    dim: int
    n_points: int
    box_length: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n_points < 8 or self.n_points % 2:
            raise GridError(f"n_points must be even and >= 8, got {self.n_points}")
        if not self.box_length > 0:
            raise GridError(f"box_length must be positive, got {self.box_length}")
        if self.n_points**self.dim > MAX_GRID_POINTS:
            raise GridError(
                f"{self.n_points}^{self.dim} points exceeds the budget of {MAX_GRID_POINTS}"
            )

    @property
    def spacing(self) -> float:
        return self.box_length / self.n_points

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_points,) * self.dim

    @property
    def size(self) -> int:
        return self.n_points**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @cached_property
    def x1d(self) -> np.ndarray:
        return -0.5 * self.box_length + self.spacing * np.arange(self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Per-axis wavenumbers ``2*pi*k/L`` in FFT order (k = 0..N/2-1, -N/2..-1)."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=1.0 / self.n_points) / self.box_length

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.x1d] * self.dim), indexing="ij"))

    @cached_property
    def points(self) -> np.ndarray:
        """Grid coordinates as an array of shape ``shape + (dim,)``."""
        return np.stack(self.coords, axis=-1)

    @cached_property
    def kvec(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.wavenumbers] * self.dim), indexing="ij"))

    @cached_property
    def k_squared(self) -> np.ndarray:
        return sum(k**2 for k in self.kvec)

    @cached_property
    def derivative_wavenumbers(self) -> np.ndarray:
        # Nyquist mode dropped for odd derivatives so real fields stay real.
        k = self.wavenumbers.copy()
        k[self.n_points // 2] = 0.0
        return k

    @cached_property
    def k_squared_gradient(self) -> np.ndarray:
        """``sum_axis k_axis^2`` with the Nyquist mode dropped; the symbol of ``|grad|^2``."""
        kd = self.derivative_wavenumbers
        return sum(k**2 for k in np.meshgrid(*([kd] * self.dim), indexing="ij"))

    def broadcast_axis(self, values: np.ndarray, axis: int) -> np.ndarray:
        shape = [1] * self.dim
        shape[axis] = self.n_points
        return values.reshape(shape)


def make_grid(dim: int, n_points: int, box_length: float) -> SpectralGrid:
    return SpectralGrid(int(dim), int(n_points), float(box_length))


@dataclass(frozen=True)
class ComplexField:
    """A complex field on a grid; ``space`` says whether values are samples or DFT coefficients."""

    grid: SpectralGrid
    values: np.ndarray
    space: Literal["physical", "spectral"] = "physical"
    _spectrum: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            raise GridError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @cached_property
    def spectrum(self) -> np.ndarray:
        if self.space != "physical":
            raise GridError("spectrum requested from a field already in spectral space")
        if self._spectrum is not None:
            return self._spectrum
        out = fftn(self.values)
        out.setflags(write=False)
        return out

    @classmethod
    def from_spectrum(cls, grid: SpectralGrid, spectrum: np.ndarray) -> ComplexField:
        spectrum = np.asarray(spectrum, dtype=complex)
        return cls(grid, ifftn(spectrum), _spectrum=spectrum)

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> ComplexField:
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def __mul__(self, other):
        return ComplexField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __add__(self, other: ComplexField) -> ComplexField:
        _same_grid(self, other)
        return ComplexField(self.grid, self.values + other.values)


def _same_grid(a: ComplexField, b: ComplexField) -> None:
    if a.grid != b.grid:
        raise GridError("fields live on different grids")


def fftn(values: np.ndarray) -> np.ndarray:
    return sfft.fftn(values, workers=fft_workers())


def ifftn(values: np.ndarray) -> np.ndarray:
    return sfft.ifftn(values, workers=fft_workers())


def transform(field: ComplexField, direction: Literal["forward", "inverse"]) -> ComplexField:
    if direction == "forward":
        if field.space != "physical":
            raise GridError("forward transform expects a physical-space field")
        return ComplexField(field.grid, field.spectrum, space="spectral")
    if direction == "inverse":
        if field.space != "spectral":
            raise GridError("inverse transform expects a spectral-space field")
        return ComplexField.from_spectrum(field.grid, field.values)
    raise ValueError(f"unknown direction {direction!r}")


def spectral_derivative(field: ComplexField, axis: int, order: int = 1) -> ComplexField:
    grid = field.grid
    if not 0 <= axis < grid.dim:
        raise GridError(f"axis {axis} out of range for dim {grid.dim}")
    if order not in (1, 2):
        raise GridError(f"order must be 1 or 2, got {order}")
    if order == 1:
        mult = 1j * grid.broadcast_axis(grid.derivative_wavenumbers, axis)
    else:
        mult = -grid.broadcast_axis(grid.wavenumbers, axis) ** 2
    return ComplexField.from_spectrum(grid, field.spectrum * mult)


def gradient(field: ComplexField) -> list[np.ndarray]:
    """Physical-space gradient components (complex arrays)."""
    grid = field.grid
    spec = field.spectrum
    return [
        ifftn(spec * (1j * grid.broadcast_axis(grid.derivative_wavenumbers, ax)))
        for ax in range(grid.dim)
    ]


def real_gradient(grid: SpectralGrid, values: np.ndarray) -> list[np.ndarray]:
    spec = fftn(values)
    return [
        ifftn(spec * (1j * grid.broadcast_axis(grid.derivative_wavenumbers, ax))).real
        for ax in range(grid.dim)
    ]


def real_laplacian(grid: SpectralGrid, values: np.ndarray) -> np.ndarray:
    return ifftn(-grid.k_squared * fftn(values)).real


def laplacian(field: ComplexField) -> ComplexField:
    return ComplexField.from_spectrum(field.grid, -field.grid.k_squared * field.spectrum)


def integrate(grid: SpectralGrid, values: np.ndarray) -> float | complex:
    """Grid quadrature ``h^dim * sum(values)`` (spectrally accurate for periodic data)."""
    total = np.sum(values) * grid.cell_volume
    return total.item() if np.iscomplexobj(total) else float(total)


def spectral_norm_sq(grid: SpectralGrid, spectrum: np.ndarray, multiplier=1.0) -> float:
    return float(np.sum(multiplier * np.abs(spectrum) ** 2).real * grid.cell_volume / grid.size)


def l2_norm(field: ComplexField) -> float:
    return float(np.sqrt(integrate(field.grid, np.abs(field.values) ** 2)))


def sobolev_seminorm(field: ComplexField, s: float) -> float:
    """Homogeneous Sobolev seminorm with Fourier symbol ``|k|^s``.

    ``|k|`` uses the same Nyquist-free wavenumbers as :func:`gradient`, so
    ``s=1`` matches the L2 norm of the spectral gradient exactly.
    """
    if s < 0:
        raise ValueError("s must be non-negative")
    grid = field.grid
    if s == 0:
        mult = 1.0
    else:
        mult = grid.k_squared_gradient**s
    return float(np.sqrt(spectral_norm_sq(grid, field.spectrum, mult)))


def interpolate(field: ComplexField, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``field`` at arbitrary points.

    Points are ``(..., dim)`` and wrap periodically. The Nyquist mode is split
    symmetrically between ``+N/2`` and ``-N/2`` so the interpolant of a real
    field is real and collocation is exact.
    """
    grid = field.grid
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != grid.dim:
        raise GridError(f"points must have trailing dimension {grid.dim}")
    lead = pts.shape[:-1]
    pts = pts.reshape(-1, grid.dim)
    n = grid.n_points
    coeffs = field.spectrum / grid.size
    k = grid.wavenumbers
    x0 = grid.x1d[0]
    nyq = n // 2
    # Rows of exp(i k (x - x0)); Nyquist column replaced by cos to split the mode.
    out = coeffs
    factors = []
    for ax in range(grid.dim):
        phase = np.exp(1j * np.outer(pts[:, ax] - x0, k))
        phase[:, nyq] = np.cos(k[nyq] * (pts[:, ax] - x0))
        factors.append(phase)
    if grid.dim == 1:
        vals = factors[0] @ out
    elif grid.dim == 2:
        vals = np.einsum("pi,pj,ij->p", factors[0], factors[1], out, optimize=True)
    else:
        tmp = np.tensordot(factors[0], out, axes=(1, 0))  # (P, n, n)
        tmp = np.einsum("pj,pjk->pk", factors[1], tmp)
        vals = np.einsum("pk,pk->p", factors[2], tmp)
    return vals.reshape(lead)


def boundary_mass_fraction(field: ComplexField, shell: float = 0.1) -> float:
    """Fraction of mass in the outer ``shell`` of the box (per half-width, any axis)."""
    grid = field.grid
    dens = np.abs(field.values) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    limit = (1 - shell) * grid.box_length / 2
    mask = np.zeros(grid.shape, dtype=bool)
    for c in grid.coords:
        mask |= np.abs(c) >= limit
    return float(dens[mask].sum() / total)


def spectral_tail_fraction(field: ComplexField) -> float:
    """Fraction of ``sum |u_hat|^2`` carried by wavenumbers above 2/3 of Nyquist on any axis."""
    grid = field.grid
    power = np.abs(field.spectrum) ** 2
    total = power.sum()
    if total == 0:
        return 0.0
    kcut = (2.0 / 3.0) * np.pi / grid.spacing
    mask = np.zeros(grid.shape, dtype=bool)
    for kk in grid.kvec:
        mask |= np.abs(kk) > kcut
    return float(power[mask].sum() / total)
