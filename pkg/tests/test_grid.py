import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from morawetz.evolve import gaussian, random_band_limited
from morawetz.grid import (
    ComplexField,
    GridError,
    SpectralGrid,
    boundary_mass_fraction,
    gradient,
    integrate,
    interpolate,
    l2_norm,
    laplacian,
    make_grid,
    sobolev_seminorm,
    spectral_derivative,
    spectral_tail_fraction,
    transform,
)


@pytest.mark.parametrize("dim,n,L", [(0, 16, 1.0), (4, 16, 1.0), (2, 15, 1.0), (2, 6, 1.0), (2, 16, 0.0)])
def test_invalid_grids_rejected(dim, n, L):
    with pytest.raises(GridError):
        SpectralGrid(dim, n, L)


def test_budget_error():
    with pytest.raises(GridError, match="budget"):
        make_grid(3, 512, 10.0)


def test_coordinates_and_wavenumbers():
    g = make_grid(1, 8, 2 * np.pi)
    assert_allclose(g.x1d, -np.pi + np.arange(8) * np.pi / 4)
    assert_allclose(g.wavenumbers, [0, 1, 2, 3, -4, -3, -2, -1])
    assert g.derivative_wavenumbers[4] == 0
    assert g.k_squared[4] == 16


def test_non_finite_values_rejected():
    g = make_grid(1, 8, 1.0)
    vals = np.zeros(8, dtype=complex)
    vals[3] = np.nan
    with pytest.raises(FloatingPointError):
        ComplexField(g, vals)


def test_values_are_read_only(grid2):
    f = ComplexField.zeros(grid2)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_transform_round_trip(grid2):
    f = random_band_limited(grid2, seed=3, band=6)
    back = transform(transform(f, "forward"), "inverse")
    assert_allclose(back.values, f.values, atol=1e-14)


@pytest.mark.parametrize("m", [1, 3, 7])
def test_derivative_of_sine_is_exact(m):
    g = make_grid(1, 32, 2 * np.pi)
    x = g.x1d
    f = ComplexField(g, np.sin(m * x) + 0j)
    assert_allclose(spectral_derivative(f, 0).values, m * np.cos(m * x), atol=1e-12)
    assert_allclose(spectral_derivative(f, 0, order=2).values, -(m**2) * np.sin(m * x), atol=1e-11)


def test_real_field_has_real_gradient_including_nyquist():
    g = make_grid(1, 16, 2 * np.pi)
    f = ComplexField(g, np.cos(8 * g.x1d) + 0j)  # pure Nyquist mode
    assert_allclose(gradient(f)[0], 0, atol=1e-14)
    r = random_band_limited(make_grid(2, 16, 5.0), seed=1, band=7)
    real = ComplexField(r.grid, r.values.real + 0j)
    for d in gradient(real):
        assert_allclose(d.imag, 0, atol=1e-13)


def test_parseval_and_integrals(grid2):
    f = gaussian(grid2, 2.0, 1.0)
    # closed form: int A^2 exp(-r^2) = A^2 pi
    assert_allclose(l2_norm(f) ** 2, 4 * np.pi, rtol=1e-12)
    spec_mass = np.sum(np.abs(f.spectrum) ** 2) * grid2.cell_volume / grid2.size
    assert_allclose(spec_mass, integrate(grid2, np.abs(f.values) ** 2), rtol=1e-12)


def test_sobolev_one_matches_gradient(grid2, moving_gaussian2):
    f = moving_gaussian2
    direct = np.sqrt(sum(integrate(grid2, np.abs(d) ** 2) for d in gradient(f)))
    assert_allclose(sobolev_seminorm(f, 1.0), direct, rtol=1e-12)


def test_sobolev_gaussian_closed_form():
    # |grad exp(-r^2/2)|^2 integrates to pi in 2-d.
    g2 = make_grid(2, 64, 20.0)
    assert_allclose(sobolev_seminorm(gaussian(g2), 1.0) ** 2, np.pi, rtol=1e-10)
    # hat u(k) = sqrt(2 pi) e^{-k^2/2}, so (1/2pi) int |k| |hat u|^2 dk = 1. The kink of
    # |k| at 0 makes the k-sum second order in 2 pi / L, hence the long box.
    g1 = make_grid(1, 4096, 400.0)
    assert_allclose(sobolev_seminorm(gaussian(g1), 0.5) ** 2, 1.0, rtol=1e-4)


def test_sobolev_rejects_negative(grid2):
    with pytest.raises(ValueError):
        sobolev_seminorm(ComplexField.zeros(grid2), -0.5)


def test_laplacian_of_gaussian():
    g = make_grid(2, 64, 20.0)
    f = gaussian(g, 1.0, 1.0)
    r2 = sum(x**2 for x in g.coords)
    assert_allclose(laplacian(f).values, (r2 - 2) * np.exp(-r2 / 2), atol=1e-9)


def test_interpolation_exact_at_nodes_and_for_trig_polys():
    g = make_grid(2, 16, 2 * np.pi)
    f = random_band_limited(g, seed=2, band=7)
    assert_allclose(interpolate(f, g.points), f.values, atol=1e-13)
    x, y = g.coords
    h = ComplexField(g, np.exp(1j * (2 * x - 3 * y)) + np.cos(5 * y))
    rng = np.random.default_rng(0)
    pts = rng.uniform(-np.pi, np.pi, (50, 2))
    expect = np.exp(1j * (2 * pts[:, 0] - 3 * pts[:, 1])) + np.cos(5 * pts[:, 1])
    assert_allclose(interpolate(h, pts), expect, atol=1e-12)


def test_interpolation_3d_and_real_nyquist():
    g = make_grid(3, 8, 2 * np.pi)
    x, y, z = g.coords
    f = ComplexField(g, np.cos(4 * x) * np.sin(y) + 0j * z)
    pts = np.array([[0.1, 0.2, 0.3], [1.3, -2.0, 0.5]])
    vals = interpolate(f, pts)
    assert_allclose(vals, np.cos(4 * pts[:, 0]) * np.sin(pts[:, 1]), atol=1e-12)
    assert_allclose(vals.imag, 0, atol=1e-14)


def test_interpolation_dimension_mismatch(grid2):
    with pytest.raises(GridError):
        interpolate(ComplexField.zeros(grid2), np.zeros((3, 3)))


def test_boundary_and_tail_fractions(grid2):
    assert boundary_mass_fraction(ComplexField.zeros(grid2)) == 0
    centred = gaussian(grid2, 1.0, 0.8)
    assert boundary_mass_fraction(centred) < 1e-10
    edge = gaussian(grid2, 1.0, 0.8, (5.8, 0.0))
    assert boundary_mass_fraction(edge) > 0.3
    assert spectral_tail_fraction(centred) < 1e-8
    g = make_grid(1, 16, 2 * np.pi)
    assert_allclose(spectral_tail_fraction(ComplexField(g, np.exp(7j * g.x1d))), 1.0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_derivative_is_linear(seed, a, b):
    g = make_grid(2, 16, 6.0)
    f = random_band_limited(g, seed, 5)
    h = random_band_limited(g, seed + 1, 5)
    combo = ComplexField(g, a * f.values + b * h.values)
    for ax in range(2):
        lhs = spectral_derivative(combo, ax).values
        rhs = a * spectral_derivative(f, ax).values + b * spectral_derivative(h, ax).values
        assert_allclose(lhs, rhs, atol=1e-11)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_translation_preserves_norms(seed):
    g = make_grid(2, 16, 6.0)
    f = random_band_limited(g, seed, 5)
    shifted = ComplexField(g, np.roll(f.values, (3, -5), axis=(0, 1)))
    assert_allclose(l2_norm(shifted), l2_norm(f), rtol=1e-13)
    assert_allclose(sobolev_seminorm(shifted, 0.5), sobolev_seminorm(f, 0.5), rtol=1e-12)
