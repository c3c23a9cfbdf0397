"""Single-solution Morawetz action and virial terms for the radial weight."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from morawetz.evolve import DiagnosticTrace
from morawetz.fields import VectorFieldSpec, radial_weight
from morawetz.grid import ComplexField, integrate
from morawetz.laws import densities, nonlinear_pressure
from morawetz.reports import EstimateReport, informational, monotonicity, trapezoid


def _check_radial(field: ComplexField, spec: VectorFieldSpec) -> None:
    if spec.kind != "radial" or spec.ambient_dim != field.grid.dim:
        raise ValueError(
            f"need a radial weight in {field.grid.dim} dimensions, got {spec.kind} in {spec.ambient_dim}"
        )


def morawetz_action(field: ComplexField, spec: VectorFieldSpec) -> float:
    """``M = -int X . p dx`` with ``X`` the gradient of the regularized radial weight."""
    _check_radial(field, spec)
    dens = densities(field)
    X = spec.vector(field.grid.points)
    return -integrate(field.grid, np.einsum("...k,k...->...", X, dens.momentum))


@dataclass(frozen=True)
class VirialTerms:
    bilaplacian_term: float
    nonlinear_term: float
    sigma_term: float
    sigma_closed_form: float

    @property
    def total(self) -> float:
        return self.bilaplacian_term + self.nonlinear_term + self.sigma_term

    @property
    def sigma_discrepancy(self) -> float:
        scale = max(abs(self.sigma_term), abs(self.sigma_closed_form))
        return 0.0 if scale == 0 else abs(self.sigma_term - self.sigma_closed_form) / scale


def virial_rhs_terms(field: ComplexField, spec: VectorFieldSpec, p: float,
                     coupling: float = 1.0) -> VirialTerms:
    """The three pieces of ``dM/dt``.

    ``int (-Lap div X) rho``, ``c int div X G(rho)`` and ``int grad X : sigma``;
    the last one also in the closed form ``(2/a)(|grad u|^2 - |(x - c).grad u|^2 / a^2)``.
    """
    _check_radial(field, spec)
    if spec.epsilon <= 0:
        raise ValueError("virial terms need a regularized weight (epsilon > 0)")
    grid = field.grid
    dens = densities(field)
    pts = grid.points
    a = spec.weight(pts)
    bilap = integrate(grid, spec.neg_lap_div_from_a(a) * dens.rho)
    nonlin = coupling * integrate(grid, spec.div_from_a(a) * nonlinear_pressure(dens.rho, p)) if coupling else 0.0
    jac = spec.jacobian(pts)
    sigma_term = integrate(grid, np.einsum("...jk,jk...->...", jac, dens.sigma))
    du = dens.grad_u
    rel = np.moveaxis(pts - spec.origin, -1, 0)
    radial_part = np.abs(np.sum(rel * du, axis=0)) ** 2
    closed = (2 / a) * (np.sum(np.abs(du) ** 2, axis=0) - radial_part / a**2)
    return VirialTerms(bilap, nonlin, sigma_term, integrate(grid, closed))


def weighted_integral(field: ComplexField, center, exponent: float, epsilon: float) -> float:
    """``int |u|^exponent / sqrt(|x - center|^2 + eps^2) dx`` by grid quadrature."""
    grid = field.grid
    c = np.zeros(grid.dim) if center is None else np.asarray(center, dtype=float)
    r2 = sum((x - ci) ** 2 for x, ci in zip(grid.coords, c))
    return integrate(grid, np.abs(field.values) ** exponent / np.sqrt(r2 + epsilon**2))


def weighted_spacetime_norm(snapshots, times, center, exponent: float, epsilon: float) -> float:
    """Time trapezoid of :func:`weighted_integral` over stored snapshots."""
    snaps = list(snapshots)
    if len(snaps) != len(times):
        raise ValueError("need one time per snapshot")
    vals = [weighted_integral(s, center, exponent, epsilon) for s in snaps]
    return trapezoid(times, vals)


def smoothed_point_density(field: ComplexField, center, epsilon: float) -> float:
    """``|u(center)|^2`` smoothed by the regularized delta ``(-Lap div X) / 8 pi`` of the 3-d radial weight.

    This is the same mollifier that produces the point term in ``dM/dt``.
    """
    if field.grid.dim != 3:
        raise ValueError("the point term exists only for the 3-d radial weight")
    spec = radial_weight(3, epsilon, center)
    kernel = spec.neg_lap_div(field.grid.points) / (8 * np.pi)
    return integrate(field.grid, kernel * np.abs(field.values) ** 2)


def lin_strauss_check(trace: DiagnosticTrace, p: float) -> EstimateReport:
    """``int |u(t,c)|^2 dt + int int |u|^(p+1) / |x - c|  <~  sup_t ||u||_{H^1/2}^2`` as a measured ratio."""
    t = trace.t
    point = trace.channel("point_density")
    weighted = trace.channel("weighted_lp1")
    hh = trace.channel("hhalf_sq")
    lhs = trapezoid(t, point) + trapezoid(t, weighted)
    rhs = float(hh.max()) if len(hh) else 0.0
    return informational("lin-strauss", lhs, rhs, context={"p": p, **trace.metadata})


def generalized_virial_check(trace: DiagnosticTrace) -> EstimateReport:
    """``int int (-Lap Lap a)|u|^2 + int int (Lap a)|u|^(p+1)  <~  sup |M|`` as a measured ratio."""
    t = trace.t
    lhs = trapezoid(t, 2 * trace.channel("virial_bilap")) + trapezoid(t, trace.channel("virial_div_lp1"))
    rhs = float(np.max(np.abs(trace.channel("M_radial"))))
    return informational("generalized-virial", lhs, rhs, context=dict(trace.metadata))


def radial_monotonicity_check(trace: DiagnosticTrace) -> EstimateReport:
    m = trace.channel("M_radial")
    tol = 1e-6 * max(1.0, float(np.max(np.abs(m))))
    return monotonicity("radial-monotonicity", trace.t, m, tol, dict(trace.metadata))
