"""Pseudospectral NLS simulator with a Morawetz-estimate verification harness.

The equation is ``i u_t - Lap u + c |u|^(p-1) u = 0`` on a periodic box
(``c = 1`` defocusing, ``-1`` focusing, ``0`` linear).
"""

from morawetz.evolve import DiagnosticTrace, SolverConfig, evolve, gaussian, strang_step
from morawetz.grid import ComplexField, SpectralGrid, make_grid

__all__ = [
    "ComplexField",
    "DiagnosticTrace",
    "SolverConfig",
    "SpectralGrid",
    "evolve",
    "gaussian",
    "make_grid",
    "strang_step",
]

__version__ = "0.1.0"
