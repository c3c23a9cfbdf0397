"""Measured-ratio reports for inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Verdict = Literal["pass", "fail", "info"]


@dataclass
class EstimateReport:
    name: str
    lhs: float
    rhs: float
    constant_used: float = 1.0
    tolerance: float = 0.0
    verdict: Verdict = "info"
    context: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.copysign(math.inf, self.lhs)
        return self.lhs / self.rhs

    @property
    def failed(self) -> bool:
        return self.verdict == "fail"

    def line(self) -> str:
        return (
            f"check={self.name} lhs={self.lhs:.17g} rhs={self.rhs:.17g} "
            f"constant={self.constant_used:.17g} ratio={self.ratio:.17g} verdict={self.verdict}"
        )


def inequality(name: str, lhs: float, rhs: float, tolerance: float, constant: float = 1.0,
               context: dict | None = None, atol: float = 0.0) -> EstimateReport:
    """Hard check ``lhs <= rhs + tolerance * |rhs| + atol``."""
    lhs, rhs = float(lhs), float(rhs)
    ok = lhs <= rhs + tolerance * abs(rhs) + atol
    return EstimateReport(name, lhs, rhs, constant, tolerance, "pass" if ok else "fail", context or {})


def informational(name: str, lhs: float, rhs: float, constant: float = 1.0,
                  context: dict | None = None) -> EstimateReport:
    return EstimateReport(name, float(lhs), float(rhs), constant, 0.0, "info", context or {})


def trapezoid(times, values) -> float:
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 2:
        return 0.0
    return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(t)))


def forward_rates(times, values) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    return np.diff(np.asarray(values, dtype=float)) / np.diff(t)


def centered_rates(times, values) -> np.ndarray:
    """``(M[k+1] - M[k-1]) / (t[k+1] - t[k-1])`` at the interior samples."""
    t = np.asarray(times, dtype=float)
    m = np.asarray(values, dtype=float)
    return (m[2:] - m[:-2]) / (t[2:] - t[:-2])


def monotonicity(name: str, times, values, tol: float, context: dict | None = None) -> EstimateReport:
    """Pass iff every forward difference rate is ``>= -tol``.

    Reported as ``lhs = max(0, -min rate)`` against ``rhs = tol``.
    """
    rates = forward_rates(times, values)
    worst = float(rates.min()) if len(rates) else 0.0
    ctx = {"min_rate": worst, **(context or {})}
    lhs = max(0.0, -worst)
    return EstimateReport(name, lhs, tol, 1.0, 0.0, "pass" if worst >= -tol else "fail", ctx)
