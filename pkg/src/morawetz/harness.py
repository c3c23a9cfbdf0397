"""Scenario configuration, run orchestration and CSV/report output.

A scenario is a flat ``key = value`` file with ``#`` comments and dotted keys::

    name = gaussian-2d-theorem1
    dim = 2
    grid.n_points = 64
    grid.box_length = 16
    time.dt = 2e-3
    time.t_final = 2
    checks = line2d, angular-average

``run_scenario`` writes ``trace.csv`` (``t`` first, 17 significant digits),
``reports.txt`` (one ``check=... verdict=...`` line per report) and a
human-readable ``summary.txt`` into the output directory.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from morawetz import interaction, single
from morawetz.evolve import (
    DiagnosticTrace,
    SolverConfig,
    Stepper,
    evolve,
    gaussian,
    random_band_limited,
)
from morawetz.fields import Line2D, radial_weight
from morawetz.grid import (
    ComplexField,
    GridError,
    SpectralGrid,
    boundary_mass_fraction,
    integrate,
    sobolev_seminorm,
    spectral_tail_fraction,
)
from morawetz.laws import conservation_residuals, conserved_integrals, densities, divergence
from morawetz.reports import EstimateReport, inequality, informational

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending key."""


DEFAULTS: dict[str, str] = {
    "name": "scenario",
    "dim": "2",
    "p": "3",
    "nonlinearity": "defocusing",
    "grid.n_points": "64",
    "grid.box_length": "16",
    "time.dt": "2e-3",
    "time.t_final": "1",
    "time.observer_stride": "10",
    "initial.family": "gaussian",
    "initial.amplitude": "1",
    "initial.width": "1",
    "initial.center": "",
    "initial.wavevector": "",
    "initial.modulation": "",
    "initial.seed": "0",
    "initial.band": "4",
    "weight.epsilon": "2h",
    "weight.center": "",
    "weight.line_angle": "0",
    "weight.line_offset": "0",
    "weight.n_theta": "64",
    "checks": "conservation",
    "check.tol_rel": "0.02",
    "check.mass_tol": "1e-10",
    "check.momentum_tol": "1e-8",
    "boundary.threshold": "1e-2",
    "output.dir": "",
}

COUPLINGS = {"defocusing": 1.0, "focusing": -1.0, "linear": 0.0}
FAMILIES = ("gaussian", "plane-modulated-gaussian", "random-band-limited")


# ---------------------------------------------------------------------------
# parsing


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        if key in out:
            raise ConfigError(f"duplicate config key {key!r} (line {lineno})")
        out[key] = value
    return out


def parse_overrides(items) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r} in override")
        out[key] = value
    return out


def load_config(path, overrides=None) -> dict[str, str]:
    flat = parse_config_text(Path(path).read_text())
    flat.update(parse_overrides(overrides))
    return flat


def _num(flat, key, kind=float):
    raw = flat[key]
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def _vec(flat, key, dim) -> np.ndarray:
    raw = flat[key].strip()
    if not raw:
        return np.zeros(dim)
    try:
        vals = np.array([float(v) for v in raw.split(",")])
    except ValueError:
        raise ConfigError(f"{key}: expected {dim} comma-separated numbers, got {raw!r}") from None
    if len(vals) != dim:
        raise ConfigError(f"{key}: expected {dim} components, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# scenario


@dataclass(frozen=True)
class Scenario:
    name: str
    dim: int
    p: float
    coupling: float
    n_points: int
    box_length: float
    dt: float
    t_final: float
    observer_stride: int
    family: str
    amplitude: float
    width: float
    center: np.ndarray
    wavevector: np.ndarray
    modulation: np.ndarray
    seed: int
    band: int
    epsilon_spec: str
    weight_center: np.ndarray
    line_angle: float
    line_offset: float
    n_theta: int
    checks: tuple[str, ...]
    tol_rel: float
    mass_tol: float
    momentum_tol: float
    boundary_threshold: float
    output_dir: str
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.dim, self.n_points, self.box_length)

    @property
    def epsilon(self) -> float:
        return resolve_epsilon(self.epsilon_spec, self.box_length / self.n_points)

    @property
    def line(self) -> Line2D:
        base = Line2D((0.0, 0.0), self.line_angle)
        return Line2D(tuple(self.line_offset * base.normal), self.line_angle)

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(p=self.p, dt=self.dt, t_final=self.t_final,
                            observer_stride=self.observer_stride, coupling=self.coupling)


def resolve_epsilon(spec: str, spacing: float) -> float:
    """``"2h"`` -> 2 * spacing, ``"0.1"`` -> 0.1."""
    s = spec.strip()
    try:
        value = float(s[:-1]) * spacing if s.endswith("h") else float(s)
    except ValueError:
        raise ConfigError(f"weight.epsilon: cannot parse {spec!r}") from None
    if not value >= 0 or not math.isfinite(value):
        raise ConfigError("weight.epsilon: must be a non-negative number")
    return value


def scenario_from_flat(flat: dict[str, str]) -> Scenario:
    for key in flat:
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
    cfg = {**DEFAULTS, **flat}
    dim = _num(cfg, "dim", int)
    if dim not in (1, 2, 3):
        raise ConfigError(f"dim: must be 1, 2 or 3, got {dim}")
    nonlin = cfg["nonlinearity"].strip()
    if nonlin not in COUPLINGS:
        raise ConfigError(f"nonlinearity: expected one of {sorted(COUPLINGS)}, got {nonlin!r}")
    family = cfg["initial.family"].strip()
    if family not in FAMILIES:
        raise ConfigError(f"initial.family: expected one of {list(FAMILIES)}, got {family!r}")
    checks = tuple(c.strip() for c in cfg["checks"].split(",") if c.strip())
    for c in checks:
        if c not in CHECKS:
            raise ConfigError(f"checks: unknown check {c!r}; available: {sorted(CHECKS)}")
        dims = CHECKS[c].dims
        if dim not in dims:
            raise ConfigError(f"checks: check {c!r} needs dim in {sorted(dims)}, scenario has dim={dim}")
    if len(set(checks)) != len(checks):
        raise ConfigError("checks: each check may be listed once")

    sc = Scenario(
        name=cfg["name"].strip() or "scenario",
        dim=dim,
        p=_num(cfg, "p"),
        coupling=COUPLINGS[nonlin],
        n_points=_num(cfg, "grid.n_points", int),
        box_length=_num(cfg, "grid.box_length"),
        dt=_num(cfg, "time.dt"),
        t_final=_num(cfg, "time.t_final"),
        observer_stride=_num(cfg, "time.observer_stride", int),
        family=family,
        amplitude=_num(cfg, "initial.amplitude"),
        width=_num(cfg, "initial.width"),
        center=_vec(cfg, "initial.center", dim),
        wavevector=_vec(cfg, "initial.wavevector", dim),
        modulation=_vec(cfg, "initial.modulation", dim),
        seed=_num(cfg, "initial.seed", int),
        band=_num(cfg, "initial.band", int),
        epsilon_spec=cfg["weight.epsilon"],
        weight_center=_vec(cfg, "weight.center", dim),
        line_angle=_num(cfg, "weight.line_angle"),
        line_offset=_num(cfg, "weight.line_offset"),
        n_theta=_num(cfg, "weight.n_theta", int),
        checks=checks,
        tol_rel=_num(cfg, "check.tol_rel"),
        mass_tol=_num(cfg, "check.mass_tol"),
        momentum_tol=_num(cfg, "check.momentum_tol"),
        boundary_threshold=_num(cfg, "boundary.threshold"),
        output_dir=cfg["output.dir"].strip(),
        raw=dict(cfg),
    )
    # Surface grid/solver/weight problems as config errors naming the key.
    try:
        sc.grid
    except GridError as exc:
        raise ConfigError(f"grid.n_points/grid.box_length: {exc}") from None
    try:
        sc.solver.n_steps
    except ValueError as exc:
        raise ConfigError(f"time.dt/time.t_final/time.observer_stride: {exc}") from None
    sc.epsilon
    if sc.width <= 0:
        raise ConfigError("initial.width: must be positive")
    if sc.n_theta < 4:
        raise ConfigError("weight.n_theta: must be >= 4")
    if sc.tol_rel < 0:
        raise ConfigError("check.tol_rel: must be non-negative")
    if family == "random-band-limited" and not 0 <= sc.band < sc.n_points // 2:
        raise ConfigError(f"initial.band: must be in [0, {sc.n_points // 2 - 1}]")
    for c in checks:
        if CHECKS[c].budget_n and sc.n_points > CHECKS[c].budget_n:
            raise ConfigError(
                f"checks: check {c!r} supports grid.n_points <= {CHECKS[c].budget_n}, got {sc.n_points}"
            )
    return sc


def initial_field(sc: Scenario) -> ComplexField:
    grid = sc.grid
    if sc.family == "gaussian":
        return gaussian(grid, sc.amplitude, sc.width, sc.center, sc.wavevector)
    if sc.family == "plane-modulated-gaussian":
        env = gaussian(grid, sc.amplitude, sc.width, sc.center, sc.wavevector).values
        mod = np.cos(sum(q * x for q, x in zip(sc.modulation, grid.coords)))
        return ComplexField(grid, env * mod)
    return random_band_limited(grid, sc.seed, sc.band, sc.amplitude)


# ---------------------------------------------------------------------------
# channels and checks

Channel = Callable[[ComplexField], float]


def _channels(sc: Scenario) -> dict[str, Channel]:
    eps = sc.epsilon
    x0 = sc.weight_center
    grid = sc.grid
    chans: dict[str, Channel] = {
        "hhalf_sq": lambda f: sobolev_seminorm(f, 0.5) ** 2,
        "h1": lambda f: sobolev_seminorm(f, 1.0),
        "l4": lambda f: integrate(f.grid, np.abs(f.values) ** 4),
        "l8": lambda f: integrate(f.grid, np.abs(f.values) ** 8),
    }
    if sc.dim == 3:
        spec = radial_weight(3, eps, x0)

        def virial(name):
            return lambda f: getattr(single.virial_rhs_terms(f, spec, sc.p, sc.coupling), name)

        def div_lp1(f):
            a = spec.weight(f.grid.points)
            return integrate(f.grid, spec.div_from_a(a) * np.abs(f.values) ** (sc.p + 1))

        chans.update({
            "M_radial": lambda f: single.morawetz_action(f, spec),
            "virial_bilap": virial("bilaplacian_term"),
            "virial_div_lp1": div_lp1,
            "point_density": lambda f: single.smoothed_point_density(f, x0, eps),
            "weighted_lp1": lambda f: single.weighted_integral(f, x0, sc.p + 1, eps),
            "M_pair": lambda f: interaction.interaction_action_3d(f, eps),
        })
    if sc.dim == 2:
        line = sc.line
        curve = interaction.default_line_curve(grid, line)
        chans.update({
            "M_line": lambda f: interaction.interaction_action_2d(f, line, eps),
            "line_l4": lambda f: interaction.line_restricted_l4(f, curve),
            "weighted_l4": lambda f: interaction.angular_average_weighted_l4(f, x0, sc.n_theta, 0.0),
        })
    if sc.dim == 1:
        chans["M_diag"] = lambda f: interaction.interaction_action_1d(f, eps)
    return chans


def _conservation_reports(sc: Scenario, tr: DiagnosticTrace, final) -> list[EstimateReport]:
    mass = tr.channel("mass")
    energy = tr.channel("energy")
    mom = np.stack([tr.channel(c) for c in _momentum_channels(sc.dim)], axis=1)
    m0 = mass[0]
    mass_drift = float(np.max(np.abs(mass - m0)) / m0) if m0 > 0 else float(np.max(np.abs(mass)))
    p_scale = max(1.0, float(np.linalg.norm(mom[0])))
    mom_drift = float(np.max(np.linalg.norm(mom - mom[0], axis=1))) / p_scale
    return [
        inequality("mass-drift", mass_drift, sc.mass_tol, 0.0),
        inequality("momentum-drift", mom_drift, sc.momentum_tol, 0.0),
        informational("energy-drift", float(np.max(np.abs(energy - energy[0]))), abs(float(energy[0]))),
    ]


def _local_law_reports(sc: Scenario, tr: DiagnosticTrace, final) -> list[EstimateReport]:
    fwd = Stepper(final.grid, sc.dt, sc.p, sc.coupling)
    bwd = Stepper(final.grid, -sc.dt, sc.p, sc.coupling)
    snaps = (bwd.step(final), final, fwd.step(final))
    res = conservation_residuals(snaps, sc.dt, sc.p, sc.coupling)
    d = densities(final)
    grid = final.grid
    rate = divergence(grid, d.momentum)
    mass_scale = float(np.sqrt(integrate(grid, rate**2)))
    ctx = {"dt": sc.dt, "t": float(tr.t[-1])}
    return [
        informational("mass-law", res.mass_residual, mass_scale, context=ctx),
        informational("momentum-law", res.momentum_residual, mass_scale, context=ctx),
    ]


def _angular_report(sc: Scenario, tr: DiagnosticTrace, final) -> list[EstimateReport]:
    avg = interaction.angular_average_weighted_l4(final, sc.weight_center, sc.n_theta, 0.0)
    direct = interaction.direct_weighted_l4(final, sc.weight_center)
    rel = abs(avg - direct) / abs(direct) if direct else abs(avg)
    return [inequality("angular-average", rel, 0.01, 0.0,
                       context={"average": avg, "direct": direct, "n_theta": sc.n_theta})]


def _interaction_reports(kind):
    def build(sc: Scenario, tr: DiagnosticTrace, final) -> list[EstimateReport]:
        if kind == "line2d":
            reps = interaction.monotonicity_and_ftc_check(tr, kind, sc.tol_rel, include_ratio=False)
            return reps + [interaction.theorem1_ratio(tr)]
        return interaction.monotonicity_and_ftc_check(tr, kind, sc.tol_rel)
    return build


@dataclass(frozen=True)
class CheckDef:
    dims: frozenset
    channels: tuple[str, ...]
    reports: Callable
    budget_n: int = 0


CHECKS: dict[str, CheckDef] = {
    "conservation": CheckDef(frozenset({1, 2, 3}), (), _conservation_reports),
    "local-laws": CheckDef(frozenset({1, 2, 3}), (), _local_law_reports),
    "radial-monotonicity": CheckDef(
        frozenset({3}), ("M_radial",), lambda sc, tr, f: [single.radial_monotonicity_check(tr)]),
    "lin-strauss": CheckDef(
        frozenset({3}), ("point_density", "weighted_lp1", "hhalf_sq"),
        lambda sc, tr, f: [single.lin_strauss_check(tr, sc.p)]),
    "generalized-virial": CheckDef(
        frozenset({3}), ("M_radial", "virial_bilap", "virial_div_lp1"),
        lambda sc, tr, f: [single.generalized_virial_check(tr)]),
    "pair3d": CheckDef(frozenset({3}), ("hhalf_sq", "M_pair", "l4"), _interaction_reports("pair3d")),
    "line2d": CheckDef(frozenset({2}), ("hhalf_sq", "M_line", "line_l4", "weighted_l4"),
                       _interaction_reports("line2d"), interaction.PAIR_BUDGET_N),
    "angular-average": CheckDef(frozenset({2}), (), _angular_report),
    "diag1d": CheckDef(frozenset({1}), ("h1", "M_diag", "l8"), _interaction_reports("diag1d"),
                       interaction.QUAD_BUDGET_N),
}


def _momentum_channels(dim: int) -> list[str]:
    return ["px", "py", "pz"][:dim]


def channel_names(sc: Scenario) -> list[str]:
    names = ["mass", "energy", *_momentum_channels(sc.dim)]
    for c in sc.checks:
        for ch in CHECKS[c].channels:
            if ch not in names:
                names.append(ch)
    return names


# ---------------------------------------------------------------------------
# running


@dataclass
class RunResult:
    scenario: Scenario
    trace: DiagnosticTrace
    reports: list[EstimateReport]
    out_dir: Path | None
    boundary_fraction: tuple[float, float] = (0.0, 0.0)
    tail_fraction: float = 0.0

    @property
    def aborted(self) -> bool:
        return self.trace.aborted

    @property
    def n_failed(self) -> int:
        return sum(r.failed for r in self.reports)

    @property
    def ok(self) -> bool:
        return not self.aborted and self.n_failed == 0

    def report(self, name: str) -> EstimateReport:
        for r in self.reports:
            if r.name == name:
                return r
        raise KeyError(name)


def run_scenario(sc: Scenario, out_dir=None, write: bool = True) -> RunResult:
    names = channel_names(sc)
    chans = _channels(sc)

    def observe(f: ComplexField, t: float) -> dict[str, float]:
        ci = conserved_integrals(f, sc.p, sc.coupling)
        values = {"mass": ci.mass, "energy": ci.energy}
        values.update(zip(_momentum_channels(sc.dim), ci.momentum))
        for n in names[len(values):]:
            values[n] = chans[n](f)
        return {n: values[n] for n in names}

    u0 = initial_field(sc)
    log.info("running %s: dim=%d N=%d dt=%g T=%g checks=%s",
             sc.name, sc.dim, sc.n_points, sc.dt, sc.t_final, ",".join(sc.checks))
    trace = evolve(u0, sc.solver, {"all": observe})
    trace.metadata.update({"scenario": sc.name, "epsilon": sc.epsilon})
    final = trace.final_state

    reports: list[EstimateReport] = []
    if not trace.aborted:
        for c in sc.checks:
            reports.extend(CHECKS[c].reports(sc, trace, final))

    result = RunResult(
        sc, trace, reports, None,
        (boundary_mass_fraction(u0), boundary_mass_fraction(final)),
        spectral_tail_fraction(final),
    )
    if write:
        target = Path(out_dir or sc.output_dir or Path("runs") / sc.name)
        write_artifacts(result, target)
        result.out_dir = target
    return result


def write_trace_csv(trace: DiagnosticTrace, path: Path, names: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *names])
        cols = [trace.t] + [trace.channel(n) for n in names]
        for row in zip(*cols):
            w.writerow([f"{v + 0.0:.17g}" for v in row])  # no "-0"


def summary_text(res: RunResult) -> str:
    sc = res.scenario
    lines = [
        f"scenario: {sc.name}",
        f"dim={sc.dim} n_points={sc.n_points} box_length={sc.box_length:g} p={sc.p:g} "
        f"coupling={sc.coupling:g} dt={sc.dt:g} t_final={sc.t_final:g} stride={sc.observer_stride}",
        f"epsilon={sc.epsilon:.6g} checks={','.join(sc.checks) or '-'}",
        f"samples={len(res.trace)} boundary_mass initial={res.boundary_fraction[0]:.3e} "
        f"final={res.boundary_fraction[1]:.3e} spectral_tail={res.tail_fraction:.3e}",
    ]
    if max(res.boundary_fraction) > sc.boundary_threshold:
        lines.append(f"warning: boundary mass exceeds {sc.boundary_threshold:g}; enlarge the box")
    if res.aborted:
        lines.append(f"ABORTED: {res.trace.abort_reason}")
    lines.append("")
    for r in res.reports:
        lines.append(f"  [{r.verdict:4s}] {r.name:20s} lhs={r.lhs:.6e} rhs={r.rhs:.6e} ratio={r.ratio:.6g}")
    counts = {v: sum(r.verdict == v for r in res.reports) for v in ("pass", "fail", "info")}
    lines.append("")
    lines.append(f"pass={counts['pass']} fail={counts['fail']} info={counts['info']} "
                 f"status={'OK' if res.ok else 'FAILED'}")
    return "\n".join(lines) + "\n"


def write_artifacts(res: RunResult, out_dir: Path) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trace_csv(res.trace, out_dir / "trace.csv", channel_names(res.scenario))
    (out_dir / "reports.txt").write_text("".join(r.line() + "\n" for r in res.reports))
    (out_dir / "summary.txt").write_text(summary_text(res))


# ---------------------------------------------------------------------------
# sweeps

SWEEPABLE = {
    "p", "grid.n_points", "grid.box_length", "time.dt", "time.t_final", "time.observer_stride",
    "initial.amplitude", "initial.width", "initial.seed", "initial.band", "weight.epsilon",
    "weight.line_angle", "weight.line_offset", "weight.n_theta", "check.tol_rel",
}


@dataclass
class SweepRow:
    value: str
    check: str
    lhs: float
    rhs: float
    ratio: float
    verdict: str
    order: float | None = None


@dataclass
class SweepResult:
    axis: str
    values: list[str]
    rows: list[SweepRow]
    errors: dict[str, str]
    runs: dict[str, RunResult]

    @property
    def ok(self) -> bool:
        return not self.errors and all(r.ok for r in self.runs.values())

    def series(self, check: str) -> list[float]:
        return [r.lhs for r in self.rows if r.check == check]


def _axis_number(axis: str, value: str, spacing: float) -> float:
    if axis == "weight.epsilon":
        return resolve_epsilon(value, spacing)
    return float(value)


def sweep(base: dict[str, str], axis: str, values, out_dir=None) -> SweepResult:
    """One run per value of ``axis``; per-run errors are recorded and the sweep continues.

    Orders are ``log(r_i / r_{i+1}) / log(v_i / v_{i+1})`` on successive lhs values
    (``log2`` of the residual ratio for halving sweeps).
    """
    if axis not in SWEEPABLE:
        raise ConfigError(f"axis {axis!r} is not sweepable; choose from {sorted(SWEEPABLE)}")
    values = [str(v).strip() for v in values]
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows: list[SweepRow] = []
    errors: dict[str, str] = {}
    runs: dict[str, RunResult] = {}
    xs: dict[str, float] = {}
    for v in values:
        flat = {**base, axis: v}
        try:
            sc = scenario_from_flat(flat)
            target = Path(out_dir) / f"{axis}={v}" if out_dir else None
            res = run_scenario(sc, target, write=target is not None)
        except Exception as exc:  # keep sweeping; the error is part of the result
            log.error("sweep point %s=%s failed: %s", axis, v, exc)
            errors[v] = f"{type(exc).__name__}: {exc}"
            continue
        runs[v] = res
        xs[v] = _axis_number(axis, v, sc.box_length / sc.n_points)
        for r in res.reports:
            rows.append(SweepRow(v, r.name, r.lhs, r.rhs, r.ratio, r.verdict))

    by_check: dict[str, list[SweepRow]] = {}
    for row in rows:
        by_check.setdefault(row.check, []).append(row)
    for series in by_check.values():
        for prev, cur in zip(series, series[1:]):
            xa, xb = xs[prev.value], xs[cur.value]
            if prev.lhs > 0 and cur.lhs > 0 and xa > 0 and xb > 0 and xa != xb:
                cur.order = math.log(prev.lhs / cur.lhs) / math.log(xa / xb)

    result = SweepResult(axis, values, rows, errors, runs)
    if out_dir:
        write_sweep_csv(result, Path(out_dir) / "sweep.csv")
    return result


def write_sweep_csv(res: SweepResult, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([res.axis, "check", "lhs", "rhs", "ratio", "verdict", "order"])
        for r in res.rows:
            w.writerow([r.value, r.check, f"{r.lhs:.17g}", f"{r.rhs:.17g}", f"{r.ratio:.17g}",
                        r.verdict, "" if r.order is None else f"{r.order:.6g}"])
        for v, err in res.errors.items():
            w.writerow([v, "error", "", "", "", err, ""])


def sweep_table(res: SweepResult) -> str:
    lines = [f"{res.axis:>14s}  {'check':20s} {'lhs':>14s} {'ratio':>12s} {'order':>8s} verdict"]
    for r in res.rows:
        order = "" if r.order is None else f"{r.order:.3f}"
        lines.append(f"{r.value:>14s}  {r.check:20s} {r.lhs:14.6e} {r.ratio:12.6g} {order:>8s} {r.verdict}")
    for v, err in res.errors.items():
        lines.append(f"{v:>14s}  error: {err}")
    return "\n".join(lines)
