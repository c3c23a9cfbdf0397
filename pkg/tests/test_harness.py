import csv
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from morawetz import cli, harness
from morawetz.harness import (
    ConfigError,
    channel_names,
    load_config,
    parse_config_text,
    parse_overrides,
    resolve_epsilon,
    run_scenario,
    scenario_from_flat,
    sweep,
    sweep_table,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL_2D = {
    "name": "small-2d",
    "dim": "2",
    "grid.n_points": "32",
    "grid.box_length": "16",
    "time.dt": "1e-2",
    "time.t_final": "0.2",
    "time.observer_stride": "5",
    "initial.width": "2",
    "initial.center": "0.3,0.2",
    "checks": "conservation, line2d",
}


# --- parsing ------------------------------------------------------------------


def test_parse_comments_and_whitespace():
    flat = parse_config_text("# header\n dim = 3 \n\ngrid.n_points=16  # inline\n")
    assert flat == {"dim": "3", "grid.n_points": "16"}


@pytest.mark.parametrize(
    "text,key",
    [
        ("grid.npoints = 16", "grid.npoints"),
        ("dim = 2\ndim = 3", "dim"),
        ("just words", "line 1"),
    ],
)
def test_parse_errors_name_the_key(text, key):
    with pytest.raises(ConfigError, match=key):
        parse_config_text(text)


def test_overrides():
    assert parse_overrides(["dim=3", "time.dt = 1e-3"]) == {"dim": "3", "time.dt": "1e-3"}
    with pytest.raises(ConfigError, match="bogus"):
        parse_overrides(["bogus=1"])
    with pytest.raises(ConfigError):
        parse_overrides(["dim"])


def test_load_config_applies_overrides():
    flat = load_config(CONFIGS / "gaussian-2d-theorem1.cfg", ["grid.n_points=32"])
    assert flat["grid.n_points"] == "32"
    assert flat["checks"].startswith("line2d")


@pytest.mark.parametrize("cfg", sorted(p.name for p in CONFIGS.glob("*.cfg")))
def test_shipped_configs_validate(cfg):
    sc = scenario_from_flat(load_config(CONFIGS / cfg))
    assert sc.checks


@pytest.mark.parametrize(
    "flat,needle",
    [
        ({"dim": "3", "checks": "line2d"}, "line2d"),
        ({"dim": "1", "checks": "pair3d"}, "pair3d"),
        ({"checks": "nope"}, "nope"),
        ({"nonlinearity": "sideways"}, "nonlinearity"),
        ({"initial.family": "square"}, "initial.family"),
        ({"time.dt": "3e-3", "time.t_final": "1"}, "time.dt"),
        ({"grid.n_points": "15"}, "grid.n_points"),
        ({"weight.epsilon": "xh"}, "weight.epsilon"),
        ({"initial.center": "1,2,3"}, "initial.center"),
        ({"initial.width": "0"}, "initial.width"),
        ({"checks": "line2d", "grid.n_points": "128"}, "line2d"),
        ({"checks": "conservation, conservation"}, "checks"),
    ],
)
def test_invalid_scenarios_name_the_problem(flat, needle):
    with pytest.raises(ConfigError, match=needle):
        scenario_from_flat(flat)


def test_resolve_epsilon():
    assert_allclose(resolve_epsilon("2h", 0.25), 0.5)
    assert_allclose(resolve_epsilon("1h", 0.25), 0.25)
    assert_allclose(resolve_epsilon("0.3", 0.25), 0.3)
    with pytest.raises(ConfigError):
        resolve_epsilon("-1", 0.25)


def test_scenario_properties():
    sc = scenario_from_flat({**SMALL_2D, "weight.line_angle": str(np.pi / 2), "weight.line_offset": "1"})
    assert_allclose(sc.epsilon, 2 * 16 / 32)
    assert_allclose(sc.line.point, (-1.0, 0.0), atol=1e-15)
    assert sc.solver.n_steps == 20
    assert channel_names(sc) == ["mass", "energy", "px", "py", "hhalf_sq", "M_line", "line_l4", "weighted_l4"]


# --- runs ---------------------------------------------------------------------


def test_run_writes_artifacts(tmp_path):
    res = run_scenario(scenario_from_flat(SMALL_2D), tmp_path / "a")
    with open(tmp_path / "a" / "trace.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "mass", "energy", "px", "py", "hhalf_sq", "M_line", "line_l4", "weighted_l4"]
    assert len(rows) == 1 + 5
    assert all(len(r) == len(rows[0]) for r in rows)
    names = [r.name for r in res.reports]
    assert names == ["mass-drift", "momentum-drift", "energy-drift",
                     "monotonicity", "pointwise-2pi", "ftc", "theorem1-ratio"]
    lines = (tmp_path / "a" / "reports.txt").read_text().splitlines()
    assert len(lines) == len(names)
    assert all(line.startswith("check=") and "verdict=" in line for line in lines)
    summary = (tmp_path / "a" / "summary.txt").read_text()
    assert "pass=" in summary and "status=" in summary
    assert res.ok, summary


def test_run_is_byte_identical(tmp_path):
    flat = {**SMALL_2D, "initial.family": "random-band-limited", "initial.seed": "7", "checks": "conservation"}
    run_scenario(scenario_from_flat(flat), tmp_path / "one")
    run_scenario(scenario_from_flat(flat), tmp_path / "two")
    for name in ("trace.csv", "reports.txt", "summary.txt"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()


def test_zero_amplitude_scenario(tmp_path):
    sc = scenario_from_flat(load_config(CONFIGS / "zero-amplitude-2d.cfg"))
    res = run_scenario(sc, tmp_path)
    assert res.ok
    for name in channel_names(sc):
        assert np.all(res.trace.channel(name) == 0), name
    assert all(r.verdict in ("pass", "info") for r in res.reports)


def test_each_check_reported_once(tmp_path):
    flat = {**SMALL_2D, "checks": "conservation, local-laws, line2d, angular-average"}
    res = run_scenario(scenario_from_flat(flat), write=False)
    names = [r.name for r in res.reports]
    assert len(names) == len(set(names))
    assert {"mass-law", "momentum-law", "angular-average"} <= set(names)
    assert res.out_dir is None


def test_report_lookup():
    res = run_scenario(scenario_from_flat({**SMALL_2D, "checks": "conservation"}), write=False)
    assert res.report("mass-drift").verdict == "pass"
    with pytest.raises(KeyError):
        res.report("missing")


@pytest.mark.parametrize("family", ["plane-modulated-gaussian", "random-band-limited"])
def test_other_initial_families(family):
    flat = {**SMALL_2D, "initial.family": family, "initial.modulation": "1,0", "checks": "conservation"}
    res = run_scenario(scenario_from_flat(flat), write=False)
    assert res.trace.channel("mass")[0] > 0
    assert res.report("mass-drift").verdict == "pass"
    # on this coarse grid the nonlinear phase aliases, so momentum is only conserved to ~1e-6
    assert res.report("momentum-drift").lhs < 1e-5


# --- sweeps -------------------------------------------------------------------


def test_dt_sweep_local_law_order(tmp_path):
    base = {
        "dim": "2", "grid.n_points": "64", "grid.box_length": "20", "time.t_final": "0.1",
        "time.observer_stride": "10", "initial.amplitude": "1.5", "initial.width": "1.5",
        "initial.wavevector": "0.5,0.25", "checks": "local-laws",
    }
    res = sweep(base, "time.dt", ["1e-2", "5e-3", "2.5e-3"], tmp_path)
    assert res.ok and not res.errors
    for check in ("mass-law", "momentum-law"):
        orders = [r.order for r in res.rows if r.check == check and r.order is not None]
        assert len(orders) == 2
        assert all(1.8 <= o <= 2.2 for o in orders), orders
    assert (tmp_path / "sweep.csv").exists()
    assert "order" in sweep_table(res)


def test_n_theta_sweep_converges():
    base = {**SMALL_2D, "grid.n_points": "64", "time.t_final": "0.1", "time.observer_stride": "10",
            "checks": "angular-average"}
    res = sweep(base, "weight.n_theta", ["16", "32", "64"])
    avgs = [res.runs[v].report("angular-average").context["average"] for v in ("16", "32", "64")]
    assert abs(avgs[2] - avgs[1]) / avgs[2] < 5e-3


def test_sweep_continues_after_errors():
    res = sweep({**SMALL_2D, "checks": "conservation"}, "grid.n_points", ["32", "15", "16"])
    assert set(res.errors) == {"15"}
    assert set(res.runs) == {"32", "16"}
    assert not res.ok
    assert "error" in sweep_table(res)


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ConfigError, match="sweepable"):
        sweep(SMALL_2D, "name", ["a"])


# --- CLI ----------------------------------------------------------------------


def _write_cfg(tmp_path, flat):
    path = tmp_path / "s.cfg"
    path.write_text("".join(f"{k} = {v}\n" for k, v in flat.items()))
    return path


def test_cli_run_exit_codes(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, SMALL_2D)
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "check=ftc" in out
    assert cli.main(["run", "--config", str(cfg), "--set", "bogus=1"]) == 2
    assert "bogus" in capsys.readouterr().err
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_run_failure_exit_code(tmp_path):
    # a negative mass tolerance can never be met
    cfg = _write_cfg(tmp_path, {**SMALL_2D, "checks": "conservation", "check.mass_tol": "-1"})
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_cli_sweep(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {**SMALL_2D, "checks": "conservation"})
    code = cli.main(["sweep", "--config", str(cfg), "--axis", "time.dt", "--values", "1e-2,5e-3",
                     "--out", str(tmp_path / "sw")])
    assert code == 0
    assert "mass-drift" in capsys.readouterr().out


def test_cli_selftest(capsys):
    assert cli.main(["selftest"]) == 0
    assert "5/5 passed" in capsys.readouterr().out


def test_cli_verify_fields_reports_pair_norm(capsys):
    # the pair weight's |X| tends to sqrt 2, above the 1 + 3 eps bound
    assert cli.main(["verify-fields", "--count", "200"]) == 1
    out = capsys.readouterr().out
    failing = [line for line in out.splitlines() if "verdict=fail" in line]
    assert len(failing) == 1 and "check=pair3d-norm" in failing[0]


def test_harness_module_exports():
    assert "pair3d" in harness.CHECKS and "time.dt" in harness.SWEEPABLE
