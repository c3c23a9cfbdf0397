import numpy as np
import pytest
from numpy.testing import assert_allclose

from morawetz.evolve import (
    DiagnosticTrace,
    SolverConfig,
    Stepper,
    evolve,
    free_gaussian_reference,
    gaussian,
    random_band_limited,
    strang_step,
)
from morawetz.grid import ComplexField, l2_norm, make_grid
from morawetz.laws import conserved_integrals


@pytest.mark.parametrize(
    "kwargs",
    [dict(p=0.5), dict(dt=0.0), dict(dt=-1e-3), dict(dt=2.0, t_final=1.0), dict(observer_stride=0)],
)
def test_solver_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_n_steps_requires_multiple():
    assert SolverConfig(dt=2e-3, t_final=2.0).n_steps == 1000
    with pytest.raises(ValueError, match="multiple"):
        SolverConfig(dt=3e-3, t_final=1.0).n_steps


def test_trace_record_rules():
    tr = DiagnosticTrace()
    tr.record(0.0, {"a": 1.0})
    tr.record(0.5, {"a": 2.0})
    with pytest.raises(ValueError):
        tr.record(0.5, {"a": 3.0})
    with pytest.raises(ValueError):
        tr.record(1.0, {"b": 3.0})
    with pytest.raises(KeyError):
        tr.channel("b")
    assert len(tr) == 2
    assert_allclose(tr.channel("a"), [1.0, 2.0])


def test_plane_wave_linear_phase():
    g = make_grid(2, 16, 2 * np.pi)
    x, y = g.coords
    k = np.array([3.0, -2.0])
    u = ComplexField(g, np.exp(1j * (k[0] * x + k[1] * y)))
    dt = 0.013
    out = strang_step(u, dt, 3, coupling=0.0)
    assert_allclose(out.values, u.values * np.exp(1j * 13 * dt), atol=1e-12)


def test_nonlinear_substep_preserves_modulus(moving_gaussian2):
    st = Stepper(moving_gaussian2.grid, 1e-2, 3.0)
    after = st._nonlinear(moving_gaussian2.values, 5e-3)
    assert_allclose(np.abs(after), np.abs(moving_gaussian2.values), rtol=1e-14)


@pytest.mark.parametrize("coupling", [1.0, -1.0, 0.0])
def test_step_preserves_mass(moving_gaussian2, coupling):
    out = strang_step(moving_gaussian2, 1e-2, 3, coupling)
    assert_allclose(l2_norm(out), l2_norm(moving_gaussian2), rtol=1e-12)


def test_negative_step_inverts(moving_gaussian2):
    fwd = strang_step(moving_gaussian2, 7e-3, 3)
    back = strang_step(fwd, -7e-3, 3)
    assert_allclose(back.values, moving_gaussian2.values, atol=1e-13)


def test_zero_dt_rejected(moving_gaussian2):
    with pytest.raises(ValueError):
        strang_step(moving_gaussian2, 0.0, 3)


def test_free_gaussian_reference_basics():
    g = make_grid(2, 64, 20.0)
    assert_allclose(free_gaussian_reference(g, 0.0, 1.3).values, gaussian(g, 1.0, 1.3).values, atol=1e-15)
    n0 = l2_norm(free_gaussian_reference(g, 0.0, 1.3))
    assert_allclose(l2_norm(free_gaussian_reference(g, 0.4, 1.3)), n0, rtol=1e-12)


def test_linear_run_matches_free_gaussian():
    g = make_grid(2, 128, 32.0)
    cfg = SolverConfig(p=3, dt=1e-2, t_final=1.0, observer_stride=50, coupling=0.0)
    tr = evolve(gaussian(g, 1.0, 1.0), cfg)
    ref = free_gaussian_reference(g, 1.0, 1.0)
    err = l2_norm(ComplexField(g, tr.final_state.values - ref.values)) / l2_norm(ref)
    assert err <= 1e-8


def test_strang_is_second_order():
    g = make_grid(2, 32, 12.0)
    u0 = gaussian(g, 1.5, 1.0, (0.3, 0.0), (0.5, 0.2))
    ref = evolve(u0, SolverConfig(dt=1.25e-3, t_final=0.4, observer_stride=1000)).final_state
    errs = []
    for dt in (2e-2, 1e-2, 5e-3):
        out = evolve(u0, SolverConfig(dt=dt, t_final=0.4, observer_stride=1000)).final_state
        errs.append(l2_norm(ComplexField(g, out.values - ref.values)))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8)


def test_observer_schedule_and_zero_data():
    g = make_grid(1, 16, 8.0)
    cfg = SolverConfig(dt=0.1, t_final=1.0, observer_stride=3)
    tr = evolve(ComplexField.zeros(g), cfg, {"mass": lambda f, t: l2_norm(f) ** 2})
    assert_allclose(tr.t, [0.0, 0.3, 0.6, 0.9, 1.0])
    assert np.all(tr.channel("mass") == 0)
    assert not tr.aborted


def test_mapping_observer_and_snapshots(moving_gaussian2):
    cfg = SolverConfig(dt=0.05, t_final=0.2, observer_stride=2)

    def obs(f, t):
        ci = conserved_integrals(f, 3)
        return {"mass": ci.mass, "energy": ci.energy}

    tr = evolve(moving_gaussian2, cfg, {"ci": obs}, store_snapshots=True)
    assert set(tr.channels) == {"mass", "energy"}
    assert sorted(tr.snapshots) == list(tr.t)


def test_blow_up_aborts_with_partial_trace():
    g = make_grid(1, 16, 8.0)
    u0 = gaussian(g, 1e160, 1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        tr = evolve(u0, SolverConfig(dt=0.1, t_final=1.0), {"m": lambda f, t: 0.0})
    assert tr.aborted
    assert "step 1" in tr.abort_reason
    assert len(tr) == 1


def test_random_band_limited_is_deterministic_and_band_limited():
    g = make_grid(2, 16, 6.0)
    a = random_band_limited(g, 11, 3, amplitude=2.0)
    b = random_band_limited(g, 11, 3, amplitude=2.0)
    assert_allclose(a.values, b.values)
    assert_allclose(np.max(np.abs(a.values)), 2.0)
    idx = np.fft.fftfreq(16, 1 / 16)
    outside = (np.abs(idx)[:, None] > 3) | (np.abs(idx)[None, :] > 3)
    assert np.max(np.abs(a.spectrum[outside])) < 1e-12 * np.max(np.abs(a.spectrum))
    with pytest.raises(ValueError):
        random_band_limited(g, 0, 8)
