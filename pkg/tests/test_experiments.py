from dataclasses import replace

import numpy as np
import pytest

from pendsim.dynamics import Disturbance
from pendsim.experiments import (ConfigError, ScenarioConfig, basin_probe, build_constants,
                                 compare_models, full_gamma_dot, parse_grid, run_scenario,
                                 sweep_mu, worker_count)
from pendsim.io import load_scenario
from pendsim.model import ControllerParams, FullState, PhysicalParams, accelerations
from pendsim.solver import SolverOptions

SHORT = SolverOptions(t_end=2.0, record_dt=0.01)


def test_origin_run_has_zero_amplitude():
    cfg = ScenarioConfig(y0=(0.0, 0.0, 0.0, 0.0), amplitude_t_min=1.0, solver=SHORT)
    traj, report, summary = run_scenario(cfg)
    assert summary.max_steady_amplitude == 0.0
    assert summary.settling_time == 0.0
    assert report.violations == []


def test_summary_amplitudes_nonnegative():
    traj, _, summary = run_scenario(replace(load_scenario("sinusoid"), solver=SHORT,
                                            amplitude_t_min=1.0))
    assert np.all(summary.steady_amplitude >= 0)
    assert traj.columns["W"].shape == traj.t.shape


def test_observer_run_has_composite_column():
    cfg = replace(load_scenario("observer"), solver=SHORT)
    traj, report, _ = run_scenario(cfg)
    assert report.W_rho is not None
    assert np.allclose(traj.columns["W_rho"], report.W_rho)


def test_full_model_columns():
    cfg = replace(load_scenario("full_plant"), solver=SHORT)
    traj, report, _ = run_scenario(cfg)
    assert np.allclose(traj.columns["beta"], traj.y[:, 2])
    assert np.allclose(traj.columns["r"], traj.y[:, 0])


@pytest.mark.parametrize("change,field", [
    (dict(model="hybrid"), "model"),
    (dict(y0=(0.0, 0.0)), "y0"),
    (dict(model="singular"), "mu"),
    (dict(consts_override={"q": 3.0}), "consts_override"),
    (dict(model="full", consts_override={"d1": 2.0}), "consts_override"),
    (dict(disturbance=Disturbance.sinusoid(2.0)), "disturbance"),
    (dict(phys=PhysicalParams(M=-1.0)), "phys"),
    (dict(ctrl=ControllerParams(rho=0.1)), "ctrl"),
])
def test_config_validation(change, field):
    with pytest.raises(ConfigError) as info:
        replace(ScenarioConfig(), **change).validate()
    assert field in info.value.errors


def test_full_gamma_dot_matches_finite_difference(ctrl, phys):
    from pendsim.transform import full_to_reduced
    x = np.array([0.3, -0.2, 0.8, 0.4])
    u, D = 0.7, 0.1
    rdd, bdd = accelerations(FullState(*x), u, D, phys)
    f = np.array([x[1], rdd, x[3], bdd])
    h = 1e-6
    gp = full_to_reduced(FullState(*(x + h * f)), ctrl, phys).gamma
    gm = full_to_reduced(FullState(*(x - h * f)), ctrl, phys).gamma
    assert full_gamma_dot(x, u, D, ctrl, phys) == pytest.approx((gp - gm) / (2 * h), abs=1e-7)


def test_build_constants_applies_overrides():
    cfg = load_scenario("relay")
    c = build_constants(cfg)
    assert c.A == 0.03 and c.B == 0.0 and c.d1 == 1.0


def test_parse_grid():
    assert parse_grid("omega=-3:3:9, omega_dot=-1:1:3") == {
        "omega": (-3.0, 3.0, 9), "omega_dot": (-1.0, 1.0, 3)}
    for bad in ("omega=1:2", "theta=0:1:2", "", "omega=a:b:c"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_compare_tolerance_convergence():
    """Deviation shrinks with the integrator tolerance (per decade)."""
    base = load_scenario("full_plant")
    devs = []
    for rtol in (1e-7, 1e-9):
        cfg = replace(base, solver=replace(base.solver, rtol=rtol, atol=rtol * 1e-2))
        devs.append(compare_models(cfg).deviation)
    assert devs[1] < devs[0] / 10


def test_compare_needs_full_model():
    with pytest.raises(ConfigError):
        compare_models(load_scenario("relay"))


def test_sweep_rejects_bad_input():
    with pytest.raises(ConfigError):
        sweep_mu(load_scenario("relay"), [0.1])
    with pytest.raises(ConfigError):
        sweep_mu(load_scenario("observer"), [0.1, 0.0])


def test_small_sweep_order():
    cfg = replace(load_scenario("observer"), solver=replace(SHORT, t_end=5.0))
    rows = sweep_mu(cfg, [0.01, 0.1])
    assert [r.mu for r in rows] == [0.1, 0.01]
    assert rows[0].deviation > rows[1].deviation > 0


def test_small_basin_probe():
    cfg = load_scenario("observer")
    res = basin_probe(cfg, "omega=-1:1:3,omega_dot=-1:1:3", t_end=20.0, mu=0.03, workers=1)
    assert res.converged.shape == (9,)
    assert res.n_converged == 9
    assert res.radius == pytest.approx(res.levels.max())
    # observer errors start at minus the true velocities
    assert np.all(res.initial_states[:, :2] == np.array(cfg.y0[:2]))


def test_worker_count(monkeypatch):
    monkeypatch.setenv("PENDSIM_THREADS", "1")
    assert worker_count() == 1
    assert worker_count(3) == 3
    monkeypatch.setenv("PENDSIM_THREADS", "junk")
    assert worker_count() >= 1
