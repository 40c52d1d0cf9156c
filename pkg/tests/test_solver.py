import math

import numpy as np
import pytest

from pendsim.solver import (HybridSystem, IntegrationError, Mode, SolverOptions, dense_eval,
                            integrate, integrate_smooth)


def _scalar_relay(A, c, PiBar=1.0):
    """gamma' = -A*du + c(t); the second component is a clock."""
    return HybridSystem(
        field=lambda t, y, du: np.array([-A * du + c(t), 1.0]),
        gamma_index=0,
        gamma_dot=lambda t, y, du: -A * du + c(t),
        relay_gain=A,
        PiBar=PiBar,
    )


def test_harmonic_oscillator():
    opts = SolverOptions(t_end=10.0, record_dt=0.1)
    traj = integrate_smooth(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], opts)
    assert len(traj.t) == 101
    assert np.max(np.abs(traj.y[:, 0] - np.cos(traj.t))) < 1e-7
    for t in (0.123, 4.567, 9.999):
        assert dense_eval(traj, t)[1] == pytest.approx(-math.sin(t), abs=1e-7)


def test_tolerance_controls_error():
    errs = []
    for rtol in (1e-4, 1e-6, 1e-8):
        opts = SolverOptions(t_end=20.0, record_dt=0.5, rtol=rtol, atol=rtol, max_step=20.0)
        traj = integrate_smooth(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], opts)
        errs.append(np.max(np.abs(traj.y[:, 0] - np.cos(traj.t))))
    assert errs[0] > errs[1] > errs[2]


def test_dense_eval_outside_span():
    traj = integrate_smooth(lambda t, y: -y, [1.0], SolverOptions(t_end=1.0, record_dt=0.5))
    with pytest.raises(ValueError):
        dense_eval(traj, 1.5)


def test_sliding_entry_time_and_surface_hold():
    sys_ = _scalar_relay(0.05, lambda t: 0.02)
    traj = integrate(sys_, np.array([0.5, 0.0]), SolverOptions(t_end=20.0, record_dt=0.01))
    hit = 0.5 / 0.03
    (start, end), = traj.sliding_intervals()
    assert start == pytest.approx(hit, abs=1e-8)
    assert end == traj.t_final == pytest.approx(20.0)
    sliding = np.array(traj.mode) == "sliding"
    assert sliding.any() and np.max(np.abs(traj.y[sliding, 0])) <= 1e-8
    assert np.allclose(traj.delta_u[sliding], 0.4)
    assert set(traj.mode) == {"regular+", "sliding"}
    assert traj.y[-1, 1] == pytest.approx(20.0)


def test_crossing_without_sliding():
    sys_ = _scalar_relay(0.05, lambda t: -0.1)
    traj = integrate(sys_, np.array([0.5, 0.0]), SolverOptions(t_end=6.0, record_dt=0.01))
    assert not traj.sliding_intervals()
    hits = [e.t for e in traj.events if e.kind == "surface_hit"]
    assert hits and hits[0] == pytest.approx(0.5 / 0.15, abs=1e-8)
    assert traj.mode[-1] == "regular-"
    # exact piecewise-linear solution after the crossing
    assert traj.y[-1, 0] == pytest.approx(-0.05 * (6.0 - 0.5 / 0.15), abs=1e-8)


def test_sliding_exit_when_equivalent_control_saturates():
    sys_ = _scalar_relay(0.05, lambda t: 0.02 + 0.01 * t)
    traj = integrate(sys_, np.array([0.01, 0.0]), SolverOptions(t_end=5.0, record_dt=0.01))
    (start, end), = traj.sliding_intervals()
    assert end == pytest.approx(3.0, abs=1e-6)
    # c(t) outgrows the relay, gamma leaves on the positive side
    assert traj.mode[-1] == "regular+"
    assert np.all(traj.y[traj.t > 3.05, 0] > 0)


def test_no_relay_authority_is_smooth():
    sys_ = _scalar_relay(0.0, lambda t: -0.1)
    traj = integrate(sys_, np.array([0.5, 0.0]), SolverOptions(t_end=10.0, record_dt=0.5))
    assert traj.y[-1, 0] == pytest.approx(-0.5)
    assert set(traj.mode) == {"regular"}


def test_escape_marks_divergence():
    traj = integrate_smooth(lambda t, y: y * y, [1.0], SolverOptions(t_end=2.0, record_dt=0.1))
    assert traj.diverged and traj.t_final < 1.0


@pytest.mark.parametrize("change", [dict(rtol=0.0), dict(record_dt=50.0),
                                    dict(event_tol=1e-6, sliding_band=1e-8),
                                    dict(layer_time=-1.0)])
def test_option_validation(change):
    with pytest.raises(ValueError):
        SolverOptions(**change).validate()


def test_records_and_labels():
    assert SolverOptions().n_records == 3001
    assert Mode("regular", 1).label == "regular+"
    assert Mode("sliding").label == "sliding"
    assert issubclass(IntegrationError, RuntimeError)
