import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from pendsim import lyapunov
from pendsim.lyapunov import V, W, W_z, composite, monitor, observer_weight_matrix


def test_W_examples(consts):
    q, r = consts.q, consts.r_const
    assert W(0.0, 0.0, q, r) == 0.0
    assert W(0.0, 1.0, q, r) == pytest.approx(1.0)
    assert W(1.0, 0.0, q, r) == pytest.approx(r * (math.cosh(1.0) ** (q - 1) - 1))
    assert W(1.0, 2.0, q, r) == pytest.approx(4 * math.cosh(1.0) ** (q - 2)
                                              + r * (math.cosh(1.0) ** (q - 1) - 1))


def test_W_small_arguments_stay_positive(consts):
    assert W(1e-9, 0.0, consts.q, consts.r_const) > 0


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_W_positive_definite(O, Od):
    # squares below the smallest subnormal round to zero; not a property of W
    assume(O == 0 or abs(O) > 1e-150)
    assume(Od == 0 or abs(Od) > 1e-150)
    w = W(O, Od, 4.0, 2 / 3)
    if O == 0 and Od == 0:
        assert w == 0
    else:
        assert w > 0


def test_W_grid(consts):
    O, Od = np.meshgrid(np.linspace(-3, 3, 200), np.linspace(-3, 3, 200))
    assert np.all(W(O, Od, consts.q, consts.r_const) > 0)


def test_V():
    assert V(0.3, -2.0, 0.1) == pytest.approx(0.09 + 0.4)


def test_observer_weight_matrix():
    assert np.allclose(observer_weight_matrix(), np.eye(2) / 2)
    G = np.array([[2.0, 1.0], [0.0, 3.0]])
    B = observer_weight_matrix(G)
    assert np.allclose(G.T @ B + B @ G, np.eye(2))
    assert np.allclose(B, B.T) and np.all(np.linalg.eigvalsh(B) > 0)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(1e-3, 1.0))
def test_W_z_boundary_layer_decay(z1, z2, mu):
    z = np.array([z1, z2])
    zdot = -z / mu
    h = 1e-7 * mu
    fd = (W_z(*(z + h * zdot)) - W_z(*(z - h * zdot))) / (2 * h)
    assert fd == pytest.approx(-(z1 * z1 + z2 * z2) / mu, rel=1e-6, abs=1e-9)


def test_composite(ctrl, consts):
    w = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
    expected = V(0.1, 0.2, ctrl.k) + W(0.3, 0.4, consts.q, consts.r_const) + 2.0 * W_z(0.5, 0.6)
    assert composite(w, ctrl, consts, 2.0) == pytest.approx(expected)


def test_comparison_functions(ctrl, consts):
    psi_cmp, eta = lyapunov.comparison_functions((1.0, 2.0, 0.0, 3.0), ctrl, consts)
    assert psi_cmp == pytest.approx(ctrl.epsilon * 5.0)
    assert eta == pytest.approx(2 * ctrl.a * 9.0)


def _fake(y, D=None, mode=None):
    n = len(y)
    return SimpleNamespace(t=np.linspace(0, 1, n), y=np.asarray(y, float),
                           D=np.zeros(n) if D is None else D,
                           mode=["regular"] * n if mode is None else mode)


def test_monitor_clean_decay(ctrl, consts):
    t = np.linspace(0, 1, 50)
    y = np.exp(-t)[:, None] * np.array([0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
    rep = monitor(_fake(y), ctrl, consts)
    assert rep.violations == []
    assert np.all(rep.dW_rho_dt < 0)


def test_monitor_flags_injected_increase(ctrl, consts):
    t = np.linspace(0, 1, 50)
    y = np.exp(-t)[:, None] * np.full(6, 0.1)
    y[30, 4] = 1.0  # fault: observer error jumps up
    rep = monitor(_fake(y), ctrl, consts)
    assert [v.condition for v in rep.violations] == ["W_rho_nonincreasing"]
    assert rep.violations[0].t == pytest.approx(t[30])


def test_monitor_ignores_forced_and_sliding_stretches(ctrl, consts):
    t = np.linspace(0, 1, 50)
    y = np.exp(-t)[:, None] * np.full(6, 0.1)
    y[30, 4] = 1.0
    D = np.zeros(50)
    D[29:32] = 0.1
    assert monitor(_fake(y, D=D), ctrl, consts).violations == []
    mode = ["regular"] * 50
    mode[30] = "sliding"
    assert monitor(_fake(y, mode=mode), ctrl, consts).violations == []


def test_monitor_flags_negative_W(ctrl, consts):
    y = np.zeros((5, 4))
    bad = consts.with_overrides()
    object.__setattr__(bad, "r_const", -1.0)  # fault: non-positive constant
    y[2] = (0, 0, 1.0, 0)
    rep = monitor(_fake(y), ctrl, bad)
    assert [v.condition for v in rep.violations] == ["W_nonnegative"]


def test_monitor_needs_three_records(ctrl, consts):
    with pytest.raises(ValueError):
        monitor(_fake(np.zeros((2, 4))), ctrl, consts)
