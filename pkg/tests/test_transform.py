import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pendsim.model import FullState
from pendsim.transform import (BETA_GUARD, ReducedState, TransformDomainError, beta_of_omega,
                               full_to_reduced, omega_of_beta, reduced_to_full)

betas = st.floats(-math.pi / 2 + 1e-3, math.pi / 2 - 1e-3)
full_states = st.builds(FullState, st.floats(-5, 5), st.floats(-5, 5),
                        st.floats(-1.5, 1.5), st.floats(-5, 5))


def test_known_values_against_mpmath():
    mpmath.mp.dps = 30
    # Gudermannian function and its inverse
    assert beta_of_omega(1.0) == pytest.approx(float(mpmath.asin(mpmath.tanh(1))), abs=1e-15)
    b = mpmath.pi / 3
    expected = float(mpmath.log(mpmath.sec(b) + mpmath.tan(b)))
    assert omega_of_beta(math.pi / 3) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(1.316957896924816, abs=1e-14)
    assert beta_of_omega(1.0) == pytest.approx(0.8657694832396586, abs=1e-15)


def test_origin_maps_to_origin(ctrl, phys):
    y = full_to_reduced(FullState(0.0, 0.0, 0.0, 0.0), ctrl, phys)
    assert tuple(y) == (0.0, 0.0, 0.0, 0.0)


@given(betas)
def test_omega_is_odd_and_monotone(beta):
    assert omega_of_beta(-beta) == pytest.approx(-omega_of_beta(beta), abs=1e-12)
    assert np.sign(omega_of_beta(beta)) == np.sign(beta)


@given(betas)
def test_beta_round_trip(beta):
    assert beta_of_omega(omega_of_beta(beta)) == pytest.approx(beta, abs=1e-12)


@given(st.floats(-1e6, 1e6))
def test_beta_of_omega_stays_inside(Omega):
    assert abs(beta_of_omega(Omega)) <= math.pi / 2


@settings(max_examples=200)
@given(full_states)
def test_full_reduced_round_trip(x):
    from pendsim.model import default_controller_params, default_physical_params
    ctrl, phys = default_controller_params(), default_physical_params()
    back = reduced_to_full(full_to_reduced(x, ctrl, phys), ctrl, phys)
    scale = 1 + max(abs(v) for v in x) + abs(full_to_reduced(x, ctrl, phys).Omega)
    assert np.allclose(back, x, rtol=0, atol=1e-10 * scale)


@pytest.mark.parametrize("beta", [math.pi / 2, -math.pi / 2, 2.0, math.pi / 2 - BETA_GUARD / 2])
def test_domain_error(beta):
    with pytest.raises(TransformDomainError):
        omega_of_beta(beta)


def test_domain_error_via_full_state(ctrl, phys):
    with pytest.raises(TransformDomainError):
        full_to_reduced(FullState(0, 0, math.pi / 2, 0), ctrl, phys)


def test_reduced_state_fields():
    y = ReducedState(1, 2, 3, 4)
    assert (y.s, y.gamma, y.Omega, y.OmegaDot) == (1, 2, 3, 4)
