"""Change of variables between the physical chart (r, rdot, beta, betadot)
and the reduced chart (s, gamma, Omega, OmegaDot)."""

from __future__ import annotations

import math
from typing import NamedTuple

from .model import ControllerParams, FullState, PhysicalParams, psi

__all__ = [
    "ReducedState",
    "TransformDomainError",
    "BETA_GUARD",
    "omega_of_beta",
    "beta_of_omega",
    "full_to_reduced",
    "reduced_to_full",
]

# distance from +-pi/2 inside which the angle chart is considered singular
BETA_GUARD = 1e-9


class TransformDomainError(ValueError):
    """Raised for pendulum angles at or beyond the horizontal."""


class ReducedState(NamedTuple):
    s: float
    gamma: float
    Omega: float
    OmegaDot: float


def _check_beta(beta: float) -> None:
    if not (abs(beta) < math.pi / 2 - BETA_GUARD):
        raise TransformDomainError(
            f"|beta| must be below pi/2 - {BETA_GUARD:g}, got beta = {beta!r}"
        )


def omega_of_beta(beta: float) -> float:
    _check_beta(beta)
    return math.asinh(math.tan(beta))


def beta_of_omega(Omega: float) -> float:
    try:
        return math.atan(math.sinh(Omega))
    except OverflowError:
        return math.copysign(math.pi / 2, Omega)


def full_to_reduced(
    x: FullState, ctrl: ControllerParams, phys: PhysicalParams
) -> ReducedState:
    r, rdot, beta, betadot = x
    Omega = omega_of_beta(beta)
    OmegaDot = betadot / math.cos(beta)
    s = r + ctrl.rho * Omega
    sdot = rdot + ctrl.rho * OmegaDot
    gamma = psi(beta, phys) * (sdot + ctrl.alpha * s)
    return ReducedState(s, gamma, Omega, OmegaDot)


def reduced_to_full(
    y: ReducedState, ctrl: ControllerParams, phys: PhysicalParams
) -> FullState:
    """Inverse of :func:`full_to_reduced`; sdot is recovered as gamma/psi - alpha*s."""
    s, gamma, Omega, OmegaDot = y
    beta = beta_of_omega(Omega)
    betadot = OmegaDot * math.cos(beta)
    sdot = gamma / psi(beta, phys) - ctrl.alpha * s
    return FullState(
        r=s - ctrl.rho * Omega,
        rdot=sdot - ctrl.rho * OmegaDot,
        beta=beta,
        betadot=betadot,
    )
