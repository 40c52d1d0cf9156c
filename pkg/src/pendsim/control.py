"""Stabilizing feedback, relay correction and observer-based control terms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ControllerParams, DerivedConstants, FullState, PhysicalParams
from .transform import BETA_GUARD, ReducedState, TransformDomainError, full_to_reduced

__all__ = [
    "RelayOutput",
    "ControlBreakdown",
    "u_components",
    "observer_components",
    "u_bar",
    "tabulated_u_bar",
    "relay",
    "stabilizing_control",
]


@dataclass(frozen=True)
class RelayOutput:
    """Value of PiBar * sign(gamma).

    On the switching surface the sign is set-valued; ``value`` is then
    ``None`` and ``interval`` gives the admissible range.
    """

    kind: str  # "saturated" or "set_valued"
    sign: int
    PiBar: float

    @property
    def value(self) -> float | None:
        if self.kind == "set_valued":
            return None
        return self.sign * self.PiBar

    @property
    def interval(self) -> tuple[float, float]:
        if self.kind == "set_valued":
            return (-self.PiBar, self.PiBar)
        v = self.sign * self.PiBar
        return (v, v)


@dataclass(frozen=True)
class ControlBreakdown:
    u_components: np.ndarray
    u_bar: float
    delta_u: float

    @property
    def total(self) -> float:
        return self.u_bar + self.delta_u


def _components(
    rdot: float, beta: float, betadot: float, sdot: float, s: float, a: float, rho: float
) -> np.ndarray:
    return np.array(_component_tuple(rdot, beta, betadot, sdot, s, a, rho))


def _component_tuple(rdot, beta, betadot, sdot, s, a, rho):
    if not abs(beta) < math.pi / 2 - BETA_GUARD:
        raise TransformDomainError(f"beta too close to +-pi/2: {beta!r}")
    cb, sb = math.cos(beta), math.sin(beta)
    c2 = cb * cb
    s2b = math.sin(2.0 * beta)
    bd2 = betadot * betadot
    return (
        rdot,
        rdot * c2,
        bd2 * sb,
        betadot * cb,
        s2b,
        betadot / cb,
        sb / cb,
        a * sdot + rho * bd2 * sb / c2,
        (betadot * s2b - a * c2) * sdot - rho * bd2 * sb,
        sdot + a * s,
        # (p + a)(s cos^2 beta), differentiated along the motion
        (sdot + a * s) * c2 - s * s2b * betadot,
    )


def u_components(
    x: FullState,
    y: ReducedState | None,
    ctrl: ControllerParams,
    phys: PhysicalParams,
) -> np.ndarray:
    """The eleven basis functions u_1..u_11 of the stabilizing law."""
    if y is None:
        y = full_to_reduced(x, ctrl, phys)
    sdot = x.rdot + ctrl.rho * y.OmegaDot
    return _components(x.rdot, x.beta, x.betadot, sdot, y.s, ctrl.a, ctrl.rho)


def observer_components(
    x_meas: tuple[float, float],
    zhat: tuple[float, float],
    y: ReducedState,
    ctrl: ControllerParams,
    phys: PhysicalParams,
) -> np.ndarray:
    """Basis functions with velocities replaced by observer estimates.

    ``x_meas`` = (r, beta) is measured exactly; ``zhat`` = (rdot, betadot)
    estimates. The sdot estimate is zhat1 + rho*zhat2/cos(beta).
    """
    _, beta = x_meas
    z1, z2 = zhat
    z3 = z1 + ctrl.rho * z2 / math.cos(beta)
    return _components(z1, beta, z2, z3, y.s, ctrl.a, ctrl.rho)


def u_bar(components: np.ndarray, consts: DerivedConstants) -> float:
    """Stabilizing control sum(gain_i * u_i)."""
    return float(np.dot(consts.gains, components))


def tabulated_u_bar(components: np.ndarray, consts: DerivedConstants) -> float:
    """sum(lam_i * u_i) with the coefficients as tabulated.

    Kept for comparison only; it does not cancel the gamma dynamics.
    """
    return float(np.dot(consts.lam, components))


def relay(gamma: float, PiBar: float, tol: float = 0.0) -> RelayOutput:
    if gamma > tol:
        return RelayOutput("saturated", 1, PiBar)
    if gamma < -tol:
        return RelayOutput("saturated", -1, PiBar)
    return RelayOutput("set_valued", 0, PiBar)


def stabilizing_control(
    x: FullState,
    ctrl: ControllerParams,
    phys: PhysicalParams,
    consts: DerivedConstants,
    delta_u: float = 0.0,
) -> ControlBreakdown:
    comps = u_components(x, None, ctrl, phys)
    return ControlBreakdown(comps, u_bar(comps, consts), delta_u)
