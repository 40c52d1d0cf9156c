"""Closed-loop vector fields in the reduced chart.

Three systems are provided: the four-state relay loop, its restriction to
the switching surface gamma = 0, and the six-state loop in which the
velocities are replaced by first-order observer estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .control import _component_tuple
from .model import ControllerParams, DerivedConstants, PhysicalParams
from .transform import ReducedState

__all__ = [
    "Disturbance",
    "SingularState",
    "SlidingInfeasibleError",
    "disturbance_eval",
    "reduced_gamma_dot",
    "reduced_rhs",
    "equivalent_control",
    "sliding_rhs",
    "singular_rhs",
    "singular_accelerations",
]


class SlidingInfeasibleError(ValueError):
    """Equivalent control would exceed the relay amplitude."""


@dataclass(frozen=True)
class Disturbance:
    """Bounded cart disturbance D(t)."""

    kind: str = "zero"  # zero | constant | sinusoid
    value: float = 0.0
    amplitude: float = 0.0
    angular_frequency: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "sinusoid"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")

    @classmethod
    def zero(cls) -> Disturbance:
        return cls("zero")

    @classmethod
    def constant(cls, value: float) -> Disturbance:
        return cls("constant", value=value)

    @classmethod
    def sinusoid(
        cls, amplitude: float = 1.0, angular_frequency: float = 1.0, phase: float = 0.0
    ) -> Disturbance:
        return cls("sinusoid", amplitude=amplitude,
                   angular_frequency=angular_frequency, phase=phase)

    @property
    def bound(self) -> float:
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "sinusoid":
            return abs(self.amplitude)
        return 0.0

    def __call__(self, t: float) -> float:
        if self.kind == "sinusoid":
            return self.amplitude * math.sin(self.angular_frequency * t + self.phase)
        if self.kind == "constant":
            return self.value
        return 0.0


def disturbance_eval(d: Disturbance, t: float) -> float:
    return d(t)


class SingularState(NamedTuple):
    x: ReducedState
    z1: float
    z2: float
    mu: float

    def as_array(self) -> np.ndarray:
        return np.array([*self.x, self.z1, self.z2])


def _omega_ddot(s, gamma, Omega, OmegaDot, gamma_dot, ctrl, phys, consts):
    """Return (sdot, OmegaDDot, beta, psi, psidot) given gamma_dot."""
    beta = math.atan(math.sinh(Omega))
    cb, sb = math.cos(beta), math.sin(beta)
    L = phys.L
    psi = phys.M * phys.I - (L * cb) ** 2
    psidot = L * L * math.sin(2.0 * beta) * OmegaDot * cb
    sdot = gamma / psi - ctrl.alpha * s
    Odd = (
        -consts.d1 * OmegaDot
        - consts.d2 * sb / cb
        - consts.d3 * OmegaDot * OmegaDot * sb
        + (L * (gamma_dot * psi - gamma * psidot) / (psi * psi)
           + (phys.kappa - ctrl.alpha * L) * sdot) / consts.denom
    )
    return sdot, Odd, beta, psi, psidot


def reduced_gamma_dot(gamma: float, delta_u: float, D: float,
                      ctrl: ControllerParams, consts: DerivedConstants) -> float:
    return -ctrl.a * gamma - consts.A * delta_u - consts.B * D


def reduced_rhs(
    y: ReducedState,
    delta_u: float,
    D: float,
    ctrl: ControllerParams,
    phys: PhysicalParams,
    consts: DerivedConstants,
) -> np.ndarray:
    s, gamma, Omega, OmegaDot = (float(v) for v in y)
    gd = -ctrl.a * gamma - consts.A * delta_u - consts.B * D
    sdot, Odd, *_ = _omega_ddot(s, gamma, Omega, OmegaDot, gd, ctrl, phys, consts)
    return np.array([sdot, gd, OmegaDot, Odd])


def equivalent_control(
    y: ReducedState, D: float, ctrl: ControllerParams, consts: DerivedConstants
) -> float:
    """Relay value that makes gamma_dot vanish at the current state."""
    if consts.A == 0:
        raise SlidingInfeasibleError("no relay authority (A = 0)")
    return (-ctrl.a * y[1] - consts.B * D) / consts.A


def sliding_rhs(
    y: ReducedState,
    D: float,
    ctrl: ControllerParams,
    phys: PhysicalParams,
    consts: DerivedConstants,
    strict: bool = True,
) -> np.ndarray:
    """Motion on gamma = 0 under the equivalent control.

    The gamma component of the state is treated as exactly zero. With
    ``strict=False`` the admissibility check is skipped; integrators need
    that because trial stages may overshoot the exit point.
    """
    du = -consts.B * D / consts.A if consts.A else math.inf
    if strict and not abs(du) <= ctrl.PiBar:
        raise SlidingInfeasibleError(
            f"|B*D/A| = {abs(du)!r} exceeds PiBar = {ctrl.PiBar!r}"
        )
    s, _, Omega, OmegaDot = y
    sdot, Odd, *_ = _omega_ddot(s, 0.0, Omega, OmegaDot, 0.0, ctrl, phys, consts)
    return np.array([sdot, 0.0, OmegaDot, Odd])


def singular_accelerations(
    state: np.ndarray,
    ctrl: ControllerParams,
    phys: PhysicalParams,
    consts: DerivedConstants,
    D: float = 0.0,
    delta_u: float = 0.0,
) -> tuple[float, float, float, float, float]:
    """Return (gamma_dot, OmegaDDot, rddot, betaddot, sdot) for a six-state vector."""
    s, gamma, Omega, OmegaDot, z1, z2 = (float(v) for v in state)
    beta = math.atan(math.sinh(Omega))
    cb = math.cos(beta)
    L, rho, alpha = phys.L, ctrl.rho, ctrl.alpha
    psi = phys.M * phys.I - (L * cb) ** 2
    sdot = gamma / psi - alpha * s
    betadot = OmegaDot * cb
    rdot = sdot - rho * OmegaDot

    exact = _component_tuple(rdot, beta, betadot, sdot, s, ctrl.a, rho)
    zh1, zh2 = rdot + z1, betadot + z2
    est = _component_tuple(zh1, beta, zh2, zh1 + rho * zh2 / cb, s, ctrl.a, rho)
    mismatch = sum(g * (e - x) for g, e, x in zip(consts.gains, est, exact))

    gd = -ctrl.a * gamma - consts.A * (mismatch + delta_u) - consts.B * D
    sdot, Odd, beta, psi, psidot = _omega_ddot(
        s, gamma, Omega, OmegaDot, gd, ctrl, phys, consts
    )
    sddot = (gd * psi - gamma * psidot) / (psi * psi) - alpha * sdot
    rdd = sddot - rho * Odd
    bdd = Odd * cb - OmegaDot * OmegaDot * math.sin(beta) * cb
    return gd, Odd, rdd, bdd, sdot


def singular_rhs(
    w: SingularState,
    ctrl: ControllerParams,
    phys: PhysicalParams,
    consts: DerivedConstants,
    D: float = 0.0,
    delta_u: float = 0.0,
    mu2: float | None = None,
) -> np.ndarray:
    """Six-state loop with observer errors z = zhat - true velocity.

    ``mu2`` splits the small parameter as mu*dz/dt = -z - mu2*f; it
    defaults to ``w.mu``.
    """
    if not w.mu > 0:
        raise ValueError(f"mu must be > 0, got {w.mu!r}")
    return _singular_field(w.as_array(), w.mu, w.mu if mu2 is None else mu2,
                           ctrl, phys, consts, D, delta_u)


def _singular_field(state, mu, mu2, ctrl, phys, consts, D, delta_u):
    gd, Odd, rdd, bdd, sdot = singular_accelerations(state, ctrl, phys, consts, D, delta_u)
    z1, z2 = float(state[4]), float(state[5])
    return np.array([
        sdot,
        gd,
        float(state[3]),
        Odd,
        (-z1 - mu2 * rdd) / mu,
        (-z2 - mu2 * bdd) / mu,
    ])
