"""Physical model of the inverted pendulum on a cart.

Holds the plant and controller parameters, the constants derived from them,
and the full-coordinate vector field obtained by solving the 2x2 mass-matrix
system for the cart and pendulum accelerations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

__all__ = [
    "PhysicalParams",
    "ControllerParams",
    "DerivedConstants",
    "FullState",
    "ParameterError",
    "DegenerateSystemError",
    "derive_constants",
    "psi",
    "psi_time_derivative",
    "accelerations",
    "full_rhs",
    "default_physical_params",
    "default_controller_params",
]

_DET_FLOOR = 1e-300


class ParameterError(ValueError):
    """Raised when a parameter set violates a model invariant."""


class DegenerateSystemError(ArithmeticError):
    """Raised when the mass matrix determinant psi(beta) vanishes."""


@dataclass(frozen=True)
class PhysicalParams:
    """Plant coefficients.

    ``L`` is the coupling m*l, ``I`` the pendulum inertia J + m*l**2 and
    ``c`` the rotational damping c0 + kappa*l. ``Pi`` bounds the cart
    disturbance, |D(t)| <= Pi.
    """

    M: float = 1.5
    L: float = 1.0
    I: float = 1.0
    N: float = 1.0
    kappa: float = 1.0
    c: float = 1.0
    G: float = 1.0
    g: float = 1.0
    Pi: float = 1.0

    def validate(self) -> None:
        for name in ("M", "I", "L", "N", "kappa", "G", "g"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.c)):
            raise ParameterError(f"c must be finite, got {self.c!r}")
        if not (math.isfinite(self.Pi) and self.Pi >= 0):
            raise ParameterError(f"Pi must be finite and >= 0, got {self.Pi!r}")
        if self.M * self.I - self.L**2 <= 0:
            raise ParameterError(
                f"M*I - L**2 must be > 0 (got {self.M * self.I - self.L ** 2!r})"
            )


@dataclass(frozen=True)
class ControllerParams:
    """Controller and Lyapunov-analysis parameters.

    ``A_gain`` / ``B_gain`` override the derived relay and disturbance
    channel gains when not ``None`` (reduced and singular models only).
    """

    a: float = 0.5
    alpha: float = 1.0
    b: float = 0.0
    rho: float = 2.0
    k: float = 0.1
    epsilon: float = 1.0
    PiBar: float = 1.0
    A_gain: float | None = None
    B_gain: float | None = None

    def validate(self, phys: PhysicalParams) -> None:
        for name in ("a", "alpha", "k", "epsilon"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.b) and self.b >= 0):
            raise ParameterError(f"b must be >= 0, got {self.b!r}")
        if not (math.isfinite(self.PiBar) and self.PiBar >= 0):
            raise ParameterError(f"PiBar must be >= 0, got {self.PiBar!r}")
        for name in ("A_gain", "B_gain"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"{name} must be >= 0, got {value!r}")
        if not (math.isfinite(self.rho) and self.rho * phys.L > phys.I):
            raise ParameterError(
                f"rho*L must exceed I (rho={self.rho!r}, L={phys.L!r}, I={phys.I!r})"
            )


@dataclass(frozen=True)
class DerivedConstants:
    """Every constant the closed loop needs, computed once.

    ``lam`` holds the eleven coefficients exactly as tabulated for the
    stabilizing law; ``gains`` are the coefficients that actually zero the
    right-hand side of the gamma equation (see :func:`derive_constants`).
    """

    A: float
    B: float
    lam: tuple[float, ...]
    gains: tuple[float, ...]
    d1: float
    d2: float
    d3: float
    q: float
    r_const: float
    denom: float = field(repr=False, default=1.0)

    def with_overrides(self, **overrides: float | None) -> DerivedConstants:
        """Return a copy with d1/d2/d3/A/B replaced where given."""
        mapping = {"A_gain": "A", "B_gain": "B"}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            target = mapping.get(key, key)
            if target not in ("d1", "d2", "d3", "A", "B"):
                raise ParameterError(f"cannot override {key!r}")
            changes[target] = float(value)
        return replace(self, **changes)


# Sign pattern relating the tabulated coefficients to the exact law
# ubar = (gamma_dot|_{u=0} + a*gamma) / A. Entries 5 and 6 are printed with
# the correct sign, the other nine are printed negated.
_GAIN_SIGNS = (-1, -1, -1, -1, 1, 1, -1, -1, -1, -1, -1)


def derive_constants(phys: PhysicalParams, ctrl: ControllerParams) -> DerivedConstants:
    phys.validate()
    ctrl.validate(phys)
    M, L, I, N, kappa, c, G, g = (
        phys.M, phys.L, phys.I, phys.N, phys.kappa, phys.c, phys.G, phys.g,
    )
    rho, alpha = ctrl.rho, ctrl.alpha
    denom = rho * L - I
    A = abs(G * (I - rho * L))
    B = A / G
    lam = (
        (rho * M * kappa + I * N - rho * N * L) / A,
        -L * kappa / A,
        L / G,
        -L * c / A,
        -(L**2) * g / (2 * A),
        -rho * M * c / A,
        -rho * L * M * g / A,
        -M * I / A,
        -(L**2) / A,
        -M * I * alpha / A,
        alpha * L**2 / A,
    )
    gains = tuple(s * v for s, v in zip(_GAIN_SIGNS, lam))
    q = 2 * rho * L / denom
    r_const = 2 / (q - 1) * L * g / denom
    consts = DerivedConstants(
        A=A,
        B=B,
        lam=lam,
        gains=gains,
        d1=(kappa * rho - c) / denom,
        d2=L * g / denom,
        d3=I / denom,
        q=q,
        r_const=r_const,
        denom=denom,
    )
    return consts.with_overrides(A_gain=ctrl.A_gain, B_gain=ctrl.B_gain)


class FullState(NamedTuple):
    r: float
    rdot: float
    beta: float
    betadot: float


def psi(beta: float, phys: PhysicalParams) -> float:
    """Mass-matrix determinant M*I - L**2*cos(beta)**2."""
    return phys.M * phys.I - phys.L**2 * math.cos(beta) ** 2


def psi_time_derivative(beta: float, betadot: float, phys: PhysicalParams) -> float:
    """d/dt psi(beta(t)) = L**2 * sin(2*beta) * betadot."""
    return phys.L**2 * math.sin(2.0 * beta) * betadot


def accelerations(
    x: FullState, u: float, D: float, phys: PhysicalParams
) -> tuple[float, float]:
    """Solve the cart/pendulum equations for (rddot, betaddot)."""
    _, rdot, beta, betadot = x
    cb, sb = math.cos(beta), math.sin(beta)
    # [[M, L cb], [L cb, I]] @ [rdd, bdd] = [f1, f2]
    f1 = phys.G * u + D - phys.N * rdot + phys.L * betadot**2 * sb
    f2 = phys.L * phys.g * sb - phys.c * betadot - phys.kappa * rdot * cb
    det = phys.M * phys.I - (phys.L * cb) ** 2
    if abs(det) < _DET_FLOOR:
        raise DegenerateSystemError(f"psi(beta) = {det!r} at beta = {beta!r}")
    rdd = (phys.I * f1 - phys.L * cb * f2) / det
    bdd = (phys.M * f2 - phys.L * cb * f1) / det
    return rdd, bdd


def full_rhs(x: FullState, u: float, D: float, phys: PhysicalParams) -> np.ndarray:
    rdd, bdd = accelerations(x, u, D, phys)
    return np.array([x[1], rdd, x[3], bdd])


def default_physical_params(**changes: float) -> PhysicalParams:
    """Plant completion that reproduces d1 = d2 = d3 = 1 with rho = 2."""
    return replace(PhysicalParams(), **changes)


def default_controller_params(**changes: float | None) -> ControllerParams:
    return replace(ControllerParams(), **changes)
