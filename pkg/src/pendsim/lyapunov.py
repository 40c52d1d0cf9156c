"""Lyapunov and comparison functions, and their monitoring along trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .model import ControllerParams, DerivedConstants

__all__ = [
    "LyapunovReport",
    "Violation",
    "V",
    "W",
    "comparison_functions",
    "observer_weight_matrix",
    "W_z",
    "composite",
    "monitor",
]


def V(s, gamma, k: float):
    return s * s + k * gamma * gamma


def W(Omega, OmegaDot, q: float, r_const: float):
    """Angle-block function OmegaDot**2/cos**(q-2) + r/cos**(q-1) - r.

    Uses cos(beta(Omega)) = 1/cosh(Omega); the constant term is formed with
    expm1 so W stays accurate (and strictly positive) close to the origin.
    """
    Omega = np.asarray(Omega, dtype=float)
    OmegaDot = np.asarray(OmegaDot, dtype=float)
    sh = np.sinh(Omega / 2)
    log_cosh = np.log1p(2 * sh * sh)
    out = OmegaDot**2 * np.exp((q - 2) * log_cosh) + r_const * np.expm1((q - 1) * log_cosh)
    return out[()] if out.ndim == 0 else out


def comparison_functions(state, ctrl: ControllerParams, consts: DerivedConstants):
    """Return (eps*(s**2 + gamma**2), 2*a*OmegaDot**2/cos**(q-2)(beta))."""
    s, gamma, Omega, OmegaDot = (np.asarray(v, dtype=float) for v in state[:4])
    psi_cmp = ctrl.epsilon * (s * s + gamma * gamma)
    sh = np.sinh(Omega / 2)
    eta = 2 * ctrl.a * OmegaDot**2 * np.exp((consts.q - 2) * np.log1p(2 * sh * sh))
    return psi_cmp, eta


def observer_weight_matrix(Gamma=None) -> np.ndarray:
    """Symmetric B with Gamma.T @ B + B @ Gamma = I (B = I/2 for Gamma = I)."""
    Gamma = np.eye(2) if Gamma is None else np.asarray(Gamma, dtype=float)
    return solve_continuous_lyapunov(Gamma.T, np.eye(Gamma.shape[0]))


def W_z(z1, z2):
    return 0.5 * (np.asarray(z1) ** 2 + np.asarray(z2) ** 2)


def composite(state, ctrl: ControllerParams, consts: DerivedConstants,
              rho_composite: float = 1.0):
    """V(s, gamma) + W(Omega, OmegaDot) + rho*W_z(z) for a six-state vector."""
    s, gamma, Omega, OmegaDot, z1, z2 = state
    return (V(s, gamma, ctrl.k) + W(Omega, OmegaDot, consts.q, consts.r_const)
            + rho_composite * W_z(z1, z2))


class Violation(NamedTuple):
    t: float
    condition: str
    margin: float


@dataclass
class LyapunovReport:
    t: np.ndarray
    V: np.ndarray
    W: np.ndarray
    psi_cmp: np.ndarray
    eta: np.ndarray
    W_z: np.ndarray | None
    W_rho: np.ndarray | None
    dV_dt: np.ndarray
    dW_rho_dt: np.ndarray | None
    violations: list[Violation] = field(default_factory=list)


def _segment_gradient(values: np.ndarray, t: np.ndarray, breaks: np.ndarray) -> np.ndarray:
    """Central differences inside segments, one-sided at segment ends."""
    out = np.full(values.shape, np.nan)
    edges = np.concatenate(([0], np.flatnonzero(breaks) + 1, [len(values)]))
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo >= 2:
            out[lo:hi] = np.gradient(values[lo:hi], t[lo:hi])
    return out


def monitor(
    traj,
    ctrl: ControllerParams,
    consts: DerivedConstants,
    *,
    reduced: np.ndarray | None = None,
    z: np.ndarray | None = None,
    rho_composite: float = 1.0,
    increase_tol: float = 1e-8,
) -> LyapunovReport:
    """Evaluate every function per record and flag violated conditions.

    Flags samples with W < -1e-12 and, when the observer block is present,
    any record-to-record increase of W_rho larger than
    ``increase_tol*(1 + W_rho)`` inside a disturbance-free, non-sliding
    stretch without mode changes.
    """
    t = np.asarray(traj.t, dtype=float)
    if len(t) < 3:
        raise ValueError(f"need at least 3 records, got {len(t)}")
    y = np.asarray(traj.y, dtype=float)
    if reduced is None:
        reduced = y[:, :4]
    if z is None and y.shape[1] == 6:
        z = y[:, 4:6]
    s, gamma, Omega, OmegaDot = reduced.T
    v = V(s, gamma, ctrl.k)
    w = W(Omega, OmegaDot, consts.q, consts.r_const)
    psi_cmp, eta = comparison_functions(reduced.T, ctrl, consts)

    modes = np.asarray(traj.mode)
    breaks = modes[1:] != modes[:-1]
    dv = _segment_gradient(v, t, breaks)

    wz = w_rho = dw_rho = None
    violations: list[Violation] = []
    for ti, wi in zip(t[w < -1e-12], w[w < -1e-12]):
        violations.append(Violation(float(ti), "W_nonnegative", float(wi)))

    if z is not None:
        wz = W_z(z[:, 0], z[:, 1])
        w_rho = v + w + rho_composite * wz
        dw_rho = _segment_gradient(w_rho, t, breaks)
        D = np.asarray(traj.D)
        quiet = (~breaks) & (D[1:] == 0) & (D[:-1] == 0) & (modes[1:] != "sliding")
        rise = np.diff(w_rho)
        bound = increase_tol * (1 + np.abs(w_rho[:-1]))
        for i in np.flatnonzero(quiet & (rise > bound)):
            violations.append(Violation(float(t[i + 1]), "W_rho_nonincreasing", float(rise[i])))

    violations.sort(key=lambda x: x[0])
    return LyapunovReport(t, v, w, psi_cmp, eta, wz, w_rho, dv, dw_rho, violations)
