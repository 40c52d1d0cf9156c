"""Self-check suites run by ``pendsim verify``."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from . import lyapunov
from .dynamics import SingularState, reduced_rhs, singular_rhs
from .experiments import ScenarioConfig, compare_models
from .model import FullState, derive_constants, default_controller_params, default_physical_params
from .solver import SolverOptions
from .transform import (ReducedState, beta_of_omega, full_to_reduced, omega_of_beta,
                        reduced_to_full)

__all__ = ["Check", "SUITES", "run_suite"]


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _transforms() -> list[Check]:
    phys, ctrl = default_physical_params(), default_controller_params()
    betas = np.linspace(-math.pi / 2 + 0.01, math.pi / 2 - 0.01, 1000)
    err = max(abs(beta_of_omega(omega_of_beta(b)) - b) for b in betas)
    rng = np.random.default_rng(12345)
    worst = 0.0
    for _ in range(100):
        x = FullState(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1.4, 1.4), rng.uniform(-2, 2))
        back = reduced_to_full(full_to_reduced(x, ctrl, phys), ctrl, phys)
        worst = max(worst, float(np.max(np.abs(np.subtract(back, x)))))
    return [
        Check("beta->Omega->beta round trip", err <= 1e-12, f"max error {err:.3e}"),
        Check("full->reduced->full round trip", worst <= 1e-10, f"max error {worst:.3e}"),
    ]


def _lyapunov() -> list[Check]:
    consts = derive_constants(default_physical_params(), default_controller_params())
    O, Od = np.meshgrid(np.linspace(-3, 3, 200), np.linspace(-3, 3, 200))
    w = lyapunov.W(O, Od, consts.q, consts.r_const)
    origin = lyapunov.W(0.0, 0.0, consts.q, consts.r_const)
    mu, z = 0.05, np.array([0.3, -0.2])
    h = 1e-6
    # boundary layer alone: dz/dt = -z/mu
    zdot = -z / mu
    fd = (lyapunov.W_z(*(z + h * zdot)) - lyapunov.W_z(*(z - h * zdot))) / (2 * h)
    exact = -float(z @ z) / mu
    return [
        Check("W > 0 on 200x200 grid", bool(np.all(w > 0)), f"min {w.min():.3e}"),
        Check("W(0, 0) = 0", origin == 0.0, f"{float(origin)!r}"),
        Check("dW_z/dt = -|z|^2/mu", abs(fd - exact) <= 1e-6 * abs(exact),
              f"fd {fd:.9g} vs {exact:.9g}"),
    ]


def _consistency() -> list[Check]:
    phys, ctrl = default_physical_params(), default_controller_params()
    consts = derive_constants(phys, ctrl)
    y = ReducedState(-0.7, 0.7, 1.0, 0.5)
    a = singular_rhs(SingularState(y, 0.0, 0.0, 0.1), ctrl, phys, consts)[:4]
    b = reduced_rhs(y, 0.0, 0.0, ctrl, phys, consts)
    cfg = ScenarioConfig(model="full", y0=(0.3, -0.2, 0.8, 0.4), solver=SolverOptions(t_end=10.0))
    rep = compare_models(cfg)
    tol = cfg.solver.rtol
    return [
        Check("singular x-block equals reduced field at z = 0",
              bool(np.max(np.abs(a - b)) <= 1e-12), f"max diff {np.max(np.abs(a - b)):.3e}"),
        Check("full vs reduced trajectory", rep.deviation <= 50 * tol,
              f"deviation {rep.deviation:.3e} (limit {50 * tol:.1e})"),
        Check("gamma_dot + a*gamma residual", rep.gamma_residual <= 1e-6,
              f"residual {rep.gamma_residual:.3e}"),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "transforms": _transforms,
    "lyapunov": _lyapunov,
    "consistency": _consistency,
}


def run_suite(name: str) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    return SUITES[name]()
