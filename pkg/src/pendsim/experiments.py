"""Scenario configuration and the experiment pipeline.

A scenario names one of three models (``full``, ``reduced``, ``singular``),
its parameters, disturbance, initial state and solver settings. The helpers
here build the hybrid vector field for the chosen model, integrate it,
monitor the Lyapunov functions and summarize the run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import lyapunov
from .control import _components, u_bar
from .dynamics import (
    Disturbance,
    _singular_field,
    reduced_gamma_dot,
    reduced_rhs,
    singular_accelerations,
    sliding_rhs,
)
from .model import (
    ControllerParams,
    DerivedConstants,
    FullState,
    ParameterError,
    PhysicalParams,
    accelerations,
    derive_constants,
    psi,
)
from .solver import HybridSystem, IntegrationError, SolverOptions, Trajectory, integrate
from .transform import ReducedState, beta_of_omega, full_to_reduced, reduced_to_full

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "ExperimentSummary",
    "SweepRow",
    "BasinResult",
    "CompareReport",
    "build_constants",
    "build_system",
    "full_gamma_dot",
    "reduced_view",
    "summarize",
    "run_scenario",
    "sweep_mu",
    "basin_probe",
    "parse_grid",
    "compare_models",
    "worker_count",
]

MODELS = ("full", "reduced", "singular")


class ConfigError(ValueError):
    """Invalid scenario; ``errors`` maps field names to messages."""

    def __init__(self, errors: dict[str, str]):
        self.errors = dict(errors)
        lines = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(f"invalid scenario ({lines})")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    model: str = "reduced"
    phys: PhysicalParams = field(default_factory=PhysicalParams)
    ctrl: ControllerParams = field(default_factory=ControllerParams)
    consts_override: dict = field(default_factory=dict)
    disturbance: Disturbance = field(default_factory=Disturbance)
    y0: tuple = (-0.7, 0.7, 1.0, 0.5)
    mu: float | None = None
    mu2: float | None = None
    rho_composite: float = 1.0
    settle_threshold: float = 0.05
    amplitude_t_min: float = 15.0
    solver: SolverOptions = field(default_factory=SolverOptions)
    outputs: dict = field(default_factory=dict)

    def validate(self) -> None:
        errors: dict[str, str] = {}
        if self.model not in MODELS:
            errors["model"] = f"must be one of {MODELS}, got {self.model!r}"
        try:
            self.phys.validate()
        except ParameterError as exc:
            errors["phys"] = str(exc)
        try:
            self.ctrl.validate(self.phys)
        except ParameterError as exc:
            errors["ctrl"] = str(exc)
        try:
            self.solver.validate()
        except ValueError as exc:
            errors["solver"] = str(exc)
        unknown = set(self.consts_override) - {"d1", "d2", "d3", "A_gain", "B_gain"}
        if unknown:
            errors["consts_override"] = f"unknown keys {sorted(unknown)}"
        overridden = bool(self.consts_override) or self.ctrl.A_gain is not None \
            or self.ctrl.B_gain is not None
        if self.model == "full" and overridden:
            errors["consts_override"] = "overrides are only allowed for reduced/singular models"
        dim = 6 if self.model == "singular" else 4
        if len(self.y0) != dim:
            errors["y0"] = f"{self.model} model needs {dim} initial values, got {len(self.y0)}"
        elif not all(math.isfinite(v) for v in self.y0):
            errors["y0"] = "initial values must be finite"
        elif self.model == "full" and not abs(self.y0[2]) < math.pi / 2:
            errors["y0"] = "|beta0| must be below pi/2"
        if self.model == "singular":
            if self.mu is None or not self.mu > 0:
                errors["mu"] = f"singular model requires mu > 0, got {self.mu!r}"
            if self.mu2 is not None and not self.mu2 >= 0:
                errors["mu2"] = f"mu2 must be >= 0, got {self.mu2!r}"
        if self.disturbance.bound > self.phys.Pi:
            errors["disturbance"] = (
                f"bound {self.disturbance.bound!r} exceeds Pi = {self.phys.Pi!r}"
            )
        if errors:
            raise ConfigError(errors)


@dataclass
class ExperimentSummary:
    settling_time: float | None
    steady_amplitude: np.ndarray
    sliding_intervals: list
    diverged: bool = False
    basin_radius: float | None = None

    @property
    def settled(self) -> bool:
        return self.settling_time is not None

    @property
    def max_steady_amplitude(self) -> float:
        return float(np.max(self.steady_amplitude)) if self.steady_amplitude.size else math.nan


def build_constants(cfg: ScenarioConfig) -> DerivedConstants:
    consts = derive_constants(cfg.phys, cfg.ctrl)
    return consts.with_overrides(**cfg.consts_override)


def full_gamma_dot(x, u: float, D: float, ctrl: ControllerParams,
                   phys: PhysicalParams) -> float:
    """d/dt of psi(beta)*(sdot + alpha*s) along the physical equations."""
    r, rdot, beta, betadot = x
    rdd, bdd = accelerations(x, u, D, phys)
    cb, sb = math.cos(beta), math.sin(beta)
    Omega_dot = betadot / cb
    Omega_ddot = bdd / cb + betadot * betadot * sb / (cb * cb)
    y = full_to_reduced(FullState(*x), ctrl, phys)
    sdot = rdot + ctrl.rho * Omega_dot
    sddot = rdd + ctrl.rho * Omega_ddot
    p = psi(beta, phys)
    pdot = phys.L**2 * math.sin(2 * beta) * betadot
    return pdot * (sdot + ctrl.alpha * y.s) + p * (sddot + ctrl.alpha * sdot)


def _full_control(x, ctrl, phys, consts) -> float:
    r, rdot, beta, betadot = x
    Omega = math.asinh(math.tan(beta))
    s = r + ctrl.rho * Omega
    sdot = rdot + ctrl.rho * betadot / math.cos(beta)
    return u_bar(_components(rdot, beta, betadot, sdot, s, ctrl.a, ctrl.rho), consts)


def build_system(cfg: ScenarioConfig, consts: DerivedConstants | None = None,
                 relay: bool = True) -> HybridSystem:
    """Hybrid vector field for the configured model."""
    consts = build_constants(cfg) if consts is None else consts
    ctrl, phys, dist = cfg.ctrl, cfg.phys, cfg.disturbance
    gain = consts.A if relay else 0.0

    if cfg.model == "reduced":
        return HybridSystem(
            field=lambda t, y, du: reduced_rhs(y, du, dist(t), ctrl, phys, consts),
            gamma_index=1,
            gamma_dot=lambda t, y, du: reduced_gamma_dot(y[1], du, dist(t), ctrl, consts),
            relay_gain=gain,
            PiBar=ctrl.PiBar,
            disturbance=dist,
            sliding_field=lambda t, y: sliding_rhs(y, dist(t), ctrl, phys, consts, strict=False),
            pin_surface=True,
        )

    if cfg.model == "full":
        def field_(t, x, du):
            u = _full_control(x, ctrl, phys, consts) + du
            rdd, bdd = accelerations(x, u, dist(t), phys)
            return np.array([x[1], rdd, x[3], bdd])

        def gamma_dot(t, x, du):
            u = _full_control(x, ctrl, phys, consts) + du
            return full_gamma_dot(x, u, dist(t), ctrl, phys)

        return HybridSystem(
            field=field_,
            gamma_index=None,
            gamma_dot=gamma_dot,
            relay_gain=gain,
            PiBar=ctrl.PiBar,
            disturbance=dist,
            gamma_fn=lambda x: full_to_reduced(FullState(*x), ctrl, phys).gamma,
        )

    mu = cfg.mu
    mu2 = mu if cfg.mu2 is None else cfg.mu2
    return HybridSystem(
        field=lambda t, w, du: _singular_field(w, mu, mu2, ctrl, phys, consts, dist(t), du),
        gamma_index=1,
        gamma_dot=lambda t, w, du: singular_accelerations(w, ctrl, phys, consts, dist(t), du)[0],
        relay_gain=gain,
        PiBar=ctrl.PiBar,
        disturbance=dist,
    )


def _solver_options(cfg: ScenarioConfig) -> SolverOptions:
    opts = cfg.solver
    if cfg.model == "singular" and opts.layer_time == 0.0:
        opts = replace(opts, layer_time=5 * cfg.mu, layer_max_step=cfg.mu / 2)
    return opts


def reduced_view(cfg: ScenarioConfig, traj: Trajectory) -> np.ndarray:
    """(s, gamma, Omega, OmegaDot) per record, whatever the model."""
    if cfg.model == "full":
        return np.array([full_to_reduced(FullState(*x), cfg.ctrl, cfg.phys) for x in traj.y]
                        ).reshape(-1, 4)
    return traj.y[:, :4]


def _derived_columns(cfg, consts, traj, reduced, report) -> dict[str, np.ndarray]:
    n = len(traj.t)
    beta = np.array([beta_of_omega(O) for O in reduced[:, 2]]) if n else np.empty(0)
    if cfg.model == "full":
        r = traj.y[:, 0]
        ub = np.array([_full_control(x, cfg.ctrl, cfg.phys, consts) for x in traj.y])
    else:
        r = reduced[:, 0] - cfg.ctrl.rho * reduced[:, 2]
        ub = np.full(n, np.nan)
        if cfg.model == "singular":
            ub = np.array([_observer_control(w, cfg, consts) for w in traj.y])
    cols = {"beta": beta, "r": r, "u_bar": ub}
    if report is not None:
        cols["V"] = report.V
        cols["W"] = report.W
        cols["W_rho"] = report.W_rho if report.W_rho is not None else np.full(n, np.nan)
    return cols


def _observer_control(w, cfg, consts) -> float:
    s, gamma, Omega, OmegaDot, z1, z2 = w
    ctrl = cfg.ctrl
    beta = beta_of_omega(Omega)
    cb = math.cos(beta)
    sdot = gamma / psi(beta, cfg.phys) - ctrl.alpha * s
    zh1 = sdot - ctrl.rho * OmegaDot + z1
    zh2 = OmegaDot * cb + z2
    comps = _components(zh1, beta, zh2, zh1 + ctrl.rho * zh2 / cb, s, ctrl.a, ctrl.rho)
    return u_bar(comps, consts)


def summarize(cfg: ScenarioConfig, traj: Trajectory,
              reduced: np.ndarray | None = None) -> ExperimentSummary:
    reduced = reduced_view(cfg, traj) if reduced is None else reduced
    if len(traj.t) == 0:
        return ExperimentSummary(None, np.zeros(4), [], traj.diverged)
    norm = np.max(np.abs(reduced), axis=1)
    above = np.flatnonzero(~(norm < cfg.settle_threshold))
    if traj.diverged or traj.t_final < cfg.solver.t_end - 1e-9:
        settling = None
    elif above.size == 0:
        settling = float(traj.t[0])
    elif above[-1] + 1 < len(traj.t):
        settling = float(traj.t[above[-1] + 1])
    else:
        settling = None
    late = traj.t >= cfg.amplitude_t_min
    amp = np.max(np.abs(reduced[late]), axis=0) if late.any() else np.full(4, np.nan)
    return ExperimentSummary(settling, amp, traj.sliding_intervals(), traj.diverged)


def run_scenario(cfg: ScenarioConfig):
    """Integrate, monitor and summarize one scenario.

    Returns ``(trajectory, lyapunov_report, summary)``; the report is
    ``None`` for runs with fewer than three records.
    """
    cfg.validate()
    consts = build_constants(cfg)
    system = build_system(cfg, consts)
    opts = _solver_options(cfg)
    traj = integrate(system, np.array(cfg.y0, dtype=float), opts)
    reduced = reduced_view(cfg, traj)
    report = None
    if len(traj.t) >= 3:
        report = lyapunov.monitor(traj, cfg.ctrl, consts, reduced=reduced,
                                  rho_composite=cfg.rho_composite)
    traj.columns.update(_derived_columns(cfg, consts, traj, reduced, report))
    return traj, report, summarize(cfg, traj, reduced)


@dataclass(frozen=True)
class SweepRow:
    mu: float
    deviation: float


def _theorem_setting(cfg: ScenarioConfig) -> ScenarioConfig:
    """Disturbance-free copy; the relay is removed when the system is built."""
    return replace(cfg, disturbance=Disturbance.zero())


def sweep_mu(cfg: ScenarioConfig, mus: Sequence[float]) -> list[SweepRow]:
    """Sup deviation of the observer loop from the ideal-velocity loop.

    For each mu the six-state system is integrated from ``cfg.y0`` and
    compared, on t >= 5*mu, with the four-state system started from the
    same (s, gamma, Omega, OmegaDot).
    """
    if cfg.model != "singular":
        raise ConfigError({"model": "sweep_mu needs a singular scenario"})
    if any(not m > 0 for m in mus):
        raise ConfigError({"mu": f"all mu must be > 0, got {list(mus)!r}"})
    base = _theorem_setting(cfg)
    ref_cfg = replace(base, model="reduced", y0=tuple(base.y0[:4]), mu=None, mu2=None)
    ref_cfg.validate()
    ref = integrate(build_system(ref_cfg, relay=False), np.array(ref_cfg.y0, dtype=float),
                    ref_cfg.solver)
    rows = []
    for mu in sorted(mus, reverse=True):
        c = replace(base, mu=float(mu))
        c.validate()
        traj = integrate(build_system(c, relay=False), np.array(c.y0, dtype=float),
                         _solver_options(c))
        n = min(len(traj.t), len(ref.t))
        mask = traj.t[:n] >= 5 * mu
        dev = np.max(np.abs(traj.y[:n, :4][mask] - ref.y[:n][mask])) if mask.any() else 0.0
        if traj.diverged:
            dev = math.inf
        rows.append(SweepRow(float(mu), float(dev)))
    return rows


@dataclass
class BasinResult:
    mu: float
    initial_states: np.ndarray  # rows of six-state initial conditions
    levels: np.ndarray  # W_rho at each initial condition
    converged: np.ndarray  # bool per initial condition
    radius: float

    @property
    def n_converged(self) -> int:
        return int(self.converged.sum())


def parse_grid(spec: str) -> dict[str, tuple[float, float, int]]:
    """Parse ``"omega=-3:3:9,omega_dot=-3:3:9"`` into axis ranges."""
    axes = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            name, rng = part.split("=")
            lo, hi, n = rng.split(":")
            axes[name.strip()] = (float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ConfigError({"grid": f"cannot parse {part!r} (want name=lo:hi:n)"}) from exc
    allowed = {"s", "gamma", "omega", "omega_dot"}
    if not axes or set(axes) - allowed:
        raise ConfigError({"grid": f"axes must be a non-empty subset of {sorted(allowed)}"})
    return axes


def _grid_states(cfg: ScenarioConfig, axes) -> np.ndarray:
    """Six-state initial conditions with observers started from zero."""
    order = ("s", "gamma", "omega", "omega_dot")
    base = list(cfg.y0[:4])
    values = [np.linspace(*axes[k]) if k in axes else np.array([base[i]])
              for i, k in enumerate(order)]
    mesh = np.meshgrid(*values, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    out = np.empty((len(pts), 6))
    for i, (s, g, O, Od) in enumerate(pts):
        x = reduced_to_full(ReducedState(s, g, O, Od), cfg.ctrl, cfg.phys)
        out[i] = (s, g, O, Od, -x.rdot, -x.betadot)
    return out


def worker_count(requested: int | None = None) -> int:
    """Number of worker processes; PENDSIM_THREADS caps the default."""
    if requested is not None:
        return max(1, int(requested))
    n = os.cpu_count() or 1
    cap = os.environ.get("PENDSIM_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def _basin_one(args) -> bool:
    c, consts, opts, w, t_end, converge_eps = args
    system = build_system(c, consts, relay=False)
    try:
        traj = integrate(system, w, opts)
    except (IntegrationError, OverflowError, ValueError, ArithmeticError):
        return False
    if traj.diverged or traj.t_final < t_end - 1e-9:
        return False
    final = traj.steps[-1](traj.t_final)
    return bool(np.all(np.isfinite(final)) and np.max(np.abs(final)) < converge_eps)


def basin_probe(
    cfg: ScenarioConfig,
    grid: str | dict,
    converge_eps: float = 1e-3,
    t_end: float | None = None,
    mu: float | None = None,
    workers: int | None = None,
) -> BasinResult:
    """Classify a grid of initial conditions by convergence.

    An initial condition converges when the sup-norm of the six-state vector
    at ``t_end`` is below ``converge_eps``. The radius is the largest W_rho
    level below which every tested initial condition converged.
    """
    axes = parse_grid(grid) if isinstance(grid, str) else dict(grid)
    c = _theorem_setting(cfg)
    if mu is not None:
        c = replace(c, mu=float(mu))
    if c.model != "singular":
        raise ConfigError({"model": "basin_probe needs a singular scenario"})
    t_end = c.solver.t_end if t_end is None else t_end
    c = replace(c, solver=replace(c.solver, t_end=t_end, record_dt=t_end, escape=1e3))
    c = replace(c, y0=tuple(c.y0[:4]) + (0.0, 0.0))
    c.validate()
    consts = build_constants(c)
    opts = _solver_options(c)
    states = _grid_states(c, axes)
    levels = np.array([lyapunov.composite(w, c.ctrl, consts, c.rho_composite) for w in states])
    jobs = [(c, consts, opts, w, t_end, converge_eps) for w in states]
    n = worker_count(workers)
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            converged = np.array(list(pool.map(_basin_one, jobs, chunksize=4)), dtype=bool)
    else:
        converged = np.array([_basin_one(j) for j in jobs], dtype=bool)
    failed = levels[~converged]
    cutoff = failed.min() if failed.size else math.inf
    inside = levels[converged & (levels < cutoff)]
    radius = float(inside.max()) if inside.size else 0.0
    return BasinResult(float(c.mu), states, levels, converged, radius)


@dataclass
class CompareReport:
    deviation: float
    gamma_residual: float
    full: Trajectory
    reduced: Trajectory
    mapped: np.ndarray


def compare_models(cfg: ScenarioConfig) -> CompareReport:
    """Full plant under the stabilizing law versus the reduced closed loop.

    ``cfg.y0`` is a physical state (r, rdot, beta, betadot). The reduced
    loop starts from its image and runs with no relay and no disturbance.
    """
    if cfg.model != "full":
        raise ConfigError({"model": "compare_models needs a full-model scenario"})
    c = _theorem_setting(cfg)
    c.validate()
    consts = build_constants(c)
    full = integrate(build_system(c, consts, relay=False), np.array(c.y0, dtype=float), c.solver)
    mapped = reduced_view(c, full)
    y0r = tuple(full_to_reduced(FullState(*c.y0), c.ctrl, c.phys))
    rc = replace(c, model="reduced", y0=y0r)
    red = integrate(build_system(rc, consts, relay=False), np.array(y0r), rc.solver)
    n = min(len(full.t), len(red.t))
    deviation = float(np.max(np.abs(mapped[:n] - red.y[:n]))) if n else 0.0
    residual = 0.0
    for x, (s, g, O, Od) in zip(full.y, mapped):
        u = _full_control(x, c.ctrl, c.phys, consts)
        residual = max(residual, abs(full_gamma_dot(x, u, 0.0, c.ctrl, c.phys) + c.ctrl.a * g))
    return CompareReport(deviation, residual, full, red, mapped)
