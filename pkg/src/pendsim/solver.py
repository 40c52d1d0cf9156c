"""Event-driven integration of relay feedback loops.

The continuous parts are integrated with an adaptive Dormand-Prince 5(4)
pair. Crossings of the switching surface gamma = 0 are located on the
fourth-order dense output; at each crossing the Filippov conditions decide
between a relay switch and a sliding motion, the latter driven by the
equivalent control until it leaves the admissible interval [-PiBar, PiBar].
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "SolverOptions",
    "Mode",
    "Event",
    "DenseStep",
    "Trajectory",
    "HybridSystem",
    "IntegrationError",
    "integrate",
    "integrate_smooth",
    "sliding_manager",
    "dense_eval",
]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension (Shampine), y(t0 + th*h) = y0 + h * K.T @ P @ [th, th^2, th^3, th^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_GRAZE = 1e-10
# remaining intervals shorter than this (relative) are absorbed into the last step
_SNAP = 1e-12


class IntegrationError(RuntimeError):
    """Step size underflow; carries the time and state where it happened."""

    def __init__(self, message: str, t: float, y: np.ndarray):
        super().__init__(f"{message} at t = {t!r}, state = {np.asarray(y).tolist()!r}")
        self.t = t
        self.y = np.asarray(y)


@dataclass(frozen=True)
class SolverOptions:
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = 0.1
    event_tol: float = 1e-10
    sliding_band: float = 1e-8
    t_end: float = 30.0
    record_dt: float = 0.01
    escape: float = 1e8
    layer_time: float = 0.0
    layer_max_step: float = math.inf

    def validate(self) -> None:
        for name in ("rtol", "atol", "max_step", "event_tol", "sliding_band",
                     "t_end", "record_dt", "escape", "layer_max_step"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if self.layer_time < 0:
            raise ValueError(f"layer_time must be >= 0, got {self.layer_time!r}")
        if not self.event_tol < self.sliding_band:
            raise ValueError("event_tol must be smaller than sliding_band")
        if self.record_dt > self.t_end:
            raise ValueError("record_dt must not exceed t_end")

    @property
    def n_records(self) -> int:
        return int(round(self.t_end / self.record_dt)) + 1


class Mode(NamedTuple):
    kind: str  # "regular" or "sliding"
    relay_sign: int = 0

    @property
    def label(self) -> str:
        if self.kind == "sliding":
            return "sliding"
        return {1: "regular+", -1: "regular-"}.get(self.relay_sign, "regular")


REGULAR_OFF = Mode("regular", 0)
SLIDING = Mode("sliding", 0)


class Event(NamedTuple):
    t: float
    kind: str  # surface_hit | sliding_enter | sliding_exit


@dataclass
class DenseStep:
    t0: float
    h: float
    t1: float
    y0: np.ndarray
    Q: np.ndarray  # dim x 4
    mode: Mode

    def __call__(self, t: float) -> np.ndarray:
        th = (t - self.t0) / self.h
        return self.y0 + self.h * (self.Q @ np.array([th, th * th, th ** 3, th ** 4]))


@dataclass
class HybridSystem:
    """Vector-field bundle consumed by :func:`integrate`.

    ``field(t, y, delta_u)`` is the closed loop with a given relay value,
    ``gamma_dot(t, y, delta_u)`` its switching-variable rate, which must be
    affine in ``delta_u`` with slope ``-relay_gain``.
    """

    field: Callable[[float, np.ndarray, float], np.ndarray]
    gamma_index: int | None
    gamma_dot: Callable[[float, np.ndarray, float], float]
    relay_gain: float
    PiBar: float
    disturbance: Callable[[float], float] = lambda t: 0.0
    sliding_field: Callable[[float, np.ndarray], np.ndarray] | None = None
    gamma_fn: Callable[[np.ndarray], float] | None = None
    pin_surface: bool = False

    @property
    def relay_active(self) -> bool:
        return self.relay_gain > 0 and self.PiBar > 0

    def gamma(self, y: np.ndarray) -> float:
        if self.gamma_fn is not None:
            return self.gamma_fn(y)
        return float(y[self.gamma_index])

    def delta_u_eq(self, t: float, y: np.ndarray) -> float:
        return self.gamma_dot(t, y, 0.0) / self.relay_gain

    def rhs(self, t: float, y: np.ndarray, mode: Mode) -> np.ndarray:
        if mode.kind == "sliding":
            if self.sliding_field is not None:
                return self.sliding_field(t, y)
            return self.field(t, y, self.delta_u_eq(t, y))
        return self.field(t, y, mode.relay_sign * self.PiBar if self.relay_active else 0.0)

    def applied_delta_u(self, t: float, y: np.ndarray, mode: Mode) -> float:
        if not self.relay_active:
            return 0.0
        if mode.kind == "sliding":
            return self.delta_u_eq(t, y)
        return mode.relay_sign * self.PiBar


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    mode: list[str]
    delta_u: np.ndarray
    D: np.ndarray
    events: list[Event] = field(default_factory=list)
    steps: list[DenseStep] = field(default_factory=list, repr=False)
    diverged: bool = False
    t_final: float = 0.0
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    def sliding_intervals(self) -> list[tuple[float, float]]:
        out: list[tuple[float, float]] = []
        start = None
        for ev in self.events:
            if ev.kind == "sliding_enter":
                start = ev.t
            elif ev.kind == "sliding_exit" and start is not None:
                out.append((start, ev.t))
                start = None
        if start is not None:
            out.append((start, self.t_final))
        return out


def _rms(x: np.ndarray) -> float:
    return math.sqrt(float(np.dot(x, x)) / x.size)


def _initial_step(fun, t0, y0, f0, rtol, atol, max_step) -> float:
    scale = atol + np.abs(y0) * rtol
    d0, d1 = _rms(y0 / scale), _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    f1 = fun(t0 + h0, y0 + h0 * f0)
    d2 = _rms((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def _dp_step(fun, t, y, f, h, K):
    K[0] = f
    for i in range(1, 6):
        dy = K[:i].T @ _A[i] * h
        K[i] = fun(t + _C[i] * h, y + dy)
    y_new = y + h * (K[:6].T @ _B)
    f_new = fun(t + h, y_new)
    K[6] = f_new
    return y_new, f_new


class _Phase:
    """Adaptive integration of one smooth vector field."""

    def __init__(self, fun, t0, y0, opts: SolverOptions, h=None):
        self.fun = fun
        self.t = t0
        self.y = np.array(y0, dtype=float)
        self.f = fun(t0, self.y)
        self.opts = opts
        self.K = np.empty((7, self.y.size))
        cap = self._cap(t0)
        if h is None or not h > 0:
            h = _initial_step(fun, t0, self.y, self.f, opts.rtol, opts.atol, cap)
        self.h = min(h, cap)

    def _cap(self, t: float) -> float:
        o = self.opts
        return min(o.max_step, o.layer_max_step) if t < o.layer_time else o.max_step

    def step(self, t_limit: float):
        """Take one accepted step not beyond t_limit; return (t0, h, y0, Q)."""
        o = self.opts
        t, y = self.t, self.y
        snap = _SNAP * max(1.0, abs(t_limit))
        while True:
            rem = t_limit - t
            h = min(self.h, self._cap(t))
            if h >= rem - snap:
                h = rem  # do not leave a sliver before t_limit
            if h < 1e-14 * max(1.0, abs(t)):
                raise IntegrationError("step size underflow", t, y)
            y_new, f_new = _dp_step(self.fun, t, y, self.f, h, self.K)
            scale = o.atol + np.maximum(np.abs(y), np.abs(y_new)) * o.rtol
            err = _rms(h * (self.K.T @ _E) / scale)
            if not math.isfinite(err):
                self.h = 0.1 * h
                continue
            if err <= 1.0:
                factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, _SAFETY * err ** -0.2)
                Q = self.K.T @ _P
                self.t, self.y, self.f = t + h, y_new, f_new
                if t + h >= t_limit:
                    self.t = t_limit
                self.h = h * factor
                return t, h, y, Q
            self.h = h * max(_MIN_FACTOR, _SAFETY * err ** -0.2)


def sliding_manager(system: HybridSystem, t: float, y: np.ndarray) -> tuple[Mode, float]:
    """Mode to adopt on the surface gamma = 0 and the relay value it implies."""
    if not system.relay_active:
        return REGULAR_OFF, 0.0
    du_eq = system.delta_u_eq(t, y)
    margin = _GRAZE / system.relay_gain
    if abs(du_eq) < system.PiBar - margin:
        return SLIDING, du_eq
    sign = 1 if du_eq > 0 else -1
    return Mode("regular", sign), sign * system.PiBar


def _bracket_root(fn, a: float, b: float, fa: float, fb: float, tol: float) -> float:
    if fb == 0.0:
        return b
    return brentq(fn, a, b, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)


def integrate(system: HybridSystem, y0, opts: SolverOptions) -> Trajectory:
    """Integrate the hybrid loop from t = 0 to ``opts.t_end``."""
    opts.validate()
    y0 = np.array(y0, dtype=float)
    t_end = opts.t_end
    events: list[Event] = []
    steps: list[DenseStep] = []
    diverged = False

    gamma0 = system.gamma(y0)
    if not system.relay_active:
        mode = REGULAR_OFF
    elif gamma0 > 0:
        mode = Mode("regular", 1)
    elif gamma0 < 0:
        mode = Mode("regular", -1)
    else:
        mode, _ = sliding_manager(system, 0.0, y0)
        if mode.kind == "sliding":
            events.append(Event(0.0, "sliding_enter"))

    t, y, h = 0.0, y0, None
    on_surface = system.relay_active and gamma0 == 0.0 and mode.kind == "regular"

    while t_end - t > _SNAP * max(1.0, t_end) and not diverged:
        if mode.kind == "sliding" and system.pin_surface and system.gamma_index is not None:
            y = y.copy()
            y[system.gamma_index] = 0.0
        fun = (lambda m: (lambda tt, yy: system.rhs(tt, yy, m)))(mode)
        phase = _Phase(fun, t, y, opts, h)
        switched = False
        left_surface = not on_surface
        while t_end - phase.t > _SNAP * max(1.0, t_end):
            t0, hstep, ya, Q = phase.step(t_end)
            t1 = phase.t
            step = DenseStep(t0, hstep, t1, ya, Q, mode)

            if mode.kind == "regular" and system.relay_active:
                sig = mode.relay_sign

                def g(tt, _s=step, _sig=sig):
                    return _sig * system.gamma(_s(tt))

                g1 = sig * system.gamma(phase.y)
                if left_surface:
                    if g1 <= 0.0:
                        g0 = sig * system.gamma(ya)
                        te = _bracket_root(g, t0, t1, g0, g1, opts.event_tol * 1e-4)
                        step.t1 = te
                        steps.append(step)
                        ye = step(te)
                        events.append(Event(te, "surface_hit"))
                        new_mode, _ = sliding_manager(system, te, ye)
                        if new_mode.kind == "sliding":
                            events.append(Event(te, "sliding_enter"))
                            on_surface = False
                        else:
                            new_mode = Mode("regular", -sig)
                            on_surface = True
                        t, y, h, mode = te, ye, phase.h, new_mode
                        switched = True
                        break
                elif g1 > 0.0:
                    left_surface = True
                else:
                    cand, _ = sliding_manager(system, t1, phase.y)
                    if cand.kind == "sliding":
                        steps.append(step)
                        events.append(Event(t1, "sliding_enter"))
                        t, y, h, mode = t1, phase.y, phase.h, cand
                        on_surface = False
                        switched = True
                        break

            elif mode.kind == "sliding":
                A, PiBar = system.relay_gain, system.PiBar

                def hfun(tt, _s=step):
                    return PiBar - abs(system.delta_u_eq(tt, _s(tt)))

                h1 = hfun(t1)
                if h1 <= _GRAZE / A:
                    h0 = hfun(t0)
                    if h0 > 0 and h1 < 0:
                        te = _bracket_root(hfun, t0, t1, h0, h1, opts.event_tol * 1e-4)
                    else:
                        te = t1
                    step.t1 = te
                    steps.append(step)
                    ye = step(te)
                    events.append(Event(te, "sliding_exit"))
                    du = system.delta_u_eq(te, ye)
                    t, y, h = te, ye, phase.h
                    mode = Mode("regular", 1 if du > 0 else -1)
                    on_surface = True
                    switched = True
                    break

            steps.append(step)
            if not np.all(np.abs(phase.y) < opts.escape):
                diverged = True
                break
        if not switched:
            t, y = phase.t, phase.y

    t_final = steps[-1].t1 if steps else 0.0
    return _record(system, steps, events, opts, diverged, t_final)


def integrate_smooth(fun: Callable[[float, np.ndarray], np.ndarray], y0,
                     opts: SolverOptions) -> Trajectory:
    """Integrate a smooth field with no switching surface."""
    system = HybridSystem(
        field=lambda t, y, du: fun(t, y),
        gamma_index=None,
        gamma_dot=lambda t, y, du: 0.0,
        relay_gain=0.0,
        PiBar=0.0,
        gamma_fn=lambda y: 0.0,
    )
    return integrate(system, y0, opts)


def _locate(steps: list[DenseStep], starts: list[float], t: float) -> DenseStep:
    i = bisect.bisect_right(starts, t) - 1
    i = min(max(i, 0), len(steps) - 1)
    # zero-length steps can occur at events; prefer the one that covers t
    while i > 0 and steps[i].t1 <= steps[i].t0:
        i -= 1
    return steps[i]


def _record(system, steps, events, opts, diverged, t_final) -> Trajectory:
    n = opts.n_records
    times = np.arange(n) * opts.record_dt
    times[-1] = min(times[-1], opts.t_end)
    times = times[times <= t_final + 1e-12] if steps else times[:1]
    starts = [s.t0 for s in steps]
    dim = steps[0].y0.size if steps else 0
    ys = np.empty((len(times), dim))
    modes: list[str] = []
    dus = np.empty(len(times))
    Ds = np.empty(len(times))
    for j, tt in enumerate(times):
        st = _locate(steps, starts, tt)
        yy = st(tt)
        ys[j] = yy
        modes.append(st.mode.label)
        dus[j] = system.applied_delta_u(tt, yy, st.mode)
        Ds[j] = system.disturbance(tt)
    return Trajectory(times, ys, modes, dus, Ds, list(events), steps, diverged, t_final)


def dense_eval(traj: Trajectory, t: float) -> np.ndarray:
    if not traj.steps:
        raise ValueError("trajectory has no integration steps")
    if not (traj.steps[0].t0 <= t <= traj.t_final):
        raise ValueError(f"t = {t!r} outside [{traj.steps[0].t0!r}, {traj.t_final!r}]")
    starts = [s.t0 for s in traj.steps]
    return _locate(traj.steps, starts, t)(t)
