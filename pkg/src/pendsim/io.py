"""CSV trajectory output and TOML scenario files."""

from __future__ import annotations

import csv
import importlib.resources
import math
import os
import tempfile
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from .dynamics import Disturbance
from .experiments import ConfigError, ScenarioConfig
from .model import ControllerParams, PhysicalParams
from .solver import SolverOptions

__all__ = [
    "CSV_COLUMNS",
    "write_csv",
    "config_to_dict",
    "config_from_dict",
    "load_config",
    "save_config",
    "SCENARIOS",
    "scenario_path",
    "load_scenario",
]

CSV_COLUMNS = (
    "t", "s", "gamma", "omega", "omega_dot", "beta", "r",
    "u_bar", "delta_u", "D", "mode", "V", "W", "W_rho",
)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def write_csv(traj, report, path, reduced=None) -> None:
    """Write one row per record; columns that do not apply are left empty.

    ``reduced`` overrides the (s, gamma, omega, omega_dot) block, which
    otherwise comes from the first four state components. The file is
    written to a temporary sibling and moved into place, so a failed write
    leaves nothing behind.
    """
    path = Path(path)
    n = len(traj.t)
    if reduced is None:
        reduced = traj.y[:, :4] if n else np.empty((0, 4))
    cols = dict(traj.columns)
    nan = np.full(n, np.nan)

    def col(name):
        if name in cols:
            return cols[name]
        if report is not None and name in ("V", "W", "W_rho"):
            val = getattr(report, name)
            return nan if val is None else val
        return nan

    table = {
        "t": traj.t,
        "s": reduced[:, 0], "gamma": reduced[:, 1],
        "omega": reduced[:, 2], "omega_dot": reduced[:, 3],
        "beta": col("beta"), "r": col("r"), "u_bar": col("u_bar"),
        "delta_u": traj.delta_u, "D": traj.D, "mode": traj.mode,
        "V": col("V"), "W": col("W"), "W_rho": col("W_rho"),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for i in range(n):
                writer.writerow([_fmt(table[c][i]) for c in CSV_COLUMNS])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    solver = asdict(cfg.solver)
    if math.isinf(solver["layer_max_step"]):
        del solver["layer_max_step"]
    out = {
        "name": cfg.name,
        "model": cfg.model,
        "y0": [float(v) for v in cfg.y0],
        "rho_composite": cfg.rho_composite,
        "settle_threshold": cfg.settle_threshold,
        "amplitude_t_min": cfg.amplitude_t_min,
        "phys": asdict(cfg.phys),
        "ctrl": _drop_none(asdict(cfg.ctrl)),
        "consts_override": dict(cfg.consts_override),
        "disturbance": asdict(cfg.disturbance),
        "solver": solver,
        "outputs": dict(cfg.outputs),
    }
    if cfg.mu is not None:
        out["mu"] = cfg.mu
    if cfg.mu2 is not None:
        out["mu2"] = cfg.mu2
    return out


def _build(cls, table, section: str, errors: dict):
    if not isinstance(table, dict):
        errors[section] = "must be a table"
        return cls()
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(table) - set(known))
    for key in unknown:
        errors[f"{section}.{key}"] = "unknown field"
    kwargs = {}
    for key, value in table.items():
        if key not in known:
            continue
        if key == "kind":
            kwargs[key] = value
        elif isinstance(value, bool) or not isinstance(value, (int, float)):
            errors[f"{section}.{key}"] = f"expected a number, got {value!r}"
        else:
            kwargs[key] = float(value)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors[section] = str(exc)
        return cls()


_TOP_LEVEL = {"name", "model", "y0", "mu", "mu2", "rho_composite", "settle_threshold",
              "amplitude_t_min", "phys", "ctrl", "consts_override", "disturbance",
              "solver", "outputs"}


def config_from_dict(data: dict) -> ScenarioConfig:
    errors: dict[str, str] = {}
    for key in sorted(set(data) - _TOP_LEVEL):
        errors[key] = "unknown field"
    phys = _build(PhysicalParams, data.get("phys", {}), "phys", errors)
    ctrl = _build(ControllerParams, data.get("ctrl", {}), "ctrl", errors)
    dist = _build(Disturbance, data.get("disturbance", {}), "disturbance", errors)
    solver = _build(SolverOptions, data.get("solver", {}), "solver", errors)
    y0 = data.get("y0", list(ScenarioConfig.y0))
    if not isinstance(y0, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in y0):
        errors["y0"] = "must be an array of numbers"
        y0 = list(ScenarioConfig.y0)
    override = data.get("consts_override", {})
    if not isinstance(override, dict):
        errors["consts_override"] = "must be a table"
        override = {}
    kwargs = {}
    for key in ("mu", "mu2", "rho_composite", "settle_threshold", "amplitude_t_min"):
        if key in data:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                errors[key] = f"expected a number, got {value!r}"
            else:
                kwargs[key] = float(value)
    for key in ("name", "model"):
        if key in data:
            if not isinstance(data[key], str):
                errors[key] = "expected a string"
            else:
                kwargs[key] = data[key]
    if errors:
        raise ConfigError(errors)
    cfg = ScenarioConfig(
        phys=phys, ctrl=ctrl, disturbance=dist, solver=solver,
        y0=tuple(float(v) for v in y0),
        consts_override={k: float(v) for k, v in override.items()},
        outputs=dict(data.get("outputs", {})),
        **kwargs,
    )
    cfg.validate()
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError({"file": f"{path}: {exc}"}) from exc
    return config_from_dict(data)


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(tomli_w.dumps(config_to_dict(cfg)))


SCENARIOS = ("free_decay", "relay", "sinusoid", "sinusoid_relay", "observer", "full_plant")


def scenario_path(name: str) -> Path:
    """Path of a bundled scenario file."""
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    return Path(str(importlib.resources.files("pendsim.scenarios").joinpath(f"{name}.toml")))


def load_scenario(name: str) -> ScenarioConfig:
    return load_config(scenario_path(name))
