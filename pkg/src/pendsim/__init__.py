"""Simulation and stability diagnostics for a relay-controlled inverted
pendulum on a cart, in physical and transformed coordinates."""

from .control import observer_components, relay, stabilizing_control, u_bar, u_components
from .dynamics import (Disturbance, SingularState, reduced_rhs, singular_rhs,
                       sliding_rhs)
from .experiments import (ScenarioConfig, basin_probe, compare_models, run_scenario,
                          sweep_mu)
from .io import load_config, load_scenario, save_config, write_csv
from .model import (ControllerParams, DerivedConstants, FullState, PhysicalParams,
                    accelerations, derive_constants, full_rhs, psi)
from .solver import SolverOptions, Trajectory, dense_eval, integrate
from .transform import ReducedState, beta_of_omega, full_to_reduced, omega_of_beta, reduced_to_full

__version__ = "0.1.0"

__all__ = [
    "ControllerParams", "DerivedConstants", "Disturbance", "FullState", "PhysicalParams",
    "ReducedState", "ScenarioConfig", "SingularState", "SolverOptions", "Trajectory",
    "accelerations", "basin_probe", "beta_of_omega", "compare_models", "dense_eval",
    "derive_constants", "full_rhs", "full_to_reduced", "integrate", "load_config",
    "load_scenario", "observer_components", "omega_of_beta", "psi", "reduced_rhs",
    "reduced_to_full", "relay", "run_scenario", "save_config", "singular_rhs",
    "sliding_rhs", "stabilizing_control", "sweep_mu", "u_bar", "u_components", "write_csv",
]
