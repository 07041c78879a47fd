"""Circuit builders and simulators for post-selection, thermalisation and OAA."""
from .core import Circuit, execute, run_pure
from .groundstate import (
    build_groundstate_thermalise,
    build_nor,
    build_pea_unit,
    build_scrambler,
    initial_state,
    nor_output,
    simulate_groundstate_thermalise,
)
from .oaa import build_oaa, demo_unit, oaa_success, oaa_with_angle_error, success_probability
from .perceptron import (
    ThermaliseConfig,
    build_perceptron_thermalise,
    build_perceptron_unit,
    derive_reset,
    failure_isometry,
    simulate_perceptron_thermalise,
    success_operator,
)
from .rus import RUSResult, mean_trials, run_rus

__all__ = [
    "Circuit", "execute", "run_pure",
    "build_groundstate_thermalise", "build_nor", "build_pea_unit", "build_scrambler",
    "initial_state", "nor_output", "simulate_groundstate_thermalise",
    "build_oaa", "demo_unit", "oaa_success", "oaa_with_angle_error", "success_probability",
    "ThermaliseConfig", "build_perceptron_thermalise", "build_perceptron_unit", "derive_reset",
    "failure_isometry", "simulate_perceptron_thermalise", "success_operator",
    "RUSResult", "mean_trials", "run_rus",
]
