"""Simulation, calibration and sensitivity analysis for a five-compartment
scam-propagation model (S, V, R, As, Rs)."""

from .model import (NOMINAL_PARAMS, Parameters, State, StabilityClass,
                    classify_sfe_stability, lyapunov_L, lyapunov_M,
                    next_generation_matrix, reproduction_number, rhs,
                    see_condition, sfe)

__all__ = [
    "NOMINAL_PARAMS", "Parameters", "State", "StabilityClass",
    "classify_sfe_stability", "lyapunov_L", "lyapunov_M",
    "next_generation_matrix", "reproduction_number", "rhs",
    "see_condition", "sfe",
]

__version__ = "0.1.0"
