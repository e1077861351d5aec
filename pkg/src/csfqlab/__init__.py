"""Simulation and loss-budget analysis for a capacitively shunted flux qubit."""

from csfqlab.constants import CONST, PhysicalConstants
from csfqlab.model import (
    CavityParams,
    DeviceParams,
    EnergySpectrum,
    Transition,
    TransitionSet,
    build_hamiltonian,
    calibrate_cj,
    flux_sweep,
    spectrum,
    transitions,
)

__version__ = "0.1.0"

__all__ = [
    "CONST",
    "PhysicalConstants",
    "CavityParams",
    "DeviceParams",
    "EnergySpectrum",
    "Transition",
    "TransitionSet",
    "build_hamiltonian",
    "calibrate_cj",
    "flux_sweep",
    "spectrum",
    "transitions",
]
