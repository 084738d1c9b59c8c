"""Engineered sum- and difference-frequency conversion of ultrafast pulse modes."""

from .conversion import (DeviceReport, coupling_theta, efficiencies, flavor_transform,
                         required_pump_power)
from .dispersion import Axis, Flavor, Role, WaveSpec, congruent_ln, find_gvm_pump, poling_period
from .jsa import JointSpectralAmplitude, ProcessSpec, PumpShape, build_jsa, default_grids
from .schmidt import SchmidtData, schmidt_decompose, schmidt_number
from .spectra import FrequencyGrid, SpectralAmplitude

__version__ = "0.1.0"

__all__ = [
    "Axis", "DeviceReport", "Flavor", "FrequencyGrid", "JointSpectralAmplitude", "ProcessSpec",
    "PumpShape", "Role", "SchmidtData", "SpectralAmplitude", "WaveSpec", "build_jsa",
    "congruent_ln", "coupling_theta", "default_grids", "efficiencies", "find_gvm_pump",
    "flavor_transform", "poling_period", "required_pump_power", "schmidt_decompose",
    "schmidt_number",
]
