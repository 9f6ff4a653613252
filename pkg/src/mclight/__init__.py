"""Adiabatic multi-color slow and stationary light in multi-Lambda EIT media."""

from .dispersion import D2Mode, dispersion_relation, group_velocity, second_order_dispersion, stopping_residual
from .gaussian import GaussianPulseSpec, evolve_gaussian
from .medium import ChannelSpec, ControlSchedule, MediumSpec, derive_coefficients
from .propagator import SpectralGrid, evolve, init_probe, synthesize
from .twophoton import TwoPhotonSpec

__all__ = [
    "ChannelSpec",
    "ControlSchedule",
    "D2Mode",
    "GaussianPulseSpec",
    "MediumSpec",
    "SpectralGrid",
    "TwoPhotonSpec",
    "derive_coefficients",
    "dispersion_relation",
    "evolve",
    "evolve_gaussian",
    "group_velocity",
    "init_probe",
    "second_order_dispersion",
    "stopping_residual",
    "synthesize",
]
