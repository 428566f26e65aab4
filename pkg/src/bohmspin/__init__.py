"""Bohmian trajectories under the spin-extended guidance law in two dimensions."""

__version__ = "0.1.0"

from .errors import (ConfigError, EmptyRingWarning, InsufficientSamples, NodeRegion,  # noqa: E402
                     ParseError, UnsupportedModel, ValidationError)
from .guidance import SPIN_OFF, SPIN_ON, GuidanceMode, SpinVector  # noqa: E402
from .wavefunction import GaussianPacket, PhysicalConstants, WaveModel  # noqa: E402

__all__ = [
    "ConfigError", "EmptyRingWarning", "InsufficientSamples", "NodeRegion", "ParseError",
    "UnsupportedModel", "ValidationError", "SPIN_OFF", "SPIN_ON", "GuidanceMode", "SpinVector",
    "GaussianPacket", "PhysicalConstants", "WaveModel",
]
