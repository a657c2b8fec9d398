"""Normal modes, Kerr couplings and open dynamics of junction-embedded transmission-line resonators."""

from importlib.metadata import PackageNotFoundError, version as _version

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # pragma: no cover - source checkout without install
    __version__ = "0.1.0"

from .circuit import (CircuitSpec, JunctionSpec, LineSegmentSpec, PortSpec,
                      effective_josephson_energy, load_and_validate_spec)
from .modes import find_modes, mode_properties
from .nonlinear import analyze, nonlinear_couplings, pump_amplitudes

__all__ = [
    "CircuitSpec", "JunctionSpec", "LineSegmentSpec", "PortSpec", "__version__", "analyze",
    "effective_josephson_energy", "find_modes", "load_and_validate_spec", "mode_properties",
    "nonlinear_couplings", "pump_amplitudes",
]
