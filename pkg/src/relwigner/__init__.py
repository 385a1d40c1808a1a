"""Phase-space simulator for the Dirac equation as an open quantum system."""

from .phase_grid import MatrixPhaseField, PhaseGrid, Representation, make_grid
from .propagator import Potential, PropagatorConfig, Splitting
from .states import SpinorField, WavepacketSpec

__version__ = "0.1.0"

__all__ = [
    "MatrixPhaseField",
    "PhaseGrid",
    "Potential",
    "PropagatorConfig",
    "Representation",
    "SpinorField",
    "Splitting",
    "WavepacketSpec",
    "make_grid",
    "__version__",
]
