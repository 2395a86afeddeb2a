"""Braiding topology of two-band non-Hermitian chains and their circuit realizations."""

__version__ = "0.1.0"

from .braid import Axis, braid_report, braiding_index_integral, braiding_index_roots, phase_diagram
from .errors import (
    BraidkitError,
    ConvergenceError,
    DomainError,
    EPOnGridError,
    NotRepresentableError,
    PhaseBoundaryError,
    ReferenceOnSpectrumError,
    SingularLaplacianError,
)
from .model import ModelSpec, bloch_eigenvalues, bloch_hamiltonian, load_model

__all__ = [
    "ModelSpec", "bloch_hamiltonian", "bloch_eigenvalues", "load_model",
    "Axis", "braid_report", "braiding_index_integral", "braiding_index_roots", "phase_diagram",
    "BraidkitError", "DomainError", "PhaseBoundaryError", "ReferenceOnSpectrumError",
    "EPOnGridError", "SingularLaplacianError", "NotRepresentableError", "ConvergenceError",
]
