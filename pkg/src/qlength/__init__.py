"""Quantum lengths of particles confined in boxes, rods and rulers."""

from .errors import QuantumLengthError

__version__ = "0.1.0"

__all__ = ["QuantumLengthError", "__version__"]
