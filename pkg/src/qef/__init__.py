"""Encoder synthesis and fault-propagation analysis for CSS and
entanglement-assisted quantum LDPC codes."""

from qef._backend import NAME as BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
