"""Classical simulation of QSP-based Hamiltonian simulation algorithms."""

__version__ = "0.1.0"
