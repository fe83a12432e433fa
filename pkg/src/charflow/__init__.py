"""Numerical machinery for Hamiltonian flows of invariant functions on
surface-group character varieties into SL(d,R)."""

__version__ = "0.1.0"
