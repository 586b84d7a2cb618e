"""Lattice-theoretic classification of irreducible plane sextics with simple singularities."""

__version__ = "0.1.0"
