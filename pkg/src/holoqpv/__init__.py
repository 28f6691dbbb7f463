"""Holographic tensor networks, Hamiltonian simulation budgets and causality checks."""

__version__ = "0.1.0"
