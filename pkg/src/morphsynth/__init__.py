"""Combinatorial synthesis of modular systems from design alternatives."""

__version__ = "0.1.0"
