"""Relative commutator calculus for elementary subgroups over finite rings."""

__version__ = "0.1.0"
