"""Greedy coin change reduction: compile Turing machines into change-making instances."""

__version__ = "0.1.0"
