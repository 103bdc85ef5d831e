"""Sandpile-style fungal automata and a circuit-to-configuration compiler."""

__version__ = "0.1.0"
