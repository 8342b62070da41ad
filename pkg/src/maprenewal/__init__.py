"""Numerical laboratory for the centred Markov renewal theorem in dimension d >= 3."""

__version__ = "0.1.0"
