"""Numerical toolkit for solid-state AC Stark magnetic traps and lattices."""

__version__ = "0.1.0"
