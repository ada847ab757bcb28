"""Hybrid Rebeca to hybrid automaton compiler."""

__version__ = "0.1.0"
