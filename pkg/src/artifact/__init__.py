"""Exact finite-precision workbench for toric frames, perfectoid period rings,
Gamma-actions, phi-module slopes and deperfection algorithms."""

__version__ = "0.1.0"
