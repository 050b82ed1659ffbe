"""Workbench for thorned-graph spines, free-group automorphism models and exact homology."""

__version__ = "0.1.0"
