"""Exact Weil representations, local Hecke algebras and Satake transforms for discriminant forms."""

__version__ = "0.1.0"
