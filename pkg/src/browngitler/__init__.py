"""Mod 2 Steenrod-algebra computations with dual Brown-Gitler modules."""

__version__ = "0.1.0"
