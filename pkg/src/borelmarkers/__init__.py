"""Executable marker, weak Rokhlin tower and coboundary constructions for
computable free Z^d actions."""

__version__ = "0.1.0"
