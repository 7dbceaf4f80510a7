"""Computable upper bounds on the Hot Spots constant, with numerical checks."""

__version__ = "0.1.0"
