"""Scannerless GLR parsing with reduce-time disambiguation of deep priority conflicts."""

__version__ = "0.1.0"
