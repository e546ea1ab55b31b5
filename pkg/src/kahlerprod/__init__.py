"""Verification toolkit for minimal submanifolds of products of complex space forms."""

__version__ = "0.1.0"
