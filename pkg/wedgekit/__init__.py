"""Euler elements, wedge spaces and standard subspaces at desk scale."""

__version__ = "1.0.0"
