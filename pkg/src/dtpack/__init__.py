"""Packing and covering directed triangles with exact arithmetic."""

__version__ = "0.1.0"
