"""Desk-scale laboratory for in-browser cryptojacking."""
__version__ = "0.1.0"
