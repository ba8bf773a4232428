"""Exact scheduling toolkit for multi-project problems with alternative chains and flexible durations."""
__version__ = "0.1.0"
