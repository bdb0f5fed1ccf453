"""Offline Shor-style attack on a toy elliptic-curve discrete logarithm."""

__version__ = "0.1.0"
