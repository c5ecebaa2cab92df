"""Capacity regions of deterministic and Gaussian many-to-one / one-to-many
interference channels: exact polytopes, constructive schemes, gap checks."""

from ._backend import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
