"""Backward-sampling particle smoothers with linear cost."""

from ._backend import BACKEND
from .seeding import make_rng

__version__ = "0.1.0"

__all__ = ["BACKEND", "make_rng", "__version__"]
