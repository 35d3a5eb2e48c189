"""
Fusion - dispatch of fusion requests to the binary and multi-way solvers.
"""

from .dispatcher import (
    FusionPolicy,
    binary_fuse,
    fuse,
)

__all__ = [
    "FusionPolicy",
    "binary_fuse",
    "fuse",
]
