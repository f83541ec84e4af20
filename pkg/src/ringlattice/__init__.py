"""Lattice reduction and successive minima over real, complex and
quaternionic integer rings."""

from .rings import Domain, RingId, Scalar
from .linalg import Matrix

__version__ = "0.1.0"

__all__ = ["Domain", "Matrix", "RingId", "Scalar", "__version__"]
