"""Symmetric-key quantum encryption: schemes, authentication checks and security games."""
from . import designs, keyed, linalg, schemes

__version__ = "0.1.0"

__all__ = ["designs", "keyed", "linalg", "schemes", "__version__"]
