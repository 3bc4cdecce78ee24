"""Multivariate rigidity quantities on Z-systems."""

__version__ = "0.1.0"

from . import density, fibers, metrics, rigidity, systems  # noqa: E402

__all__ = ["density", "fibers", "metrics", "rigidity", "systems", "__version__"]
