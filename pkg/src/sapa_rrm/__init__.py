"""Split-aperture phased-array radar resource management for tracking tasks."""

__version__ = "0.1.0"
