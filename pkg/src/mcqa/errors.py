"""Shared exception base for the package."""


class McqaError(Exception):
    """Base class for every error this package raises on purpose."""
