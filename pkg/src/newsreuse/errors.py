"""Shared exception types."""


class DataError(Exception):
    """Input data is unreadable, malformed, or violates a contract."""
