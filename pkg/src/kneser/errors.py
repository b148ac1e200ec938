"""Shared exception types."""


class ParameterError(ValueError):
    """Parameters outside the supported domain (e.g. n < 2k+1, bad vertex)."""


class InternalConsistencyError(RuntimeError):
    """A mathematically guaranteed invariant failed at runtime.

    Raised by always-on redundancy checks; seeing this means a bug in the
    implementation, never a property of the input.
    """
