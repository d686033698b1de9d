"""Shared exception types."""


class NumericalError(Exception):
    """A numerical procedure failed: integrator norm drift, bracket without
    a sign change, or a diverging iteration."""
