"""Exception types shared across the package."""


class OrbitRangeError(Exception):
    """Base class for errors raised by :mod:`orbitrange`."""


class RepresentationError(OrbitRangeError, ValueError):
    """Raised when a value cannot be represented (e.g. a non-monotone head)."""


class DomainError(OrbitRangeError, ValueError):
    """Raised when arguments are well formed but outside an operation's domain."""


class NotAMemberError(DomainError):
    """Raised when a point lies outside a region by more than the tolerance.

    The ``theta`` attribute holds a separating direction: the point ``z``
    satisfies ``Re(exp(-1j*theta)*z) > h(theta) + tol``.
    """

    def __init__(self, msg, theta, margin):
        super().__init__(msg)
        self.theta = theta
        self.margin = margin


class ConfigError(DomainError):
    """Raised for malformed configuration files; ``location`` names the field."""

    def __init__(self, location, msg):
        super().__init__(f"{location}: {msg}")
        self.location = location
