"""Exception types shared across the package."""


class RCCountError(Exception):
    """Base class for all package errors."""


class KPViolation(RCCountError):
    """A polymer weight broke the Kotecky-Preiss style bound."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DecayViolation(RCCountError):
    """A computed contour weight exceeded the configured decay envelope."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingConstant(RCCountError):
    pass


class RegimeMismatch(RCCountError):
    pass


class BudgetExceeded(RCCountError):
    pass


class Timeout(RCCountError):
    pass


class NotSimplyConnected(RCCountError):
    pass


class InvalidCollection(RCCountError):
    pass
