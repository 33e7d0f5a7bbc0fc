"""Exception types raised across the package."""


class AuctionError(ValueError):
    """Base class for invalid inputs and violated preconditions."""


class NonIncreasingSupport(AuctionError):
    pass


class NonPositiveMass(AuctionError):
    pass


class MassNotOne(AuctionError):
    pass


class NonPositiveValue(AuctionError):
    pass


class BadCardinality(AuctionError):
    pass


class EmptyBundle(AuctionError):
    pass


class NotDownwardClosed(AuctionError):
    pass


class BuyerNeverWins(AuctionError):
    pass


class TooManySets(AuctionError):
    pass


class ProfileSpaceTooLarge(AuctionError):
    """Raised when exhaustive enumeration would exceed the profile cap."""


class MonotonicityViolated(AuctionError):
    """Interim win probabilities decrease somewhere; no IC/IR payment rule exists."""


class KTooSmall(AuctionError):
    pass


class ParseError(AuctionError):
    """Instance or sweep file could not be read; message carries the field path."""


class NonConvergenceWarning(RuntimeWarning):
    """Optimizer budget ran out before the stationarity tolerance was met."""
