"""Exception hierarchy shared by every module in the package."""


class QrsError(Exception):
    """Base class for all errors raised by qrs."""


# entropy backends
class EntropyError(QrsError):
    """A randomness backend failed to deliver data."""


class DeviceUnavailable(EntropyError):
    """The backing device, file or remote endpoint cannot be reached."""


class ShortRead(EntropyError):
    """The byte stream ended before the requested amount was read."""


# argument validation
class InvalidParameter(QrsError, ValueError):
    pass


class InvalidRange(InvalidParameter):
    pass


class EmptyList(InvalidParameter):
    pass


class TooManyEdges(InvalidParameter):
    pass


class NotDistribution(InvalidParameter):
    """A vector is not a probability vector within tolerance."""


# linear algebra
class LinalgError(QrsError, ArithmeticError):
    pass


class NotSquare(LinalgError):
    pass


class NotHermitian(LinalgError):
    pass


class NotPsd(LinalgError):
    pass


class DimensionMismatch(LinalgError, ValueError):
    pass


class NoConvergence(LinalgError):
    pass


class RankDeficient(LinalgError):
    pass


# generators
class Degenerate(QrsError):
    """A probability-zero degeneracy occurred twice in a row."""


class SingularAncilla(Degenerate):
    pass


class InvariantViolation(QrsError, ValueError):
    """A state object failed its type invariants."""
