"""Exception hierarchy for symdisc."""


class SymdiscError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitian(SymdiscError, ValueError):
    pass


class NoConvergence(SymdiscError, ArithmeticError):
    pass


class DimensionMismatch(SymdiscError, ValueError):
    pass


class BadLength(SymdiscError, ValueError):
    pass


class NotNormalized(SymdiscError, ValueError):
    pass


class DegenerateCoefficient(SymdiscError, ValueError):
    """A canonical coefficient vanishes, so the states are linearly dependent."""


class OutOfRange(SymdiscError, ValueError):
    pass


class NotCirculant(SymdiscError, ValueError):
    pass


class NegativeCoefficient(SymdiscError, ArithmeticError):
    pass


class InadmissibleProbabilities(SymdiscError, ValueError):
    """The requested conditional probabilities leave the failure element non-positive."""


class DegenerateOverlap(SymdiscError, ValueError):
    pass


class BadDistribution(SymdiscError, ValueError):
    pass


class BadGrid(SymdiscError, ValueError):
    pass


class CutoffTooLarge(SymdiscError, ValueError):
    pass
