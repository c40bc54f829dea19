"""Exception hierarchy shared by every module."""


class ExpnetError(ValueError):
    """Base class for all errors raised by this package."""


class NotPrimePower(ExpnetError):
    pass


class NonSquare(ExpnetError):
    pass


class NotAField(ExpnetError):
    """Raised when an operation needs division and the ring has zero divisors."""


# rank needs a field as well; same condition, named for the call site
RankOverNonField = NotAField


class BadParams(ExpnetError):
    pass


class DimensionMismatch(ExpnetError):
    pass


class CapExceeded(ExpnetError):
    """An exhaustive scan would exceed the configured state or observation cap."""


class NotExpansive(ExpnetError):
    pass


class NotBijective(ExpnetError):
    pass


class NotCoverable(ExpnetError):
    pass


class AlphabetTooSmall(ExpnetError):
    pass


class NoLinearSolution(ExpnetError):
    pass


class NotCycleOfCycles(ExpnetError):
    pass


class UnsupportedAlphabet(ExpnetError):
    pass


class BushBoundViolated(ExpnetError):
    pass


class TooFewWords(ExpnetError):
    pass


class NotSuperExpansive(ExpnetError):
    pass


class ParseError(ExpnetError):
    """Malformed input file."""
