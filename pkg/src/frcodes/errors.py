"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`FRError`,
which is a ``ValueError`` so callers that only care about bad input can catch
that instead.
"""


class FRError(ValueError):
    pass


# fr-core
class NonUniformNodeSize(FRError):
    pass


class NonUniformRepetition(FRError):
    pass


class UnusedSymbol(FRError):
    pass


class ParameterMismatch(FRError):
    pass


class NotAnFRCode(FRError):
    pass


class BudgetExceeded(FRError):
    pass


# fr-designs
class NotPrime(FRError):
    pass


class NotPrimePower(FRError):
    pass


class TooManyClasses(FRError):
    pass


class InvalidOrder(FRError):
    pass


class NotRegular(FRError):
    pass


class UnknownName(FRError):
    pass


# fr-compose
class NonDivisible(FRError):
    pass


class NoResolution(FRError):
    pass


class BadIndex(FRError):
    pass


# fr-analysis
class BadK(FRError):
    pass


class PreconditionFailed(FRError):
    pass


class NotSteiner(FRError):
    pass


class PropertyViolation(FRError):
    """A computed quantity contradicts a proven closed form or invariant."""


# fr-sim
class TooManySymbols(FRError):
    pass


class FileSizeMismatch(FRError):
    pass


class InsufficientSymbols(FRError):
    pass


class UnrepairableFailure(FRError):
    def __init__(self, msg, state=None, stuck=()):
        super().__init__(msg)
        self.state = state
        self.stuck = tuple(stuck)
