"""Exception hierarchy shared by every module."""


class LatticeError(ValueError):
    """Base class for all structural errors raised by this package."""


class NotALattice(LatticeError):
    pass


class NotReduced(LatticeError):
    pass


class BadOrder(LatticeError):
    pass


class MultipleExtremes(LatticeError):
    pass


class NotSlim(LatticeError):
    pass


class NotSublattice(LatticeError):
    pass


class NotIntervalClasses(LatticeError):
    pass


class NotACongruence(LatticeError):
    pass


class TooLarge(LatticeError):
    pass


class NotCoveringSquare(LatticeError):
    pass


class NotSPS(LatticeError):
    pass


class PreconditionViolated(LatticeError):
    pass


class EmbeddingInconsistent(LatticeError):
    pass


class HasProtrusion(LatticeError):
    pass


class NotTight(LatticeError):
    pass


class NotWide(LatticeError):
    pass


class NoProtrusion(LatticeError):
    pass


class NonTermination(RuntimeError):
    pass


class UnknownName(KeyError):
    pass


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
