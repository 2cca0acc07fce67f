"""Exception hierarchy shared across the package."""


class QresError(Exception):
    """Base class for all package errors."""


class DimensionError(QresError):
    """Shape mismatch: non-square input, singular basis, rank mismatch."""


class DegenerateInputError(QresError):
    """An input value is degenerate, for example the zero vector."""


class PreconditionError(QresError):
    """A documented hypothesis of the requested operation does not hold.

    CLI commands map this class (and subclasses) to exit code 2.
    """


class NotRepresentableError(PreconditionError):
    """No coordinate carries a unit character, so no standard cone exists."""


class UnsupportedInputError(PreconditionError):
    """The quotient group attached to a cone is not cyclic."""


class NoFaithfulDivisorError(PreconditionError):
    """A singular cone has no marked ray with unit character."""


class GluePreconditionError(PreconditionError):
    """The substitution does not fix the divisor ideal as required."""


class SupportError(PreconditionError):
    """A vector lies outside the support of a fan."""


class InfiniteQuotientError(QresError):
    """The row lattice does not have full rank, so the quotient is infinite."""


class ReplayError(QresError):
    """A trace does not replay against the given input."""


class MeasureError(QresError):
    """The termination measure failed to decrease.

    Raising this is a bug certificate; the CLI maps it to exit code 4.
    """


class FanParseError(QresError):
    """A fan or trace file failed to parse."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
