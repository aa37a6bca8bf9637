"""Exception hierarchy shared by every tailwave module."""


class TailwaveError(Exception):
    """Base class for all library errors."""


class ExprSyntaxError(TailwaveError, SyntaxError):
    """Coefficient text does not match the grammar.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class UnknownIdentifier(TailwaveError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class SingularPoint(TailwaveError, ArithmeticError):
    """A denominator or logarithm argument vanishes at an evaluation point."""


class AllPointsSingular(TailwaveError):
    """Every sample drawn for a zero test hit a singular point."""


class IndeterminateTermination(TailwaveError):
    """Zero testing could not decide whether a sequence element vanishes."""


class SingularPath(TailwaveError):
    """An integration path or grid rectangle meets a singular line."""


class UnstableCell(TailwaveError, ArithmeticError):
    """The characteristic cell pivot is numerically zero."""


class CflViolation(TailwaveError):
    pass


class SupportNotAligned(TailwaveError):
    """A data support edge falls between grid nodes."""


class NotCpp(TailwaveError):
    pass


class NotTerminating(TailwaveError):
    pass


class RegionEmpty(TailwaveError):
    pass


class ExactScheme(TailwaveError):
    """Successive grid differences are at round-off, so no order exists."""
