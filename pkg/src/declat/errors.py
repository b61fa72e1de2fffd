"""Exception hierarchy.

Every error raised for bad *input data* derives from :class:`DomainError`;
the CLI maps those to exit code 1 and usage problems to exit code 2.
"""


class DomainError(Exception):
    """Base class for all domain failures."""


class CycleError(DomainError):
    pass


class DuplicateLabelError(DomainError):
    pass


class UnknownElementError(DomainError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SizeLimitError(DomainError):
    pass


class NotIntervalClosedError(DomainError):
    pass


class NotLowerIdealError(DomainError):
    pass


class NotComparableError(DomainError):
    pass


class NonDistributiveError(DomainError):
    pass


class SchemaError(DomainError):
    pass


class InvalidProximityError(DomainError):
    pass


class ForestMismatchError(DomainError):
    pass


class NotAmpleError(DomainError):
    pass


class NotMinimalError(DomainError):
    pass


class NotEffectiveError(DomainError):
    pass


class UnknownRootError(DomainError):
    pass


class MissingSlotError(DomainError):
    pass


class ParseError(DomainError):
    """Malformed divisor / ideal / t-structure / object text."""
