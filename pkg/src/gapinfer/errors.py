"""Semantic exception hierarchy shared across the package."""


class GapinferError(Exception):
    """Base class for all errors raised by this package."""


class NetworkValidationError(GapinferError):
    """A network failed structural validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ZeroEvidence(GapinferError):
    """Conditioning event has probability exactly zero."""


class UnknownOutcome(GapinferError):
    """An assignment refers to an outcome label a node does not declare."""


class PTMValidationError(GapinferError):
    """A machine failed structural validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingTransition(GapinferError):
    """The transition table has no entry for a (state, symbol, bits) key."""


class EnumerationTooLarge(GapinferError):
    """An exhaustive enumeration would exceed the configured guard."""


class TooManyVariables(GapinferError):
    """Brute-force truth-table counting guard tripped."""


class ReductionError(GapinferError):
    """A reduction was applied to an instance outside its domain."""


class InstanceFormatError(GapinferError):
    """An instance file does not match any known schema."""


class AllSamplesRejected(GapinferError):
    """Rejection sampling discarded every sample; no estimate exists."""
