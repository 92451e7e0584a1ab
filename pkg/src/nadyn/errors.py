"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A computation would exceed its configured size budget."""


class DomainError(ValueError):
    """An operation was applied outside the set where it is defined."""


class NeedsMoreDepth(ValueError):
    """Finite-depth data is insufficient to decide the answer."""


class VerificationError(AssertionError):
    """A checked identity failed; ``witness`` carries the offending input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
