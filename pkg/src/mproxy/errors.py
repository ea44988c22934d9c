"""Exception types raised across the package."""


class ProxySigError(Exception):
    """Base class for all errors raised by this package."""


class ParamsError(ProxySigError, ValueError):
    """Invalid or inconsistent group parameters."""


class MismatchedParamsError(ParamsError):
    """Operands belong to different groups."""


class SearchExhaustedError(ProxySigError):
    """Parameter generation ran out of candidates."""


class NotInvertibleError(ProxySigError, ArithmeticError):
    pass


class InjectionForbiddenError(ProxySigError):
    """A challenge oracle was supplied for a non-test group."""


class WarrantError(ProxySigError, ValueError):
    """A warrant violates its structural invariants."""


class ConformanceError(ProxySigError):
    """A message is outside the scope or validity window of a warrant."""


class InvalidDelegationError(ProxySigError):
    """A delegation (single proxy) failed its key check."""


class ShareInvalidError(ProxySigError):
    """A multi-proxy delegation share failed verification."""


class SelfCheckError(ProxySigError):
    """A derived signing key does not match its verification key."""


class PhaseError(ProxySigError):
    """A session operation was called in the wrong phase."""


class MissingCommitmentError(ProxySigError):
    def __init__(self, missing):
        self.missing = tuple(sorted(missing))
        super().__init__(
            "missing commitment(s) for index " + ", ".join(map(str, self.missing))
        )


class DuplicateContributionError(ProxySigError):
    pass


class SessionAbortedError(ProxySigError):
    def __init__(self, blame):
        self.blame = frozenset(blame)
        super().__init__(
            "session aborted; blame: " + ", ".join(map(str, sorted(self.blame)))
        )


class FormatError(ProxySigError, ValueError):
    """A value file could not be parsed."""
