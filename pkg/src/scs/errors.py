"""Exception hierarchy shared by all pipelines.

The CLI maps these onto exit codes: invalid input is a usage error (2),
resource errors are 3, and negative mathematical verdicts are 1.
"""

from __future__ import annotations


class ScsError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(ScsError, ValueError):
    """Malformed or out-of-range input (bad word, bad table, bad path)."""


class ResourceError(ScsError):
    """A configured cap (sheets, retries, iterations) was exceeded."""


class VerificationFailed(ScsError):
    """A construction produced an object that failed its own validation."""


class InternalInconsistency(ScsError):
    """A mathematical guarantee was violated at run time; never expected."""


class ConjugateInto(ScsError):
    """Raised when a separating witness is requested but H2 is conjugate into H1."""

    def __init__(self, conjugator, message: str | None = None):
        self.conjugator = conjugator
        super().__init__(message or f"H2 is conjugate into H1 via g = {conjugator}")


class ConjugateIntoDetected(ScsError):
    """The finished cover has a sheet fixed by every H2 generator."""

    def __init__(self, fixed_sheet: int):
        self.fixed_sheet = fixed_sheet
        super().__init__(f"H2 generators share fixed sheet {fixed_sheet}; H2 is conjugate into H3")


class NormalizerConditionUnverified(ScsError):
    """The normalizer condition could not be confirmed for the input tree of groups."""


class NormalizerConditionFails(NormalizerConditionUnverified):
    """Face propagation never terminates: some edge subgroup is normalized by a hyperbolic element."""

    def __init__(self, message: str, chain=None):
        self.chain = chain or []
        super().__init__(message)
