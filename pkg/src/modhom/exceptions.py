"""Exception types shared across the package."""


class SortError(ValueError):
    """A sort labeling is inconsistent with the graph or the operation."""


class SearchExhausted(RuntimeError):
    """A bounded search finished without finding what it was looking for."""


class VerificationFailed(AssertionError):
    """A computed identity did not hold."""
