"""Exception types shared across the package."""


class CapampError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(CapampError):
    """Matrix is further from Hermitian than the allowed tolerance."""


class NotAState(CapampError):
    """Operator fails a density-operator requirement (PSD / unit trace)."""


class NotAChannel(CapampError):
    """Operator fails a channel requirement (CP or trace preservation)."""


class InvalidSpec(CapampError):
    """A constructor specification violates its invariants."""


class DimensionMismatch(CapampError):
    """Operands have incompatible dimensions."""


class DimensionCap(CapampError):
    """Requested construction would exceed the configured dimension cap."""


class NotOrthogonal(CapampError):
    """States required to have orthogonal supports do not."""


class InfeasibleParams(CapampError):
    """Parameter combination admits no certificate via this bound."""
