class StateError(ValueError):
    """Input fails a state/ensemble invariant (bad JSON, non-physical matrix)."""


class DomainError(ValueError):
    """Numeric argument outside the domain where the quantity is defined."""
