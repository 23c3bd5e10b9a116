class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""
