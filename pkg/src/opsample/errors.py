"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented precondition of the called operation."""


class SingularSystemError(PreconditionError):
    """A linear system that must be invertible is singular or too ill-conditioned."""
