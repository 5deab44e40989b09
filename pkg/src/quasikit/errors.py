"""Exception types shared across the package."""


class QuasikitError(Exception):
    """Base class for all quasikit errors."""


class ValidationError(QuasikitError):
    """A precondition or input-format violation (CLI exit code 2)."""


class DomainError(ValidationError):
    """Function evaluation outside its valid domain (bad log/division/power).

    Carries the path of the offending expression node when raised during
    jet propagation.
    """

    def __init__(self, message: str, node_path: str | None = None):
        self.node_path = node_path
        if node_path is not None:
            message = f"{message} (at node {node_path})"
        super().__init__(message)


class ConditioningError(QuasikitError):
    """Numerical blow-up detected (coefficient cap or non-convergent quadrature)."""
