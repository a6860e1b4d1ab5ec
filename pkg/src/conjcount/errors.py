"""Exception hierarchy.  Every error carries a short machine-readable ``code``."""


class ConjCountError(Exception):
    code = "error"


class UsageError(ConjCountError, ValueError):
    code = "usage"


class UnstableCodingError(ConjCountError):
    """The coset acceptor did not stabilise or failed oracle verification."""

    code = "unstable_coding"

    def __init__(self, message, verified_len=-1):
        super().__init__(message)
        self.verified_len = verified_len


class BudgetError(ConjCountError):
    code = "budget"


class AuditError(ConjCountError):
    """A numerically estimated constant was contradicted by a computed value."""

    code = "audit"


class CodingError(ConjCountError):
    """The coding produced colliding or non-geodesic output."""

    code = "coding"


class ConvergenceError(ConjCountError):
    code = "convergence"
