"""Exception hierarchy.

Numerical failures carry the lattice site (when known) so that callers and
the command line front end can report where a computation broke down.
"""


class DPSError(Exception):
    """Base class for all package errors."""

    def __init__(self, message, site=None):
        if site is not None:
            message = f"{message} (site {tuple(site)})"
        super().__init__(message)
        self.site = site


class TruncationError(DPSError):
    """A loop product would exceed the configured maximum band."""


class PoleAtZero(DPSError):
    pass


class SingularFrame(DPSError):
    pass


class SingularOnCircle(DPSError):
    """Loop is not invertible somewhere on the unit circle."""


class NoConvergence(DPSError):
    pass


class SingularToeplitz(DPSError):
    """Truncated Toeplitz system is rank deficient (nontrivial partial indices)."""


class NonDiagonalAtInfinity(DPSError):
    pass


class NonUnitaryFrame(DPSError):
    pass


class BranchAmbiguity(DPSError):
    pass


class DependenceViolation(DPSError):
    pass


class BranchFailure(DPSError):
    pass


class CompatibilityViolation(DPSError):
    pass


class DegenerateStep(DPSError):
    pass


class ConfigError(DPSError):
    """Invalid run configuration or violated precondition on input data."""
