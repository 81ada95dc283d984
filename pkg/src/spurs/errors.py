"""Exception types shared across the package.

The CLI maps these onto process exit codes: validation problems exit
with 2, numerical failures with 3, and I/O problems with 4.
"""


class ValidationError(ValueError):
    """Invalid parameters, shapes, or mutually inconsistent inputs."""


class OutOfExtentError(ValidationError):
    """A sample coordinate lies outside the grid extent, or its kernel
    footprint is entirely clipped away: trajectory and grid disagree."""


class NumericalError(ArithmeticError):
    """A numerical computation failed (singular pivot, guard tripped)."""


class FactorizationError(NumericalError):
    """Sparse factorization failed; for a positive regularizer this
    signals an assembly bug rather than genuine singularity."""
