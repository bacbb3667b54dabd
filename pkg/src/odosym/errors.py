"""Exception hierarchy shared across the toolkit."""


class OdosymError(Exception):
    """Base class for all toolkit errors."""


class MatrixParseError(OdosymError, ValueError):
    """Bad matrix/vector/box text; records the offending token and position."""

    def __init__(self, message, token=None, position=None):
        super().__init__(message)
        self.token = token
        self.position = position


class SingularMatrixError(OdosymError, ValueError):
    """An operation required a nonsingular integer matrix."""


class NotExpansionError(OdosymError, ValueError):
    """The base matrix must have all eigenvalues of modulus > 1."""


class DomainValidationError(OdosymError, ValueError):
    """A candidate fundamental domain failed validation."""


class DomainCardinalityError(DomainValidationError):
    """Wrong number of coset representatives."""


class DomainCosetCollisionError(DomainValidationError):
    """Two representatives fall in the same coset."""


class DomainMissingZeroError(DomainValidationError):
    """The zero vector is required as a representative."""


class RadicalDomainError(OdosymError, ValueError):
    """radical(n) needs |n| > 1."""


class DepthError(OdosymError, ValueError):
    """Requested depth exceeds what the base or point supports."""


class MissingCertificateError(OdosymError, ValueError):
    """A digit map was requested without a witness at some level."""


class BaseMismatchError(OdosymError, ValueError):
    """Two odometer points live over different bases or depths."""


class SizeGuardError(OdosymError, ValueError):
    """A desk-scale size guard tripped (support or search too large)."""


class WrongBranchError(OdosymError, ValueError):
    """Operation called on a base matrix outside its classification branch."""


class PellDomainError(OdosymError, ValueError):
    """Discriminant must be positive and not a perfect square."""


class MarginError(OdosymError, ValueError):
    """Patch support too small for the sliding-block evaluation requested."""


class WindowError(OdosymError, ValueError):
    """A pattern window was too small or inconsistent for decoding."""
