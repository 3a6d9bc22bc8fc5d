"""Exception hierarchy.

Two families matter to callers: ``ValidationError`` (bad input or an
unsupported request, CLI exit code 2) and ``NumericalError`` (a pole or a
singular linear system was hit, CLI exit code 3).
"""


class DiracPointError(Exception):
    """Base class for all library errors."""


class ValidationError(DiracPointError):
    """Input rejected before any numerics ran."""


class NumericalError(DiracPointError):
    """Computation refused or failed for numerical reasons."""


class NonRealNuSquared(ValidationError):
    """det A - (tr A / 2)^2 has a non-negligible imaginary part."""


class NotAdmissible(ValidationError):
    """Matrix is not of the admissible boundary-matrix form."""


class ParityMismatch(ValidationError):
    """Requested branch integer has the wrong parity for this matrix."""


class NonIdentityWithNonzeroM(ValidationError):
    """pi-multiple family requested for a matrix that is not a multiple of I."""


class UnsupportedClass(ValidationError):
    """Operation defined only for phase or traceless generators."""


class GridMismatch(ValidationError):
    """Quadrature grid does not cover the profile support."""


class NotNormalized(ValidationError):
    """Profile integral differs from 1 where normalization is required."""


class Overflow(ValidationError):
    """Requested order exceeds the supported range."""


class PoleOfW(NumericalError):
    """cos(nu) + cos(phi) vanishes; the renormalization matrix has a pole."""


class PoleOfTan(NumericalError):
    """tan argument too close to pi/2 + pi k."""


class SingularDenominator(NumericalError):
    """Closed-form denominator vanishes."""


class NearPole(NumericalError):
    """Spectral parameter too close to the excluded pole set."""


class SingularSystem(NumericalError):
    """Dense linear solve failed or is numerically singular."""
