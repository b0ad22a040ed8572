"""Exception hierarchy.

Two families matter to callers: :class:`DomainError` (bad input, a violated
precondition) and :class:`NumericalError` (the computation itself failed).
The command-line front end maps them to exit codes 2 and 3.
"""


class LevyMEError(Exception):
    """Base class for all library errors."""


class DomainError(LevyMEError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericalError(LevyMEError, ArithmeticError):
    """A numerical procedure failed to deliver the promised accuracy."""


class SingularMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class MultipleRoots(NumericalError):
    """Eigenvalues (or polynomial roots) are too close to be treated as simple."""


class ConfluentRoots(MultipleRoots):
    """The roots of psi(z) = q are not distinct."""


class DomainViolation(DomainError):
    pass


class ContourLeavesDomain(DomainError):
    pass


class ConjugationViolation(DomainError):
    pass


class DefectiveSample(DomainError):
    pass


class BranchCut(DomainError):
    pass


class LeftHalfPlane(NumericalError):
    pass


class ResidualTooLarge(NumericalError):
    pass


class SingularAtZero(DomainError):
    pass


class QuadratureFailure(NumericalError):
    pass


class SingularScaleMatrix(NumericalError):
    pass


class EigenvalueCollision(DomainError):
    pass


class BetaDomain(DomainError):
    pass


class ProbabilityOutOfRange(NumericalError):
    pass


class ImaginaryResidue(NumericalError):
    """A result that must be real carries a non-negligible imaginary part."""


class InsufficientPassages(NumericalError):
    pass


class UnknownOperation(DomainError):
    pass


class CancellationWarning(RuntimeWarning):
    """Series summation lost more digits than the documented envelope allows."""
