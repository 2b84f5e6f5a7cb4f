"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class PadicTriError(Exception):
    """Base class for all package errors."""


class InsufficientPrecision(PadicTriError):
    """A decision needs p-adic digits that are not available."""


class ZeroArgument(PadicTriError):
    pass


class NotInDomain(PadicTriError):
    pass


class ValidationError(PadicTriError):
    """Input data violates a structural invariant."""


class NotLargelyContinuous(ValidationError):
    pass


class EmptyFace(PadicTriError):
    pass


class WindowTooLarge(PadicTriError):
    pass


class NotLowerSubset(PadicTriError):
    pass


class EmptyTarget(PadicTriError):
    pass


class NotFitting(PadicTriError):
    pass


class DivisionByZeroAtSample(PadicTriError):
    pass


class NotInCell(PadicTriError):
    pass


class NotInComplex(PadicTriError):
    pass


class PreconditionViolation(PadicTriError):
    """Raised by the dispatcher; ``claim`` names the failed precondition."""

    def __init__(self, claim: str, detail: str = ""):
        self.claim = claim
        self.detail = detail
        super().__init__(f"{claim}: {detail}" if detail else claim)


class PostconditionViolation(PadicTriError):
    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        self.detail = detail
        super().__init__(f"{condition}: {detail}" if detail else condition)


class CertificationFailure(PadicTriError):
    def __init__(self, claim: str, detail: str = ""):
        self.claim = claim
        self.detail = detail
        super().__init__(f"{claim}: {detail}" if detail else claim)


class BadDirection(PadicTriError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ZeroPolynomial(PadicTriError):
    pass
