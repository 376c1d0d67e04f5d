"""Exception types raised across the package."""


class AbsnError(Exception):
    """Base class for every error raised by abschmidt."""


class ValidationError(AbsnError, ValueError):
    """An input object violates one of its invariants."""


class NotHermitian(ValidationError):
    def __init__(self, deviation: float, tol: float):
        self.deviation = deviation
        self.tol = tol
        super().__init__(f"matrix is not Hermitian: max |A - A^H| = {deviation:.3e} > {tol:.1e}")


class NotUnitary(ValidationError):
    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(f"matrix is not unitary: max |U^H U - I| = {residual:.3e} > {tol:.1e}")


class DimensionMismatch(ValidationError):
    pass


class DimensionOverflow(ValidationError):
    pass


class BadParameter(ValidationError):
    pass


class BadSupport(BadParameter):
    pass


class WrongDimension(DimensionMismatch):
    pass


class TooFewMoments(BadParameter):
    pass


class ZeroMatrix(ValidationError):
    pass


class SingularNormalizer(AbsnError, ArithmeticError):
    pass


class NotAViolation(AbsnError, ValueError):
    """A robustness bound was requested from a certificate that detects nothing."""


class InvalidKraus(ValidationError):
    pass


class NotUnital(ValidationError):
    pass


class BadPriors(BadParameter):
    pass


class SchemaError(ValidationError):
    """Input JSON does not follow the state/channel schema."""
