"""Exception types raised across the package."""


class ConeGeoError(Exception):
    """Base class for all package errors."""


class NonHermitian(ConeGeoError, ValueError):
    pass


class NotPositiveDefinite(ConeGeoError, ValueError):
    def __init__(self, min_eig, msg=None):
        self.min_eig = float(min_eig)
        super().__init__(msg or f"matrix is not positive definite (min eigenvalue {self.min_eig:.3e})")


class NotInvertible(ConeGeoError, ValueError):
    pass


class NotUnitary(ConeGeoError, ValueError):
    pass


class DomainError(ConeGeoError, ValueError):
    pass


class DimMismatch(ConeGeoError, ValueError):
    pass


class CapExceeded(ConeGeoError, RuntimeError):
    pass


class EmptyCone(ConeGeoError, ValueError):
    pass


class NotUnitaryGroup(ConeGeoError, ValueError):
    pass


class NotUnitarizable(ConeGeoError, ValueError):
    pass


class EmptyInput(ConeGeoError, ValueError):
    pass


class NotProjection(ConeGeoError, ValueError):
    pass


class NoConvergence(ConeGeoError, RuntimeError):
    def __init__(self, msg, residual=None):
        self.residual = residual
        super().__init__(msg if residual is None else f"{msg} (final residual {residual:.3e})")


class RangeMismatch(ConeGeoError, ValueError):
    pass


class NotNormal(ConeGeoError, ValueError):
    pass


class BadSpec(ConeGeoError, ValueError):
    pass


class MatrixFileError(ConeGeoError, OSError):
    """Unreadable or malformed matrix/group file; always names the file."""

    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")
