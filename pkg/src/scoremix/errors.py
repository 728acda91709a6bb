"""Exception types shared across the package."""


class ScoremixError(Exception):
    pass


class DomainError(ScoremixError, ValueError):
    """An argument lies outside the domain of a score or type."""


class NonAdmissibleError(ScoremixError, ValueError):
    """A caller-supplied g or phi produced a negative score."""


class QuadratureError(ScoremixError, ArithmeticError):
    pass


class InsufficientDataError(ScoremixError, ValueError):
    pass


class DataError(ScoremixError, ValueError):
    """Malformed input data (CSV parsing, invalid outcomes)."""
