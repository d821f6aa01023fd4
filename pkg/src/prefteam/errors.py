"""Exception hierarchy."""


class PrefTeamError(Exception):
    """Base class for all errors raised by this package."""


class FormulaSyntaxError(PrefTeamError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownVariableError(FormulaSyntaxError):
    pass


class ArityError(FormulaSyntaxError):
    pass


class FragmentError(PrefTeamError, ValueError):
    """Operation not defined for the formula's fragment."""


class DomainError(PrefTeamError, ValueError):
    """Mismatched domains or variables outside the domain."""


class DomainTooLargeError(DomainError):
    pass


class ModelError(PrefTeamError, ValueError):
    """Malformed preferential model (e.g. a cyclic order)."""


class PreconditionError(PrefTeamError):
    pass
