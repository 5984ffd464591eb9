"""Exception types raised by the library."""


class OutageError(Exception):
    """Base class for all library errors."""


class DomainError(OutageError, ValueError):
    """An argument lies outside the domain of the function."""


class ContractError(OutageError, ValueError):
    """Inputs violate a documented precondition (e.g. non-integer m0)."""


class SaturationError(OutageError, RuntimeError):
    """Rejection sampling could not place every mobile.

    ``placed`` is the number of interferers successfully placed before the
    attempt budget ran out; ``realization`` is set by the spatial averaging
    layer when the failure happens inside a batch.
    """

    def __init__(self, message, placed=None, requested=None, realization=None):
        super().__init__(message)
        self.placed = placed
        self.requested = requested
        self.realization = realization


class NumericalError(OutageError, ArithmeticError):
    """A series or quadrature failed to converge."""


class ResourceError(OutageError, RuntimeError):
    """A computation would exceed a configured memory cap."""


class ConfigError(OutageError, ValueError):
    """Invalid experiment configuration.

    ``line`` and ``field`` locate the offending entry when known.
    """

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field
