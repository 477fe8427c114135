"""Exception hierarchy shared by all decotrace modules."""


class DecotraceError(Exception):
    """Base class for every error raised by decotrace."""


class ConfigurationError(DecotraceError, ValueError):
    """Inputs that are individually valid but cannot be used together."""


class DomainError(DecotraceError, ValueError):
    """A query outside the domain where a quantity is defined."""


class NumericalError(DecotraceError, ArithmeticError):
    """A numerical procedure failed to converge or to produce a result."""


class TruncationError(NumericalError):
    """Too much probability mass was lost at the edges of a grid."""


class ValidityError(DecotraceError, ValueError):
    """A density matrix failed the Hermiticity / trace / positivity gate."""


class ScenarioError(ConfigurationError):
    """Invalid scenario parameter.

    ``field`` names the offending parameter and ``line`` is the 1-based line
    number in the scenario file, when the error came from a file.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
