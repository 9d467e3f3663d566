"""Exception hierarchy shared by every module of the package."""


class GehmError(Exception):
    """Base class for all library errors."""


class ParameterError(GehmError, ValueError):
    """An argument is outside its admissible range."""


class InputError(GehmError, ValueError):
    """An array argument has the wrong shape or non-finite entries."""


class ConfigError(GehmError, ValueError):
    """A configuration is invalid.

    ``problems`` lists every violation found, not only the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class GraphParseError(GehmError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(GehmError, ValueError):
    pass


class DomainError(GehmError, ValueError):
    """The inputs fall outside the domain where the quantity is defined."""


class InsufficientDataError(GehmError, ValueError):
    pass


class UnsupportedFormError(GehmError, ValueError):
    """An operation received a reaction form it does not support."""


class NonConvergenceError(GehmError, RuntimeError):
    pass
