class OmitSimError(Exception):
    """Base class for all errors raised by omit_sim."""


class ParameterError(OmitSimError, ValueError):
    """A physical parameter violates its domain."""


class DegenerateInputError(OmitSimError, ValueError):
    """The requested linear system is singular."""


class ConvergenceError(OmitSimError, RuntimeError):
    """A numerical solver failed to reach its tolerance.

    The last residual is kept on the exception so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(OmitSimError, ValueError):
    """Malformed run configuration.

    ``key`` and ``line`` point at the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        where = ""
        if key is not None:
            where = f" [key '{key}'"
            where += f", line {line}]" if line is not None else "]"
        super().__init__(message + where)
        self.key = key
        self.line = line
