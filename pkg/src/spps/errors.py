"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SppsError(Exception):
    exit_code = 1


class ParseError(SppsError, ValueError):
    """Malformed config or data file."""

    exit_code = 2

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}" if where else message)


class ValidityError(SppsError, ValueError):
    """Inputs outside the regime where the model applies."""

    exit_code = 3


class ResolutionError(ValidityError):
    """A grid too coarse (or too small) for the requested computation."""


class FitError(SppsError, RuntimeError):
    exit_code = 4


class InfeasibleError(SppsError, ValueError):
    exit_code = 4


class UnidentifiableError(InfeasibleError):
    """The data cannot constrain the requested parameter."""
