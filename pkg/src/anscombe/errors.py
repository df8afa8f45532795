"""Exception hierarchy shared by the library and the command line front end."""


class AnscombeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(AnscombeError, ValueError):
    """Two vectors (or a vector and a profile) have different lengths."""


class DomainError(AnscombeError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ResourceError(AnscombeError, RuntimeError):
    """An exhaustive computation would exceed its configured cap."""


class ContractError(AnscombeError, RuntimeError):
    """A documented precondition or postcondition was violated."""


class FormatError(AnscombeError, ValueError):
    """A text file does not follow the expected format.

    ``line`` and ``column`` are 1-based; ``column`` is 0 when the problem
    concerns the line as a whole.
    """

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
