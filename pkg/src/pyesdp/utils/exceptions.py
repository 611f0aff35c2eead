class PyEsdpError(Exception):
    """Base class for all exceptions raised by the pyesdp package."""

    pass


class InvalidParameterError(PyEsdpError):
    """Exception raised for invalid parameters."""

    pass


class OptionNotAvailableError(PyEsdpError):
    """Exception raised when an option is not available."""

    pass


class ConfigurationError(PyEsdpError):
    """Exception raised for configuration-related errors."""

    pass


class PyEsdpFileNotFoundError(PyEsdpError):
    """Exception raised when a file is not found."""

    pass


class NetworkValidationError(InvalidParameterError):
    """Exception raised when a network instance violates its invariants."""

    pass


class SchemaError(PyEsdpError):
    """Exception raised for malformed network or report files."""

    pass


class SchemaVersionError(SchemaError):
    """Exception raised when a file was written with another schema version."""

    pass


class FormulationError(PyEsdpError):
    """Exception raised when a conic program cannot be built."""

    pass


class SolverError(PyEsdpError):
    """Base class for solver failures."""

    pass


class FactorizationError(SolverError):
    """Exception raised when the KKT system cannot be factorized."""

    pass


class DivergenceError(SolverError):
    """Exception raised when the iterates stop being finite."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


class NotOptimalError(PyEsdpError):
    """Exception raised when an operation needs an optimal solve."""

    pass
