"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class WmlabError(Exception):
    exit_code = 1


class ConfigError(WmlabError, ValueError):
    """Bad parameters, bad dimensions, unsupported combinations."""

    exit_code = 2


class DomainError(ConfigError):
    """Argument outside the mathematical domain of a function."""


class UnsupportedModelError(ConfigError):
    pass


class CapabilityError(ConfigError):
    """No analytic predictor exists for the requested scheme/model/attack."""


class DegenerateHostError(ConfigError):
    pass


class ProtocolError(WmlabError):
    """Experiment protocol violated (e.g. permutation with N >= M)."""

    exit_code = 3


class ConvergenceError(WmlabError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
