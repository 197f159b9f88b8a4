"""Exception types raised by the solvers and drivers."""


class RadoptError(Exception):
    """Base class for all package errors."""


class InvalidArgument(RadoptError, ValueError):
    pass


class ConfigError(RadoptError, ValueError):
    pass


class InvalidOperator(RadoptError, ArithmeticError):
    pass


class IllPosedAdjoint(RadoptError, ArithmeticError):
    pass


class InfeasibleVolume(RadoptError, ValueError):
    pass


class ToleranceNotMet(RadoptError, ArithmeticError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InternalConsistencyError(RadoptError, RuntimeError):
    pass


class NoConvergence(RadoptError, RuntimeError):
    """Iteration cap reached.

    ``result`` carries the last iterate (or solution object) and
    ``residual`` the last measured residual.
    """

    def __init__(self, message, result=None, residual=None):
        super().__init__(message)
        self.result = result
        self.residual = residual
