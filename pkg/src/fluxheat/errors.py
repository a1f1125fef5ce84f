"""Exception hierarchy shared by all modules."""


class FluxHeatError(Exception):
    """Base class for all package errors."""


class ParameterError(FluxHeatError, ValueError):
    """A physical parameter is outside its allowed domain."""


class ConfigError(FluxHeatError, ValueError):
    """A config file is malformed or carries unknown keys."""


class UnsupportedConfigurationError(FluxHeatError):
    """The requested closed-form path does not cover these parameters."""


class DegenerateSystemError(FluxHeatError):
    """The rate matrix has no unique steady state."""


class ConvergenceError(FluxHeatError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CalibrationError(FluxHeatError, ValueError):
    """Calibration data are insufficient or inconsistent."""


class ExtrapolationError(CalibrationError):
    """A voltage lies outside the calibrated span."""
