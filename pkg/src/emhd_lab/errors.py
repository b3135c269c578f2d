"""Exception types raised across the package."""


class EmhdError(Exception):
    """Base class for all package errors."""


class InvalidField(EmhdError, ValueError):
    pass


class NotRealField(EmhdError, ValueError):
    pass


class GridMismatch(EmhdError, ValueError):
    pass


class InvalidGrid(EmhdError, ValueError):
    pass


class InvalidShell(EmhdError, ValueError):
    pass


class ZeroBlock(EmhdError, ValueError):
    pass


class InvalidParameters(EmhdError, ValueError):
    pass


class ThresholdViolated(InvalidParameters):
    """alpha + beta <= 2: no admissible interpolation exponent exists."""


class InsufficientSamples(EmhdError, ValueError):
    pass


class NonpositiveEnergy(EmhdError, ValueError):
    pass


class InvalidBand(EmhdError, ValueError):
    pass


class ConfigError(EmhdError, ValueError):
    pass


class BlowupDetected(EmhdError, RuntimeError):
    """Integration stopped because the solution became non-finite or too large.

    Carries the last finite state and the diagnostics gathered so far so that
    callers can persist them.
    """

    def __init__(self, time, reason="nonfinite", state=None, series=None):
        super().__init__(f"blow-up detected at t={time:.6g} ({reason})")
        self.time = time
        self.reason = reason
        self.state = state
        self.series = series
