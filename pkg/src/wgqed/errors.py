"""Exception hierarchy.

Three families map onto the command-line exit codes: parse/config problems
(2), numerical or convergence failures (3) and physically inconsistent inputs
(4).
"""


class WgqedError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ParseError(WgqedError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(WgqedError, ValueError):
    exit_code = 2


class SpaceMismatchError(WgqedError, ValueError):
    exit_code = 2


# numerical / convergence -------------------------------------------------

class NumericalError(WgqedError):
    exit_code = 3


class NondegeneracyError(NumericalError):
    """Steady state is not unique (null space of the generator is not 1-D)."""


class TruncationError(NumericalError):
    pass


class CalibrationError(NumericalError):
    pass


class DarkChannelError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class NoPeakError(NumericalError):
    pass


class NoSignalError(NumericalError):
    pass


class ModeFitError(NumericalError):
    pass


# physics consistency ------------------------------------------------------

class PhysicsError(WgqedError, ValueError):
    exit_code = 4


class UnsupportedInFormula(PhysicsError):
    pass


class DivergentSaturation(PhysicsError):
    pass


class DivergentCooperativity(PhysicsError):
    pass


class InconsistentParameters(PhysicsError):
    pass


class TruncationWarning(UserWarning):
    """Coherent amplitude too large for the Fock cutoff."""


class LossyCavityWarning(UserWarning):
    """Mode couplings are not well above the emitter decay rate."""
