"""Exception hierarchy shared across the package."""


class QuantGradError(Exception):
    """Base class for every error raised by quantgrad."""


class QubitLimitError(QuantGradError, ValueError):
    """Requested register size is empty or above the simulator ceiling."""


class GateError(QuantGradError, ValueError):
    """Malformed gate request: unknown name, bad targets, bad angle."""


class PhaseEvaluationError(QuantGradError, ArithmeticError):
    """A phase function produced a non-finite value.

    ``index`` is the offending basis index (or grid point for oracles).
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class EncodingError(QuantGradError, ValueError):
    """Value cannot be represented in the requested fixed-point format."""


class AncillaError(QuantGradError, RuntimeError):
    """An ancilla qubit was not in |0> when the circuit required it."""


class VerificationError(QuantGradError, AssertionError):
    """A matrix-level identity check exceeded its tolerance."""


class ObjectiveError(QuantGradError, LookupError):
    """Unknown objective name or missing analytic gradient."""
