"""Statevector toolkit for phase-oracle gradient estimation, quantum-gradient
descent and a two-qubit variational eigensolver."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AncillaError,
    EncodingError,
    GateError,
    ObjectiveError,
    PhaseEvaluationError,
    QuantGradError,
    QubitLimitError,
    VerificationError,
)
from .fixedpoint import FixedPointFormat, GradientScale, decode, decode_gradient, encode, twos_complement  # noqa: E402
from .gradest import GradientEstimate, estimate_gradient, expected_distribution  # noqa: E402
from .oracle import ObjectiveFunction, OracleConfig, apply_phase_oracle, get_objective, oracle_call_count  # noqa: E402
from .optimizer import DescentConfig, DescentTrace, descend  # noqa: E402
from .sim import StateVector, apply_gate, exact_distribution, new_state, sample  # noqa: E402

__all__ = [
    "AncillaError", "EncodingError", "GateError", "ObjectiveError", "PhaseEvaluationError",
    "QuantGradError", "QubitLimitError", "VerificationError",
    "FixedPointFormat", "GradientScale", "decode", "decode_gradient", "encode", "twos_complement",
    "GradientEstimate", "estimate_gradient", "expected_distribution",
    "ObjectiveFunction", "OracleConfig", "apply_phase_oracle", "get_objective", "oracle_call_count",
    "DescentConfig", "DescentTrace", "descend",
    "StateVector", "apply_gate", "exact_distribution", "new_state", "sample",
]
