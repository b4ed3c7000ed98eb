"""Phase-oracle gradient estimation on a statevector.

The circuit per estimate:

1. Hadamard every value qubit (uniform superposition of offsets).
2. Shift each register by the encoded point.  Negative components add
   the two's complement of the magnitude.
3. One phase-oracle call.
4. Undo the shift (subtract, or add the magnitude back for negatives).
5. Inverse QFT on each register separately, then measure.

Each register then holds ``(N/m_i) * df/dx_i`` rounded to a codeword.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fixedpoint import FixedPointFormat, decode_gradients, encode, twos_complement
from .oracle import CallRecord, ObjectiveFunction, OracleConfig, apply_phase_oracle
from .qarith import check_ancillas_zero, qadd_const, qsub_const
from .qft import iqft
from .sim import Histogram, StateVector, apply_gate, bitstring, marginal_probabilities, new_state, sample

DEFAULT_SHOTS = 1000
TIE_TOL = 1e-12

OracleFn = Callable[[StateVector, OracleConfig, Sequence[int], CallRecord], StateVector]


def _round(x, digits=12):
    """Trim float noise so JSON output is stable across kernel backends."""
    if isinstance(x, (list, tuple)):
        return [_round(v, digits) for v in x]
    return float(f"{float(x):.{digits}g}")


@dataclass
class GradientEstimate:
    function: str
    point: list[float]
    cfg: OracleConfig
    shots: int
    seed: int | None
    histogram: Histogram | None
    top_outcome: str
    codes: list[int]
    decoded: list[float]
    top_probability: float
    record: CallRecord = field(default_factory=CallRecord)
    probabilities: np.ndarray | None = field(default=None, repr=False)

    @property
    def oracle_calls(self) -> int:
        return self.record.oracle_calls

    @property
    def frequency(self) -> float | None:
        """Observed frequency of the top outcome (``None`` in exact mode)."""
        return None if self.histogram is None else self.histogram.frequency(self.top_outcome)

    def to_record(self) -> dict:
        out = {
            "function": self.function,
            "point": _round(self.point),
            "n_bits": self.cfg.fmt.n_bits,
            "frac_bits": self.cfg.fmt.frac_bits,
            "m": self.cfg.scale.to_dict()["m"],
            "l": self.cfg.scale.l,
            "readout": self.cfg.scale.readout,
            "centered": self.cfg.centered,
            "shots": self.shots,
            "seed": self.seed,
            "histogram": {} if self.histogram is None else self.histogram.to_dict(),
            "top_outcome": self.top_outcome,
            "top_frequency": None if self.frequency is None else _round(self.frequency),
            "top_probability": _round(self.top_probability),
            "codes": self.codes,
            "decoded": _round(self.decoded),
            "oracle_calls": self.oracle_calls,
        }
        return out


def _shift_codes(point: Sequence[float], fmt: FixedPointFormat) -> tuple[list[int], list[int]]:
    """Net shift codeword per register plus the adder constant actually used.

    Negative components add the two's complement of the magnitude's
    unsigned encoding; the net register shift is the same either way.
    """
    net, magnitudes = [], []
    unsigned = FixedPointFormat(fmt.n_bits, fmt.frac_bits, signed=False)
    for p in point:
        code = encode(p, fmt)
        if p >= 0:
            magnitudes.append(code)
        else:
            mag = encode(-p, unsigned)
            magnitudes.append(mag)
            assert twos_complement(mag, fmt.n_bits) == code
        net.append(code)
    return net, magnitudes


def run_circuit(f: ObjectiveFunction | None, point: Sequence[float], cfg: OracleConfig,
                offset: Sequence[float] | None = None, oracle: OracleFn | None = None,
                record: CallRecord | None = None, check: bool = False) -> StateVector:
    """Build the final state (before measurement)."""
    point = [float(p) for p in point]
    if len(point) != cfg.d:
        raise ValueError(f"point has {len(point)} components, config expects {cfg.d}")
    record = CallRecord() if record is None else record
    net, mags = _shift_codes(point, cfg.fmt)
    anc = cfg.adder_ancillas
    state = new_state(cfg.num_qubits)
    regs = [list(r) for r in cfg.registers()]
    for reg in regs:
        for q in reg:
            apply_gate(state, "H", q)
    for reg, p, mag in zip(regs, point, mags):
        if p >= 0:
            qadd_const(state, reg, mag, anc, check=check)
        else:
            qsub_const(state, reg, mag, anc, check=check)
    if oracle is None:
        apply_phase_oracle(state, f, cfg, net, offset=offset, record=record)
    else:
        oracle(state, cfg, net, record)
    for reg, p, mag in zip(regs, point, mags):
        if p >= 0:
            qsub_const(state, reg, mag, anc, check=check)
        else:
            qadd_const(state, reg, mag, anc, check=check)
    for reg in regs:
        iqft(state, reg)
    if check:
        check_ancillas_zero(state, anc, "after gradient circuit")
    return state


def _value_qubits(cfg: OracleConfig) -> list[int]:
    return cfg.layout.value_qubits()


def expected_probabilities(f: ObjectiveFunction | None, point: Sequence[float], cfg: OracleConfig,
                           offset: Sequence[float] | None = None,
                           oracle: OracleFn | None = None) -> np.ndarray:
    """Exact outcome probabilities over the value qubits, indexed by bitstring value."""
    state = run_circuit(f, point, cfg, offset=offset, oracle=oracle)
    return marginal_probabilities(state, _value_qubits(cfg))


def expected_distribution(f: ObjectiveFunction | None, point: Sequence[float], cfg: OracleConfig,
                          offset: Sequence[float] | None = None, oracle: OracleFn | None = None,
                          cutoff: float = 1e-14) -> dict[str, float]:
    """Exact output distribution keyed by MSB-first bitstring (register 0 leftmost)."""
    probs = expected_probabilities(f, point, cfg, offset, oracle)
    width = cfg.d * cfg.fmt.n_bits
    return {bitstring(i, width): float(probs[i]) for i in np.flatnonzero(probs > cutoff)}


def top_index(probs: np.ndarray, tol: float = TIE_TOL) -> int:
    """Most likely outcome; near-ties resolve to the lowest index."""
    return int(np.flatnonzero(probs >= probs.max() - tol)[0])


def split_codes(outcome: str, cfg: OracleConfig) -> list[int]:
    n = cfg.fmt.n_bits
    return [int(outcome[i * n:(i + 1) * n], 2) for i in range(cfg.d)]


def estimate_gradient(f: ObjectiveFunction, point: Sequence[float], cfg: OracleConfig,
                      shots: int = DEFAULT_SHOTS, seed: int | np.random.SeedSequence | None = 0,
                      exact: bool = False, offset: Sequence[float] | None = None,
                      oracle: OracleFn | None = None, check: bool = False) -> GradientEstimate:
    """Run the gradient circuit once and decode the measured registers.

    In ``exact`` mode no shots are drawn and the top outcome is the argmax
    of the exact distribution.  Otherwise it is the most frequent sampled
    bitstring.  Both break ties toward the lowest bitstring.
    """
    if not exact and shots < 1:
        raise ValueError("shots must be >= 1")
    record = CallRecord()
    state = run_circuit(f, point, cfg, offset=offset, oracle=oracle, record=record, check=check)
    vq = _value_qubits(cfg)
    probs = marginal_probabilities(state, vq)
    width = len(vq)
    if exact:
        hist = None
        top = bitstring(top_index(probs), width)
    else:
        hist = sample(state, shots, seed, vq)
        top = hist.most_common()
    codes = split_codes(top, cfg)
    decoded = decode_gradients(codes, cfg.fmt, cfg.scale)
    seed_out = seed if isinstance(seed, (int, type(None))) else None
    return GradientEstimate(
        function=getattr(f, "name", "custom"),
        point=[float(p) for p in point],
        cfg=cfg,
        shots=0 if exact else int(shots),
        seed=seed_out,
        histogram=hist,
        top_outcome=top,
        codes=codes,
        decoded=decoded,
        top_probability=float(probs[int(top, 2)]),
        record=record,
        probabilities=probs,
    )
