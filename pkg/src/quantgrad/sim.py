"""Exact statevector simulation.

Conventions
-----------
Qubit 0 is the least significant bit of a basis index.  Bitstrings are
always rendered most-significant first, so ``"0101"`` on four qubits is
basis index 5 with qubits 0 and 2 set.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import GateError, PhaseEvaluationError, QubitLimitError

#: Largest register the simulator will allocate (2**24 amplitudes, 256 MiB).
MAX_QUBITS = 24


@dataclass
class StateVector:
    """Pure state over ``num_qubits`` qubits.

    ``amplitudes`` is owned by the instance and mutated in place by the
    gate functions; call :meth:`copy` before branching.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).ravel()
        q = int(round(math.log2(amps.shape[0]))) if amps.shape[0] else -1
        if q < 0 or (1 << q) != amps.shape[0]:
            raise ValueError("amplitude count must be a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(q, amps)


@dataclass(frozen=True)
class RegisterLayout:
    """Named contiguous qubit ranges plus a set of ancilla qubits."""

    registers: tuple[tuple[str, range], ...]
    ancillas: frozenset[int] = field(default_factory=frozenset)
    num_qubits: int | None = None

    def __post_init__(self):
        seen: set[int] = set()
        for name, rng in self.registers:
            qs = set(rng)
            if qs & seen:
                raise ValueError(f"register {name!r} overlaps another register")
            seen |= qs
        if set(self.ancillas) & seen:
            raise ValueError("ancillas overlap value registers")
        used = seen | set(self.ancillas)
        if self.num_qubits is not None and used and max(used) >= self.num_qubits:
            raise ValueError("layout references qubits beyond the state")
        if used and min(used) < 0:
            raise ValueError("negative qubit index")

    def __getitem__(self, name: str) -> range:
        for n, rng in self.registers:
            if n == name:
                return rng
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.registers]

    def value_qubits(self) -> list[int]:
        return sorted(q for _, rng in self.registers for q in rng)


@dataclass
class Histogram:
    """Shot counts keyed by MSB-first bitstring."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not sum to shots")

    def most_common(self) -> str:
        """Outcome with the largest count; ties go to the lowest bitstring."""
        return min(self.counts, key=lambda b: (-self.counts[b], b))

    def frequency(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots

    def to_dict(self) -> dict[str, int]:
        return dict(sorted(self.counts.items()))


def bitstring(index: int, width: int) -> str:
    return format(int(index), f"0{width}b")


def new_state(num_qubits: int) -> StateVector:
    """|0...0> on ``num_qubits`` qubits."""
    if not isinstance(num_qubits, (int, np.integer)) or num_qubits < 1:
        raise QubitLimitError(f"need at least one qubit, got {num_qubits!r}")
    if num_qubits > MAX_QUBITS:
        raise QubitLimitError(f"{num_qubits} qubits exceeds the ceiling of {MAX_QUBITS}")
    amps = np.zeros(1 << int(num_qubits), dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(int(num_qubits), amps)


_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_ARITY = {
    "H": 1, "X": 1, "Z": 1, "RY": 1,
    "CNOT": 2, "CX": 2, "CPHASE": 2, "SWAP": 2,
    "TOFFOLI": 3, "CCX": 3,
}


def _check_targets(state: StateVector, targets: Sequence[int], arity: int | None):
    targets = [int(t) for t in targets]
    if arity is not None and len(targets) != arity:
        raise GateError(f"gate expects {arity} target(s), got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise GateError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < state.num_qubits:
            raise GateError(f"qubit {t} out of range for {state.num_qubits} qubits")
    return targets


def apply_gate(state: StateVector, gate: str, targets: Sequence[int] | int,
               angle: float | None = None) -> StateVector:
    """Apply a named gate in place and return ``state``.

    Multi-qubit gates list controls first: ``CNOT (c, t)``,
    ``TOFFOLI (c1, c2, t)``.  ``CPHASE`` is symmetric and multiplies
    |11> by ``exp(i*angle)``.  ``RY`` takes ``angle`` in radians.
    """
    name = gate.upper()
    if name not in _ARITY:
        raise GateError(f"unknown gate {gate!r}")
    if isinstance(targets, (int, np.integer)):
        targets = (int(targets),)
    t = _check_targets(state, targets, _ARITY[name])
    amps = state.amplitudes
    if name in ("RY", "CPHASE"):
        if angle is None or not math.isfinite(angle):
            raise GateError(f"{name} needs a finite angle, got {angle!r}")
    if name == "H":
        kernels.apply_1q(amps, t[0], _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)
    elif name == "X":
        kernels.apply_mcx(amps, 0, t[0])
    elif name == "Z":
        kernels.apply_mcphase(amps, 1 << t[0], -1.0 + 0j)
    elif name == "RY":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        kernels.apply_1q(amps, t[0], c, -s, s, c)
    elif name in ("CNOT", "CX"):
        kernels.apply_mcx(amps, 1 << t[0], t[1])
    elif name in ("TOFFOLI", "CCX"):
        kernels.apply_mcx(amps, (1 << t[0]) | (1 << t[1]), t[2])
    elif name == "CPHASE":
        kernels.apply_mcphase(amps, (1 << t[0]) | (1 << t[1]), complex(math.cos(angle), math.sin(angle)))
    elif name == "SWAP":
        kernels.apply_swap(amps, t[0], t[1])
    return state


def apply_mcx(state: StateVector, controls: Iterable[int], target: int) -> StateVector:
    """Multi-controlled X; handy for arbitrary-width reversible logic."""
    controls = list(controls)
    t = _check_targets(state, [*controls, target], None)
    mask = 0
    for c in t[:-1]:
        mask |= 1 << c
    kernels.apply_mcx(state.amplitudes, mask, t[-1])
    return state


def apply_diagonal_phase(state: StateVector,
                         phase_of: Callable[[np.ndarray], np.ndarray] | np.ndarray,
                         vectorized: bool = True) -> StateVector:
    """Multiply amplitude ``b`` by ``exp(2*pi*i*phase_of(b))``.

    ``phase_of`` is either an array of ``2**q`` phases in turns or a
    callable.  A vectorized callable receives the whole index array; pass
    ``vectorized=False`` for a scalar function of one index.
    """
    dim = state.dim
    if callable(phase_of):
        if vectorized:
            turns = phase_of(np.arange(dim, dtype=np.int64))
        else:
            turns = [phase_of(b) for b in range(dim)]
    else:
        turns = phase_of
    turns = np.broadcast_to(np.asarray(turns, dtype=np.float64), (dim,))
    bad = ~np.isfinite(turns)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise PhaseEvaluationError(f"non-finite phase at basis index {idx}", index=idx)
    kernels.apply_phases(state.amplitudes, np.ascontiguousarray(turns))
    return state


def marginal_probabilities(state: StateVector, qubits: Sequence[int] | None = None) -> np.ndarray:
    """Probabilities of the sub-register ``qubits`` (sorted ascending).

    Entry ``k`` of the result corresponds to the sub-register value whose
    bit ``j`` is the ``j``-th lowest listed qubit.
    """
    probs = state.probabilities()
    if qubits is None:
        return probs
    qs = sorted(int(q) for q in qubits)
    _check_targets(state, qs, None)
    if qs == list(range(qs[0], qs[0] + len(qs))):
        # contiguous block: a reshape-and-sum, no index arithmetic
        lo = qs[0]
        return probs.reshape(-1, 1 << len(qs), 1 << lo).sum(axis=(0, 2))
    idx = np.arange(state.dim, dtype=np.int64)
    sub = np.zeros(state.dim, dtype=np.int64)
    for j, q in enumerate(qs):
        sub |= ((idx >> q) & 1) << j
    return np.bincount(sub, weights=probs, minlength=1 << len(qs))


def exact_distribution(state: StateVector, qubits: Sequence[int] | None = None) -> dict[str, float]:
    """Nonzero outcome probabilities keyed by MSB-first bitstring."""
    probs = marginal_probabilities(state, qubits)
    width = state.num_qubits if qubits is None else len(qubits)
    nz = np.flatnonzero(probs)
    return {bitstring(i, width): float(probs[i]) for i in nz}


def sample(state: StateVector, shots: int, seed: int | np.random.SeedSequence | None = 0,
           qubits: Sequence[int] | None = None) -> Histogram:
    """Draw ``shots`` computational-basis measurements.

    Uses a single multinomial draw, so equal seeds give equal histograms.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = marginal_probabilities(state, qubits)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(int(shots), probs)
    width = state.num_qubits if qubits is None else len(qubits)
    counts = {bitstring(i, width): int(draws[i]) for i in np.flatnonzero(draws)}
    return Histogram(counts, int(shots))


def subsystem_purity(state: StateVector, qubit_set: Iterable[int]) -> float:
    """Tr(rho^2) of the reduced state on ``qubit_set``."""
    qs = sorted(set(int(q) for q in qubit_set))
    if not qs or len(qs) >= state.num_qubits:
        raise ValueError("qubit_set must be a nonempty proper subset")
    _check_targets(state, qs, None)
    q = state.num_qubits
    # reshape axis a corresponds to qubit q-1-a
    tensor = state.amplitudes.reshape([2] * q)
    keep = [q - 1 - k for k in reversed(qs)]
    rest = [a for a in range(q) if a not in keep]
    mat = np.transpose(tensor, keep + rest).reshape(1 << len(qs), -1)
    if mat.shape[0] <= mat.shape[1]:
        rho = mat @ mat.conj().T
    else:
        rho = mat.conj().T @ mat
    return float(np.sum(np.abs(rho) ** 2))


def expectation_pauli(state: StateVector, pauli: str) -> float:
    """<psi|P|psi> for a Pauli string; character 0 acts on the top qubit."""
    pauli = pauli.upper()
    if len(pauli) != state.num_qubits or set(pauli) - set("IXYZ"):
        raise ValueError(f"malformed Pauli string {pauli!r} for {state.num_qubits} qubits")
    flip = zmask = 0
    n_y = 0
    for pos, ch in enumerate(pauli):
        bit = 1 << (state.num_qubits - 1 - pos)
        if ch in "XY":
            flip |= bit
        if ch in "ZY":
            zmask |= bit
        n_y += ch == "Y"
    idx = np.arange(state.dim, dtype=np.int64)
    sign = 1.0 - 2.0 * (np.bitwise_count(idx & zmask) & 1)
    psi = state.amplitudes
    val = (1j ** n_y) * np.sum(np.conj(psi[idx ^ flip]) * sign * psi)
    return float(val.real)


def pauli_matrix(pauli: str) -> np.ndarray:
    """Dense matrix of a Pauli string in the same ordering as the simulator."""
    single = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    out = np.ones((1, 1), dtype=complex)
    for ch in pauli.upper():
        out = np.kron(out, single[ch])
    return out
