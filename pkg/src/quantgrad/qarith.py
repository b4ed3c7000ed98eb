"""Reversible in-place modular arithmetic on qubit registers.

The adder is the ripple-carry MAJ/UMA ladder.  It never leaves the value
register entangled with its ancillas, which is what lets the gradient
circuit shift a superposition by a constant and later shift it back.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AncillaError, EncodingError, GateError
from .fixedpoint import twos_complement
from .sim import StateVector, apply_gate, marginal_probabilities, new_state

ANCILLA_TOL = 1e-10


def _debug_default() -> bool:
    return os.environ.get("QUANTGRAD_DEBUG", "").strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class AdderWiring:
    """Qubit roles for :func:`qadd`.

    ``a_register`` is the addend (restored), ``b_register`` receives
    ``a + b mod 2**n``.  Both list qubits least-significant first.
    """

    carry_in: int
    a_register: tuple[int, ...]
    b_register: tuple[int, ...]
    carry_out: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "a_register", tuple(int(q) for q in self.a_register))
        object.__setattr__(self, "b_register", tuple(int(q) for q in self.b_register))
        if len(self.a_register) != len(self.b_register) or not self.a_register:
            raise GateError("a and b registers must have the same nonzero width")
        qs = [self.carry_in, *self.a_register, *self.b_register]
        if self.carry_out is not None:
            qs.append(self.carry_out)
        if len(set(qs)) != len(qs):
            raise GateError("adder wiring overlaps")

    @property
    def width(self) -> int:
        return len(self.a_register)

    @property
    def ancillas(self) -> tuple[int, ...]:
        extra = () if self.carry_out is None else (self.carry_out,)
        return (self.carry_in, *extra)


def maj_block(state: StateVector, carry: int, a: int, b: int) -> StateVector:
    """(c, a, b) -> (c^a, MAJ(c, a, b), b^a); the majority lands on ``a``."""
    apply_gate(state, "CNOT", (a, b))
    apply_gate(state, "CNOT", (a, carry))
    apply_gate(state, "TOFFOLI", (carry, b, a))
    return state


def uma_block(state: StateVector, carry: int, a: int, b: int) -> StateVector:
    """Undo a MAJ block while writing the sum bit onto ``b``."""
    apply_gate(state, "TOFFOLI", (carry, b, a))
    apply_gate(state, "CNOT", (a, carry))
    apply_gate(state, "CNOT", (carry, b))
    return state


def check_ancillas_zero(state: StateVector, qubits: Sequence[int], where: str = "") -> None:
    """Raise :class:`AncillaError` unless every listed qubit is exactly |0>."""
    for q in qubits:
        p0 = marginal_probabilities(state, [q])[0]
        if abs(1.0 - p0) > ANCILLA_TOL:
            raise AncillaError(f"ancilla qubit {q} not in |0> {where} (P0={p0:.3g})")


def qadd(state: StateVector, wiring: AdderWiring, check: bool | None = None) -> StateVector:
    """b <- a + b (mod 2**n, or into ``carry_out`` when wired)."""
    check = _debug_default() if check is None else check
    if check:
        check_ancillas_zero(state, wiring.ancillas, "before qadd")
    a, b, n = wiring.a_register, wiring.b_register, wiring.width
    prev = wiring.carry_in
    for i in range(n):
        maj_block(state, prev, a[i], b[i])
        prev = a[i]
    if wiring.carry_out is not None:
        apply_gate(state, "CNOT", (a[n - 1], wiring.carry_out))
    for i in reversed(range(n)):
        uma_block(state, wiring.carry_in if i == 0 else a[i - 1], a[i], b[i])
    if check:
        check_ancillas_zero(state, (wiring.carry_in,), "after qadd")
    return state


def _load(state: StateVector, qubits: Sequence[int], constant: int) -> None:
    for i, q in enumerate(qubits):
        if (constant >> i) & 1:
            apply_gate(state, "X", q)


def _split_ancilla(reg, ancilla, carry):
    reg = tuple(int(q) for q in reg)
    ancilla = tuple(int(q) for q in ancilla)
    if carry is None:
        if len(ancilla) != len(reg) + 1:
            raise GateError("ancilla needs n+1 qubits when no carry qubit is given")
        ancilla, carry = ancilla[:-1], ancilla[-1]
    if len(ancilla) != len(reg):
        raise GateError("ancilla register width must match reg")
    return reg, ancilla, int(carry)


def qadd_const(state: StateVector, reg: Sequence[int], constant: int, ancilla: Sequence[int],
               carry: int | None = None, check: bool | None = None) -> StateVector:
    """reg <- reg + constant (mod 2**n) via load / :func:`qadd` / unload.

    ``ancilla`` holds the loaded constant; the carry-in qubit is either
    ``carry`` or the last entry of ``ancilla``.  All ancillas must start in
    |0> and are returned there.
    """
    reg, anc, carry = _split_ancilla(reg, ancilla, carry)
    n = len(reg)
    constant = int(constant)
    if not 0 <= constant < (1 << n):
        raise EncodingError(f"constant {constant} out of range for {n} bits")
    check = _debug_default() if check is None else check
    if constant == 0:
        return state
    if check:
        check_ancillas_zero(state, (*anc, carry), "before qadd_const")
    _load(state, anc, constant)
    qadd(state, AdderWiring(carry, anc, reg), check=False)
    _load(state, anc, constant)
    if check:
        check_ancillas_zero(state, (*anc, carry), "after qadd_const")
    return state


def qsub_const(state: StateVector, reg: Sequence[int], constant: int, ancilla: Sequence[int],
               carry: int | None = None, check: bool | None = None) -> StateVector:
    """reg <- reg - constant (mod 2**n), as addition of the two's complement."""
    n = len(tuple(reg))
    constant = int(constant)
    if not 0 <= constant < (1 << n):
        raise EncodingError(f"constant {constant} out of range for {n} bits")
    return qadd_const(state, reg, twos_complement(constant, n), ancilla, carry, check)


def entangling_adder_demo(state: StateVector | None = None) -> StateVector:
    """Add qubit 0 into qubit 1 with a bare CNOT.

    Starting from (|0>+|1>)|0>/sqrt(2) this yields a Bell pair, so the
    target's reduced purity drops to 1/2.  That is the failure mode the
    ancilla-based adder avoids.
    """
    if state is None:
        state = new_state(2)
        apply_gate(state, "H", 0)
    if state.num_qubits != 2:
        raise GateError("demo expects a 2-qubit state")
    return apply_gate(state, "CNOT", (0, 1))


def basis_state(num_qubits: int, values: Sequence[tuple[Sequence[int], int]]) -> StateVector:
    """Basis state with each ``(qubits, value)`` register set; qubits LSB first."""
    idx = 0
    for qubits, v in values:
        for i, q in enumerate(qubits):
            if (v >> i) & 1:
                idx |= 1 << q
    s = new_state(num_qubits)
    s.amplitudes[0] = 0
    s.amplitudes[idx] = 1
    return s


def read_register(index: int, qubits: Sequence[int]) -> int:
    return sum(((index >> q) & 1) << i for i, q in enumerate(qubits))


def register_values(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Probability distribution over the integer held by ``qubits`` (LSB first)."""
    probs = state.probabilities()
    idx = np.arange(state.dim, dtype=np.int64)
    vals = np.zeros_like(idx)
    for i, q in enumerate(qubits):
        vals |= ((idx >> q) & 1) << i
    return np.bincount(vals, weights=probs, minlength=1 << len(qubits))
