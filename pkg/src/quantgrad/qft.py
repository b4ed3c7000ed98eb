"""Gate-level quantum Fourier transform on a register.

``qft`` maps |k> to N**-0.5 * sum_j exp(2*pi*i*j*k/N) |j> on the integer
held by ``reg`` (qubits listed least significant first).  Both directions
include the bit-reversal swaps, so outputs read in natural order.
"""
from __future__ import annotations

import math
from typing import Sequence

from .sim import StateVector, apply_gate


def _check(state: StateVector, reg: Sequence[int]) -> list[int]:
    reg = [int(q) for q in reg]
    if not reg:
        raise ValueError("register must have at least one qubit")
    if len(set(reg)) != len(reg) or any(not 0 <= q < state.num_qubits for q in reg):
        raise ValueError(f"invalid register {reg}")
    return reg


def qft(state: StateVector, reg: Sequence[int]) -> StateVector:
    q = _check(state, reg)
    n = len(q)
    for j in reversed(range(n)):
        apply_gate(state, "H", q[j])
        for k in reversed(range(j)):
            apply_gate(state, "CPHASE", (q[k], q[j]), math.pi / (1 << (j - k)))
    for i in range(n // 2):
        apply_gate(state, "SWAP", (q[i], q[n - 1 - i]))
    return state


def iqft(state: StateVector, reg: Sequence[int]) -> StateVector:
    """Exact inverse of :func:`qft`: the gate sequence reversed and conjugated."""
    q = _check(state, reg)
    n = len(q)
    for i in reversed(range(n // 2)):
        apply_gate(state, "SWAP", (q[i], q[n - 1 - i]))
    for j in range(n):
        for k in range(j):
            apply_gate(state, "CPHASE", (q[k], q[j]), -math.pi / (1 << (j - k)))
        apply_gate(state, "H", q[j])
    return state
