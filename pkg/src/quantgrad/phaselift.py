"""Matrix-level checks for lifting an expectation value into a phase oracle.

The chain, each link verified numerically on small instances:

* LCU: with ``H = sum_j a_j U_j`` and ``sum a_j = 1``,
  ``<0|<psi| W^dag S W |0>|psi> = <psi|H|psi>`` where ``W|0> = sum sqrt(a_j)|j>``
  and ``S = sum_j |j><j| (x) U_j``.
* Hadamard test: ancilla outcome 1 has probability ``(1 - Re<psi|U|psi>)/2``.
* A probability oracle ``O_p`` block-encodes ``diag(1 - 2 p_b)`` through
  ``(<0| (x) I) O_p^dag (Z (x) I) O_p (|0> (x) I)``.
* ``exp(i t D)`` of that diagonal is the phase oracle, realized here by
  direct exponentiation.

Matrices put the ancilla or index register on the top tensor factor,
i.e. ``kron(ancilla_op, system_op)``.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import VerificationError
from .oracle import CallRecord, OracleConfig, register_points
from .sim import StateVector, pauli_matrix
from .vqe import Hamiltonian, ansatz_batch, heisenberg_2q, u_to_theta

LCU_TOL = 1e-10
BLOCK_TOL = 1e-9
_H1 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_Z1 = np.diag([1.0, -1.0]).astype(complex)


def _vec(psi) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)


def _check_unitary(u: np.ndarray, what: str, tol: float = LCU_TOL) -> None:
    dev = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
    if dev > tol:
        raise VerificationError(f"{what} is not unitary (deviation {dev:.3g})")


@dataclass(frozen=True)
class LcuDecomposition:
    """``H / scale = sum_j a_j * sign_j * P_j`` with ``a_j >= 0`` summing to 1."""

    coefficients: tuple[float, ...]
    unitaries: tuple[str, ...]
    signs: tuple[float, ...] | None = None
    scale: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if len(self.coefficients) != len(self.unitaries) or not len(a):
            raise ValueError("need one coefficient per unitary")
        if (a < 0).any() or abs(a.sum() - 1.0) > 1e-12:
            raise ValueError("coefficients must be nonnegative and sum to 1")
        qs = {len(p) for p in self.unitaries}
        if len(qs) != 1 or any(set(p.upper()) - set("IXYZ") for p in self.unitaries):
            raise ValueError("malformed Pauli strings")
        if self.signs is not None and len(self.signs) != len(self.unitaries):
            raise ValueError("one sign per term")

    @property
    def num_terms(self) -> int:
        return len(self.coefficients)

    @property
    def index_width(self) -> int:
        return max(1, math.ceil(math.log2(self.num_terms)))

    @property
    def system_qubits(self) -> int:
        return len(self.unitaries[0])

    def term_matrix(self, j: int) -> np.ndarray:
        s = 1.0 if self.signs is None else float(self.signs[j])
        return s * pauli_matrix(self.unitaries[j])

    def direct_expectation(self, psi) -> float:
        v = _vec(psi)
        return float(sum(a * np.real(np.vdot(v, self.term_matrix(j) @ v))
                         for j, a in enumerate(self.coefficients)))

    @classmethod
    def from_hamiltonian(cls, h: Hamiltonian) -> "LcuDecomposition":
        c = np.array([t.coefficient for t in h.terms])
        total = np.abs(c).sum()
        return cls(tuple((np.abs(c) / total).tolist()), tuple(t.pauli for t in h.terms),
                   tuple(np.where(c < 0, -1.0, 1.0).tolist()), float(total))


def prepare_w(a: Sequence[float], width: int | None = None) -> StateVector:
    """Index-register state ``sum_j sqrt(a_j) |j>``, zero-padded."""
    a = np.asarray(a, dtype=float)
    if (a < 0).any():
        raise ValueError("negative coefficient")
    if abs(a.sum() - 1.0) > 1e-12:
        raise ValueError(f"coefficients sum to {a.sum()}, not 1")
    width = width if width is not None else max(1, math.ceil(math.log2(len(a))))
    if len(a) > 1 << width:
        raise ValueError("too many coefficients for the index width")
    amps = np.zeros(1 << width, dtype=complex)
    amps[: len(a)] = np.sqrt(a)
    return StateVector(width, amps)


def prepare_w_unitary(a: Sequence[float], width: int | None = None) -> np.ndarray:
    """A real orthogonal ``W`` whose first column is ``prepare_w(a)`` (Householder)."""
    w = prepare_w(a, width).amplitudes.real
    e0 = np.zeros_like(w)
    e0[0] = 1.0
    v = e0 - w
    nv = v @ v
    if nv < 1e-30:
        return np.eye(w.size, dtype=complex)
    return (np.eye(w.size) - 2.0 * np.outer(v, v) / nv).astype(complex)


def select_h(decomp: LcuDecomposition) -> np.ndarray:
    """``sum_j |j><j| (x) U_j``; unused index values act as identity."""
    dim_i = 1 << decomp.index_width
    dim_s = 1 << decomp.system_qubits
    out = np.zeros((dim_i * dim_s, dim_i * dim_s), dtype=complex)
    for j in range(dim_i):
        block = decomp.term_matrix(j) if j < decomp.num_terms else np.eye(dim_s)
        out[j * dim_s:(j + 1) * dim_s, j * dim_s:(j + 1) * dim_s] = block
    _check_unitary(out, "select_h")
    return out


def lcu_unitary(decomp: LcuDecomposition) -> np.ndarray:
    """``(W^dag (x) I) S (W (x) I)`` on index (x) system."""
    w = prepare_w_unitary(decomp.coefficients, decomp.index_width)
    eye = np.eye(1 << decomp.system_qubits)
    return np.kron(w.conj().T, eye) @ select_h(decomp) @ np.kron(w, eye)


def lcu_expectation(decomp: LcuDecomposition, psi) -> float:
    """Expectation through the prepare/select sandwich, checked against the direct sum."""
    v = _vec(psi)
    full = np.kron(np.eye(1 << decomp.index_width)[0], v)
    val = np.vdot(full, lcu_unitary(decomp) @ full)
    ref = decomp.direct_expectation(v)
    if abs(val - ref) > LCU_TOL:
        raise VerificationError(f"LCU identity off by {abs(val - ref):.3g}")
    return float(val.real)


@dataclass
class ProbabilityOracleResult:
    """``p`` = probability of ancilla outcome 1, plus each normalized branch."""

    p: float
    state_0: np.ndarray | None
    state_1: np.ndarray | None
    circuit: np.ndarray


def hadamard_test_circuit(u: np.ndarray) -> np.ndarray:
    """``(H (x) I) C(U) (H (x) I)`` with the ancilla as top factor."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    cu = np.block([[np.eye(dim), np.zeros((dim, dim))], [np.zeros((dim, dim)), u]])
    h = np.kron(_H1, np.eye(dim))
    return h @ cu @ h


def hadamard_test(u: np.ndarray, psi) -> ProbabilityOracleResult:
    u = np.asarray(u, dtype=complex)
    v = _vec(psi)
    if u.shape != (v.size, v.size):
        raise ValueError(f"unitary shape {u.shape} does not match state dimension {v.size}")
    _check_unitary(u, "U")
    circ = hadamard_test_circuit(u)
    out = circ @ np.concatenate([v, np.zeros_like(v)])
    b0, b1 = out[: v.size], out[v.size:]
    p = float(np.vdot(b1, b1).real)
    ref = (1.0 - np.real(np.vdot(v, u @ v))) / 2.0
    if abs(p - ref) > LCU_TOL:
        raise VerificationError(f"Hadamard-test probability off by {abs(p - ref):.3g}")
    n0, n1 = np.linalg.norm(b0), np.linalg.norm(b1)
    return ProbabilityOracleResult(p, b0 / n0 if n0 > 1e-15 else None,
                                   b1 / n1 if n1 > 1e-15 else None, circ)


def probability_oracle(p: Sequence[float]) -> np.ndarray:
    """Controlled-on-basis oracle: on system basis ``|b>`` rotate the ancilla so
    that outcome 1 has probability ``p_b``."""
    p = np.asarray(p, dtype=float)
    if ((p < 0) | (p > 1)).any():
        raise ValueError("probabilities must lie in [0, 1]")
    dim = p.size
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    for b, pb in enumerate(p):
        c, s = math.sqrt(1 - pb), math.sqrt(pb)
        # ancilla top factor: index a*dim + b
        out[b, b], out[b, dim + b] = c, -s
        out[dim + b, b], out[dim + b, dim + b] = s, c
    return out


def block_encoded_matrix(o_p: np.ndarray) -> np.ndarray:
    """``(<0| (x) I) O_p^dag (Z (x) I) O_p (|0> (x) I)``."""
    o_p = np.asarray(o_p, dtype=complex)
    dim = o_p.shape[0] // 2
    full = o_p.conj().T @ np.kron(_Z1, np.eye(dim)) @ o_p
    return full[:dim, :dim]


def outcome_probabilities(o_p: np.ndarray) -> np.ndarray:
    """``p_b`` = P(ancilla 1 | input |0>|b>) for every system basis state."""
    dim = o_p.shape[0] // 2
    cols = o_p[:, :dim]
    return np.sum(np.abs(cols[dim:, :]) ** 2, axis=0)


def block_encoding_diag_check(o_p: np.ndarray, diagonal_only: bool = False,
                              tol: float = BLOCK_TOL) -> float:
    """Max deviation of the encoded block from ``diag(1 - 2 p_b)``.

    ``diagonal_only`` compares the diagonal alone, for oracles (like a
    Hadamard test of a non-diagonal ``U``) whose block has off-diagonal
    terms.  Raises :class:`VerificationError` above ``tol``.
    """
    o_p = np.asarray(o_p, dtype=complex)
    if o_p.shape[0] % 2 or o_p.shape[0] != o_p.shape[1]:
        raise ValueError("O_p must be square on ancilla (x) system")
    _check_unitary(o_p, "O_p")
    block = block_encoded_matrix(o_p)
    target = np.diag(1.0 - 2.0 * outcome_probabilities(o_p))
    diff = np.abs(block - target)
    dev = float(np.diag(diff).max() if diagonal_only else diff.max())
    if dev > tol:
        raise VerificationError(f"block encoding deviates by {dev:.3g}")
    return dev


def phase_from_diag(diagonal: Sequence[float], t: float) -> np.ndarray:
    """``exp(i t D)`` for the real diagonal ``D``."""
    d = np.asarray(diagonal, dtype=float)
    if not np.isfinite(d).all() or not math.isfinite(t):
        raise ValueError("non-finite diagonal or time")
    return np.diag(np.exp(1j * t * d))


def lifted_energies(thetas: np.ndarray, hamiltonian: Hamiltonian | None = None) -> np.ndarray:
    """Energies recovered through LCU -> Hadamard test -> diag(1 - 2p), rescaled.

    For each angle pair the composite ``W^dag S W`` is Hadamard-tested on
    ``|0>|psi(theta)>``; a controlled-on-basis oracle with those outcome
    probabilities is then block-encoded and its diagonal read back.
    """
    h = hamiltonian or heisenberg_2q()
    decomp = LcuDecomposition.from_hamiltonian(h)
    u = lcu_unitary(decomp)
    idx0 = np.eye(1 << decomp.index_width)[0]
    thetas = np.asarray(thetas, dtype=float).reshape(-1, 2)
    psis = ansatz_batch(thetas[:, 0], thetas[:, 1])
    p = np.array([hadamard_test(u, np.kron(idx0, psi)).p for psi in psis])
    p = np.clip(p, 0.0, 1.0)  # float rounding can overshoot by ~1e-16
    o_p = probability_oracle(p)
    block_encoding_diag_check(o_p)
    return decomp.scale * np.real(np.diag(block_encoded_matrix(o_p)))


def lifted_energy_oracle(hamiltonian: Hamiltonian | None = None):
    """Gradient-circuit oracle whose phases come from :func:`lifted_energies`.

    Intended for the wrapped-coordinate energy objective of :mod:`vqe`.
    """

    def oracle(state: StateVector, cfg: OracleConfig, shift: Sequence[int], record: CallRecord):
        from .fixedpoint import decode
        from .oracle import _expand

        N, d = cfg.fmt.N, cfg.d
        point = [decode(s, cfg.fmt) for s in shift]
        axes = []
        for i, ax in enumerate(register_points(cfg, point)):
            r = (cfg.offsets() + int(shift[i])) % N
            out = np.empty(N)
            out[r] = ax
            axes.append(out)
        mesh = np.meshgrid(*axes, indexing="ij")
        us = np.stack([m.ravel() for m in mesh], axis=1)
        e = lifted_energies(u_to_theta(us), hamiltonian)
        u_phase = phase_from_diag(e, 2 * math.pi * cfg.phase_constant())
        grid = np.diag(u_phase).reshape((N,) * d)
        phases = _expand(grid, cfg, state.num_qubits)
        state.amplitudes *= phases
        record.calls.append({"shift": list(shift), "point": point, "lifted": True})
        return state

    return oracle
